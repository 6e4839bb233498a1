"""Planning facade and replay validation of conjectures.

:func:`validate` re-simulates a conjecture step by step with its own matcher and
does not share code with the search beyond the logic core, so it can catch
search bugs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .assumptions import Assumption
from .domain import Domain, Operator, Problem, Task
from .logic import (
    Arith, Constraint, InconsistentStateError, KnowledgeState, Literal, Num, Term,
    Truth, Var, consistent_union, eval_constraint, fold,
)
from .search import Conjecture, SearchConfig, SearchStats, Status, find_conjecture

__all__ = ["PlanReport", "ValidationReport", "PlanningError", "plan", "validate"]


class PlanningError(RuntimeError):
    pass


@dataclass
class PlanReport:
    conjecture: Conjecture | None
    status: Status
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


@dataclass
class ValidationReport:
    valid: bool
    trajectory: list[KnowledgeState]
    first_failure: tuple[int, Literal | Constraint | str] | None = None


def plan(domain: Domain, problem: Problem, config: SearchConfig = SearchConfig()) -> PlanReport:
    if problem.domain_name != domain.name:
        raise PlanningError(f"problem {problem.name} is for domain {problem.domain_name}, "
                            f"got {domain.name}")
    result = find_conjecture(problem.init, domain, problem.goals, config)
    if result.conjecture is not None:
        check = validate(result.conjecture, problem.init, domain, problem.goals)
        if not check.valid:
            raise PlanningError(f"search produced a conjecture that fails replay: {check.first_failure}")
    return PlanReport(result.conjecture, result.status, result.stats)


# ------------------------------------------------------------------ matching
# One-way matching: only schema variables bind; whatever sits in the state
# (including unknowns such as ?q#1) is treated as an opaque term.


def _subst(t: Term, b: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return b.get(t.name, t)
    if isinstance(t, Arith):
        return fold(Arith(t.op, _subst(t.left, b), _subst(t.right, b)))
    return t


def _match_term(pat: Term, target: Term, b: dict[str, Term], schema_vars: frozenset[str]) -> dict | None:
    if isinstance(pat, Var) and pat.name in schema_vars:
        if pat.name in b:
            return b if b[pat.name] == target else None
        out = dict(b)
        out[pat.name] = target
        return out
    if isinstance(pat, Arith):
        p = _subst(pat, b)
        if not isinstance(p, Arith):
            return b if p == target else None
        if not isinstance(target, Arith) or target.op != p.op:
            return None
        b2 = _match_term(p.left, target.left, b, schema_vars)
        return None if b2 is None else _match_term(p.right, target.right, b2, schema_vars)
    return b if pat == target else None


def _match_args(pats, targets, b, schema_vars) -> dict | None:
    if len(pats) != len(targets):
        return None
    for p, t in zip(pats, targets):
        b = _match_term(p, t, b, schema_vars)
        if b is None:
            return None
    return b


def _bindings(op: Operator, args, state: KnowledgeState,
              covered: list[Constraint]) -> Iterator[dict]:
    schema_vars = frozenset(v.name for v in op.params)
    for c in op.pre:
        for side in ((c.left, c.right) if isinstance(c, Constraint) else c.args):
            schema_vars |= frozenset(side.iter_vars())
    b0 = _match_args(op.params, args, {}, schema_vars)
    if b0 is None:
        return
    lits = [p for p in op.pre if isinstance(p, Literal)]
    cons = [p for p in op.pre if isinstance(p, Constraint)]

    def lit_rec(i: int, b: dict) -> Iterator[dict]:
        if i == len(lits):
            yield from con_rec(0, b)
            return
        p = lits[i]
        for fact in state:
            if fact.pred == p.pred and fact.positive == p.positive:
                b2 = _match_args(p.args, fact.args, b, schema_vars)
                if b2 is not None:
                    yield from lit_rec(i + 1, b2)

    def con_rec(i: int, b: dict) -> Iterator[dict]:
        if i == len(cons):
            yield b
            return
        c = cons[i]
        applied = Constraint(c.op, _subst(c.left, b), _subst(c.right, b))
        if eval_constraint(applied) is Truth.SATISFIED:
            yield from con_rec(i + 1, b)
        for a in covered:
            if a.op == c.op:
                b2 = _match_args((c.left, c.right), (a.left, a.right), b, schema_vars)
                if b2 is not None:
                    yield from con_rec(i + 1, b2)

    yield from lit_rec(0, b0)


def _diagnose(op: Operator, args, state: KnowledgeState) -> Literal | Constraint | str:
    """Best-effort name for the precondition instance that blocks a step."""
    schema_vars = frozenset(v.name for v in op.params)
    b = _match_args(op.params, args, {}, schema_vars | frozenset(
        n for p in op.pre for n in p.iter_vars())) or {}
    missing: list[Literal | Constraint] = []
    for p in op.pre:
        if not isinstance(p, Literal):
            continue
        for fact in state:
            if fact.pred == p.pred and fact.positive == p.positive:
                b2 = _match_args(p.args, fact.args, b, frozenset(n for n in p.iter_vars()))
                if b2 is not None:
                    b = b2
                    break
        else:
            missing.append(p)
    # fill unknown quantities from bounding comparisons, as the planner does
    for c in op.pre:
        if isinstance(c, Constraint) and c.op in (">=", "<=", "="):
            for v, n in ((c.left, c.right), (c.right, c.left)):
                if isinstance(v, Var) and isinstance(n, Num) and v.name not in b:
                    b[v.name] = n
    if missing:
        p = missing[0]
        return Literal(p.pred, tuple(_subst(a, b) for a in p.args), p.positive)
    for c in op.pre:
        if isinstance(c, Constraint):
            applied = Constraint(c.op, _subst(c.left, b), _subst(c.right, b))
            if eval_constraint(applied) is not Truth.SATISFIED:
                return applied
    return "no consistent binding of the preconditions"


def _inject(state: KnowledgeState, hyps: tuple[Assumption, ...]) -> KnowledgeState:
    return consistent_union(state, [h.content for h in hyps if isinstance(h.content, Literal)])


MAX_DECOMPOSITIONS = 256


def _derives(goals: tuple[Task, ...], steps, states: list[KnowledgeState],
             covers: list[list[Constraint]], domain: Domain, reached: list[int]) -> bool:
    """Whether ``steps`` is what decomposing ``goals`` produces.

    ``states[i]`` is the state just before step ``i`` with that step's assumptions
    added (``states[len(steps)]`` is the final state plus trailing assumptions);
    method preconditions are checked there, since decomposition does not change
    the state and compound-task assumptions travel with the next step.
    """
    n = len(steps)

    def rec(tasks: tuple[Task, ...], i: int, budget: int) -> bool:
        reached[0] = max(reached[0], i)
        if not tasks:
            return i == n
        t, rest = tasks[0], tasks[1:]
        if t.primitive:
            return i < n and t == steps[i].action and rec(rest, i + 1, budget)
        if budget == 0:
            return False
        for m in domain.methods_for(t.name):
            for b in _bindings(m, t.args, states[i], covers[i]):
                act = tuple(Task(x.name, tuple(_subst(a, b) for a in x.args)) for x in m.act)
                if rec(act + rest, i, budget - 1):
                    return True
        return False

    return rec(tuple(goals), 0, MAX_DECOMPOSITIONS)


def validate(conjecture: Conjecture, state: KnowledgeState, domain: Domain,
             goals: Sequence[Task] | None = None) -> ValidationReport:
    """Replay ``conjecture`` from ``state``; every step's preconditions must hold once
    its assumptions are added, with unmet comparisons covered by assumed ones.

    Variables that are not operator parameters may bind in more than one way and the
    choice changes what gets deleted, so all bindings are tried across steps. The
    reported failure is the one that got furthest.

    With ``goals``, the steps must also be a decomposition of those tasks.
    """
    steps = conjecture.steps
    n = len(steps)
    for i, step in enumerate(steps, start=1):
        if domain.operator(step.action.name) is None:
            raise PlanningError(f"step {i}: unknown operator {step.action.name}")
    covers = [[h.content for h in s.assumptions if isinstance(h.content, Constraint)] for s in steps]
    covers.append([h.content for h in conjecture.final if isinstance(h.content, Constraint)])
    best_fail: list = [None, []]  # (step, cause), trajectory
    dead: set[tuple[int, KnowledgeState]] = set()

    def fail(i: int, cause, traj) -> None:
        if best_fail[0] is None or i > best_fail[0][0]:
            best_fail[0] = (i, cause)
            best_fail[1] = traj if traj else [state]

    def finish(traj: list[KnowledgeState], injected: list[KnowledgeState]) -> list[KnowledgeState] | None:
        try:
            last = _inject(traj[-1], conjecture.final)
        except InconsistentStateError as exc:
            fail(n + 1, str(exc), traj)
            return None
        if goals is not None:
            reached = [0]
            if not _derives(tuple(goals), steps, injected + [last], covers, domain, reached):
                k = reached[0]
                cause = (f"step {k + 1} is not part of a decomposition of the goal tasks"
                         if k < n else "goal tasks not fully decomposed")
                fail(k + 1, cause, traj)
                return None
        return traj[:-1] + [last]

    def run(i: int, current: KnowledgeState, traj: list[KnowledgeState],
            injected: list[KnowledgeState]) -> list[KnowledgeState] | None:
        if i == n:
            return finish(traj, injected)
        if (i, current) in dead:
            return None
        step = steps[i]
        op = domain.operator(step.action.name)
        try:
            current = _inject(current, step.assumptions)
        except InconsistentStateError as exc:
            fail(i + 1, str(exc), traj)
            return None
        if i == 0:
            traj = [current]
        tried = False
        seen: set[KnowledgeState] = set()
        for b in _bindings(op, step.action.args, current, covers[i]):
            tried = True
            dels = [Literal(l.pred, tuple(_subst(a, b) for a in l.args), l.positive) for l in op.delete]
            adds = [Literal(l.pred, tuple(_subst(a, b) for a in l.args), l.positive) for l in op.add]
            nxt = current.without(dels).insert(adds)
            if nxt in seen:
                continue
            seen.add(nxt)
            out = run(i + 1, nxt, traj + [nxt], injected + [current])
            if out is not None:
                return out
        if not tried:
            fail(i + 1, _diagnose(op, step.action.args, current), traj)
        if goals is None:
            # with goals the outcome also depends on earlier states, so no memo
            dead.add((i, current))
        return None

    trajectory = run(0, state, [state], [])
    if trajectory is None:
        return ValidationReport(False, best_fail[1], best_fail[0])
    return ValidationReport(True, trajectory, None)
