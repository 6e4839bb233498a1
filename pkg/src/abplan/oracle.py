"""Slow reference procedures for cross-checking the planner.

``brute_force`` walks the whole raw unify-or-skip tree (no subsumption filtering,
no best-first order) and reports the exact least assumption count. ``plain_htn``
is a depth-first HTN decomposer that accepts an action only when every
precondition holds. Both refuse bounds above desk scale.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .assumptions import Assumption
from .domain import Domain, Operator, Problem, Task, parse_domain, parse_problem
from .logic import (
    Constraint, KnowledgeState, Literal, Substitution, Truth, Var, apply,
    eval_constraint, unify, variables,
)
from .search import (
    Conjecture, Edge, Step, bind_task, make_transition, standardize_apart,
)

__all__ = [
    "OracleResult", "OracleBoundError", "brute_force", "plain_htn", "raw_substitutions",
    "canonical", "random_instance", "random_suite", "SUITE_SEED",
    "MAX_DEPTH_BOUND", "MAX_WEIGHT_BOUND",
]

MAX_DEPTH_BOUND = 12
MAX_WEIGHT_BOUND = 6
SUITE_SEED = 20041115


class OracleBoundError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    min_weight: int | None
    witnesses: frozenset[Conjecture]
    explored: int


def _check(depth_bound: int, weight_bound: int = 0) -> None:
    if not 0 <= depth_bound <= MAX_DEPTH_BOUND:
        raise OracleBoundError(f"depth bound {depth_bound} outside 0..{MAX_DEPTH_BOUND}")
    if not 0 <= weight_bound <= MAX_WEIGHT_BOUND:
        raise OracleBoundError(f"weight bound {weight_bound} outside 0..{MAX_WEIGHT_BOUND}")


def raw_substitutions(pre: Sequence, state: KnowledgeState, sigma: Substitution,
                      rigid: frozenset[str]) -> list[Substitution]:
    """Substitutions from every combination of (fact or skip) per literal precondition."""
    lits = [p for p in pre if isinstance(p, Literal)]
    choices = [list(state.matching(p)) + [None] for p in lits]
    out: list[Substitution] = []
    seen: set[Substitution] = set()
    for combo in itertools.product(*choices):
        s: Substitution | None = sigma
        for p, fact in zip(lits, combo):
            if fact is not None:
                s = unify(p, fact, s, rigid)
                if s is None:
                    break
        if s is not None and s not in seen:
            seen.add(s)
            out.append(s)
    return out


def canonical(conj: Conjecture) -> Conjecture:
    """Rename variables to ``?v1, ?v2, ...`` in order of first appearance."""
    names: dict[str, Var] = {}

    def visit(x) -> None:
        for v in x.iter_vars():
            if v not in names:
                names[v] = Var(f"?v{len(names) + 1}")

    for s in conj.steps:
        for h in s.assumptions:
            visit(h)
        visit(s.action)
    for h in conj.final:
        visit(h)
    if not names:
        return conj
    steps = tuple(Step(tuple(h.substitute(names) for h in s.assumptions), s.action.substitute(names))
                  for s in conj.steps)
    return Conjecture(steps, tuple(h.substitute(names) for h in conj.final))


def _conjecture_of(path: list[Edge]) -> Conjecture:
    steps: list[Step] = []
    carry: tuple[Assumption, ...] = ()
    for e in path:
        if e.kind == "compound":
            carry += e.assumptions
        else:
            steps.append(Step(carry + e.assumptions, e.action))
            carry = ()
    return Conjecture(tuple(steps), carry)


def brute_force(state: KnowledgeState, domain: Domain, goals: Sequence[Task],
                depth_bound: int, weight_bound: int) -> OracleResult:
    _check(depth_bound, weight_bound)
    best: list[int | None] = [None]
    witnesses: set[Conjecture] = set()
    explored = 0

    def dfs(st: KnowledgeState, remaining: tuple[Task, ...], weight: int, depth: int,
            path: list[Edge]) -> None:
        nonlocal explored
        explored += 1
        if not remaining:
            if best[0] is None or weight < best[0]:
                best[0] = weight
                witnesses.clear()
            if weight == best[0]:
                witnesses.add(canonical(_conjecture_of(path)))
            return
        if depth >= depth_bound:
            return
        task, rest = remaining[0], remaining[1:]
        avoid = st.variables() | variables(remaining)
        for schema in domain.schemas_for(task):
            schema = standardize_apart(schema, avoid)
            sigma0 = bind_task(schema, task, avoid)
            if sigma0 is None:
                continue
            for sigma in raw_substitutions(schema.pre, st, sigma0, avoid):
                t = make_transition(domain, schema, st, rest, sigma, avoid)
                if t is None:
                    continue
                w = weight + len(t.edge.assumptions)
                if w > weight_bound or (best[0] is not None and w > best[0]):
                    continue
                dfs(t.state, t.remaining, w, depth + 1, path + [t.edge])

    dfs(state, tuple(goals), 0, 0, [])
    return OracleResult(best[0], frozenset(witnesses), explored)


def _full_matches(pre: Sequence, state: KnowledgeState, sigma: Substitution, rigid):
    lits = [p for p in pre if isinstance(p, Literal)]

    def rec(i: int, s: Substitution):
        if i == len(lits):
            yield s
            return
        for fact in state.matching(lits[i]):
            t = unify(lits[i], fact, s, rigid)
            if t is not None:
                yield from rec(i + 1, t)

    for s in rec(0, sigma):
        if all(eval_constraint(apply(c, s)) is Truth.SATISFIED
               for c in pre if isinstance(c, Constraint)):
            yield s


def plain_htn(state: KnowledgeState, domain: Domain, goals: Sequence[Task],
              depth_bound: int) -> tuple[Task, ...] | None:
    """First plan found depth-first with every precondition satisfied, or ``None``."""
    _check(depth_bound)

    def dfs(st: KnowledgeState, remaining: tuple[Task, ...], depth: int):
        if not remaining:
            return ()
        if depth >= depth_bound:
            return None
        task, rest = remaining[0], remaining[1:]
        avoid = st.variables() | variables(remaining)
        for schema in domain.schemas_for(task):
            schema = standardize_apart(schema, avoid)
            sigma0 = bind_task(schema, task, avoid)
            if sigma0 is None:
                continue
            for s in _full_matches(schema.pre, st, sigma0, avoid):
                if isinstance(schema, Operator):
                    nxt = st.without(apply(schema.delete, s)).insert(apply(schema.add, s))
                    sub = dfs(nxt, rest, depth + 1)
                    if sub is not None:
                        return (Task(schema.name, tuple(apply(list(schema.params), s))),) + sub
                else:
                    sub = dfs(st, tuple(apply(schema.act, s)) + rest, depth + 1)
                    if sub is not None:
                        return sub
        return None

    return dfs(state, tuple(goals), 0)


# ------------------------------------------------------------ random instances

_PREDS = (("p", 1), ("q", 2), ("r", 1), ("s", 0))
_CONSTS = ("a", "b", "c")


def _atom(pred: str, args: Sequence[str], positive: bool = True) -> str:
    a = "(" + " ".join([pred, *args]) + ")"
    return a if positive else f"(not {a})"


def random_instance(seed: int) -> tuple[Domain, Problem]:
    """A small random domain/problem pair (at most 3 operators, 2 methods, 6 facts,
    4 preconditions per schema), reproducible from ``seed``."""
    rng = random.Random(seed)
    numeric = rng.random() < 0.4
    preds = list(_PREDS) + ([("f", 2)] if numeric else [])

    def args_for(arity: int, pool: list[str]) -> list[str]:
        return [rng.choice(pool) for _ in range(arity)]

    def pre_list(pool: list[str], n: int) -> tuple[list[str], list[tuple[str, list[str]]], set[str]]:
        lits: list[str] = []
        pos: list[tuple[str, list[str]]] = []
        polarity: dict[str, bool] = {}
        used: set[str] = set()
        for _ in range(n):
            pred, ar = rng.choice(preds)
            positive = rng.random() > 0.2
            if polarity.setdefault(pred, positive) != positive:
                continue
            if pred == "f":
                args = [rng.choice(pool), rng.choice(["?n", "?m"])]
            else:
                args = args_for(ar, pool)
            lits.append(_atom(pred, args, positive))
            used.update(a for a in args if a.startswith("?"))
            if positive:
                pos.append((pred, args))
        return lits, pos, used

    n_ops = rng.randint(1, 3)
    n_meths = rng.randint(0, 2)
    op_arity = [rng.randint(1, 2) for _ in range(n_ops)]
    meth_names = ["m0"] * n_meths if n_meths == 2 and rng.random() < 0.5 else [f"m{i}" for i in range(n_meths)]
    lines = ["(defdomain rnd"]
    for k in range(n_ops):
        params = ["?x", "?y"][: op_arity[k]]
        pool = params + ["?z"] + list(_CONSTS[:2])
        lits, pos, used = pre_list(pool, rng.randint(0, 3))
        bound = set(params) | used
        cons = []
        if numeric and len(lits) < 4:
            nvars = sorted(v for v in used if v in ("?n", "?m"))
            if nvars and rng.random() < 0.7:
                cons.append(f"(>= {nvars[0]} {rng.choice([1, 5, 10])})")
        dels = [_atom(p, a) for p, a in pos if rng.random() < 0.5]
        bpool = sorted(v for v in bound if v not in ("?n", "?m")) + list(_CONSTS)
        adds = []
        for _ in range(rng.randint(1, 2)):
            pred, ar = rng.choice(preds)
            if pred == "f":
                nvars = sorted(v for v in bound if v in ("?n", "?m"))
                val = f"(- {nvars[0]} 5)" if nvars else str(rng.choice([0, 10]))
                adds.append(_atom("f", [rng.choice(bpool), val]))
            else:
                adds.append(_atom(pred, args_for(ar, bpool), rng.random() > 0.15))
        lines.append(f"  (:operator (!o{k} {' '.join(params)})")
        lines.append(f"    :pre ({' '.join(lits + cons)})")
        lines.append(f"    :del ({' '.join(dels)})")
        lines.append(f"    :add ({' '.join(adds)}))")
    tasks = [(f"!o{k}", op_arity[k]) for k in range(n_ops)] + [(m, 1) for m in dict.fromkeys(meth_names)]
    for name in meth_names:
        pool = ["?x", "?w"] + list(_CONSTS[:2])
        lits, _, used = pre_list(pool, rng.randint(0, 2))
        bound = sorted({"?x"} | used - {"?n", "?m"}) + list(_CONSTS)
        body = []
        for _ in range(rng.randint(1, 3)):
            tname, ar = rng.choice(tasks)
            if not tname.startswith("!") and rng.random() < 0.6:
                tname, ar = rng.choice(tasks[:n_ops])
            body.append("(" + " ".join([tname, *args_for(ar, bound)]) + ")")
        lines.append(f"  (:method ({name} ?x)")
        lines.append(f"    :pre ({' '.join(lits)})")
        lines.append(f"    :act ({' '.join(body)}))")
    hyp = [p for p, _ in preds if rng.random() < 0.5] + ([">="] if numeric and rng.random() < 0.6 else [])
    text = "\n".join(lines)
    hyp = [h for h in hyp if f"({h} " in text or f"({h})" in text]
    if hyp:
        lines.append(f"  (:hypothetical {' '.join(hyp)})")
    lines[-1] += ")"
    domain = parse_domain("\n".join(lines))

    facts: dict[str, bool] = {}
    for _ in range(rng.randint(2, 6)):
        pred, ar = rng.choice(preds)
        if pred == "f":
            key = _atom("f", [rng.choice(_CONSTS), str(rng.choice([0, 5, 10]))])
            positive = True
        else:
            key = _atom(pred, args_for(ar, list(_CONSTS)))
            positive = rng.random() > 0.2
        facts.setdefault(key, positive)
    init = [k if v else f"(not {k})" for k, v in facts.items()]
    goals = []
    for _ in range(rng.randint(1, 2)):
        tname, ar = rng.choice(tasks)
        goals.append("(" + " ".join([tname, *args_for(ar, list(_CONSTS))]) + ")")
    problem = parse_problem(
        f"(defproblem rnd{seed} rnd (:init ({' '.join(init)})) (:goal ({' '.join(goals)})))", domain)
    return domain, problem


def random_suite(n: int = 500, seed: int = SUITE_SEED) -> list[tuple[Domain, Problem]]:
    return [random_instance(seed * 1000 + i) for i in range(n)]
