from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path

import abplan
from abplan.domain import parse_atom, parse_condition, parse_domain, parse_problem, parse_task
from abplan.logic import KnowledgeState
from abplan.sexp import read_one

EXAMPLES = Path(abplan.__file__).parent / "examples"


def lit(text: str):
    return parse_condition(read_one(text))


def task(text: str):
    return parse_task(read_one(text))


def state(*texts: str) -> KnowledgeState:
    return KnowledgeState(parse_atom(read_one(t)) for t in texts)


@lru_cache(maxsize=None)
def domain(name: str):
    logging.getLogger("abplan.domain").setLevel(logging.ERROR)
    return parse_domain((EXAMPLES / f"{name}.abp").read_text())


@lru_cache(maxsize=None)
def problem(name: str, domain_name: str = "taxi"):
    return parse_problem((EXAMPLES / f"{name}.p").read_text(), domain(domain_name))


SEVEN_FACTS = ("(at cab38 downtown)", "(isloaded cab38)", "(hasfuel cab38 10)",
               "(at cab74 downtown)", "(not (isloaded cab74))", "(hasfuel cab74 5)",
               "(at cab73 downtown)")


# ----------------------------------------------------------- unification oracle
# Textbook equation-rewriting unifier, used only to cross-check abplan.logic.unify.

import itertools
import random

from abplan.logic import Arith, Const, Literal, Var, apply


def ref_unify(pairs):
    eqs = list(pairs)
    sol: dict = {}
    while eqs:
        a, b = eqs.pop()
        a, b = apply(a, sol), apply(b, sol)
        if a == b:
            continue
        if not isinstance(a, Var) and isinstance(b, Var):
            a, b = b, a
        if isinstance(a, Var):
            if a.name in {v for v in b.iter_vars()}:
                return None
            sol = {k: apply(v, {a.name: b}) for k, v in sol.items()}
            sol[a.name] = b
        elif isinstance(a, Arith) and isinstance(b, Arith) and a.op == b.op:
            eqs += [(a.left, b.left), (a.right, b.right)]
        else:
            return None
    return sol


def is_instance(general: dict, specific: dict, names) -> bool:
    """True iff some lambda makes apply(x, general) then lambda equal apply(x, specific) for x in names."""
    lam: dict = {}

    def match(p, t) -> bool:
        if isinstance(p, Var):
            if p.name in lam:
                return lam[p.name] == t
            lam[p.name] = t
            return True
        if isinstance(p, Arith):
            return isinstance(t, Arith) and p.op == t.op and match(p.left, t.left) and match(p.right, t.right)
        return p == t

    return all(match(apply(Var(n), general), apply(Var(n), specific)) for n in sorted(names))


VARS = ("?x", "?y", "?z")
CONSTS = ("a", "b")


def random_term(rng: random.Random, depth: int = 1):
    r = rng.random()
    if depth > 0 and r < 0.15:
        return Arith("+", random_term(rng, depth - 1), random_term(rng, depth - 1))
    if r < 0.6:
        return Var(rng.choice(VARS))
    return Const(rng.choice(CONSTS))


def random_pair(rng: random.Random):
    n = rng.randint(0, 3)
    return (Literal("p", tuple(random_term(rng) for _ in range(n))),
            Literal("p", tuple(random_term(rng) for _ in range(n))))


def check_mgu(p, e, result) -> str | None:
    """Return a description of what is wrong with ``result = unify(p, e)``, or None."""
    names = {*p.iter_vars(), *e.iter_vars()}
    ref = ref_unify(list(zip(p.args, e.args)))
    if (result is None) != (ref is None):
        return f"unify={result} reference={ref}"
    if result is None:
        return None
    if apply(p, result) != apply(e, result):
        return "not a unifier"
    if not result.is_idempotent():
        return "not idempotent"
    if not (is_instance(dict(result), ref, names) and is_instance(ref, dict(result), names)):
        return f"not equivalent to reference {ref}"
    # every constant-ground unifier is an instance of the result
    for values in itertools.product(CONSTS + ("c",), repeat=len(names)):
        g = dict(zip(sorted(names), map(Const, values)))
        if apply(p, g) == apply(e, g) and not is_instance(dict(result), g, names):
            return f"ground unifier {g} not an instance"
    return None


# ------------------------------------------------------------------ mutations

from dataclasses import replace

from abplan.domain import Task
from abplan.search import Conjecture, Step


def constants_of(problem) -> list[Const]:
    out = {a for f in problem.init for a in f.args if isinstance(a, Const)}
    out |= {a for t in problem.goals for a in t.args if isinstance(a, Const)}
    return sorted(out, key=lambda c: c.name)


def mutations(conj: Conjecture, consts: list[Const]):
    """Yield (label, mutant) pairs; mutants identical to ``conj`` are skipped."""
    steps = list(conj.steps)
    out = []
    for i, s in enumerate(steps):
        for j in range(len(s.assumptions)):
            hyps = s.assumptions[:j] + s.assumptions[j + 1:]
            out.append(("drop-assumption", steps[:i] + [Step(hyps, s.action)] + steps[i + 1:]))
        out.append(("drop-step", steps[:i] + steps[i + 1:]))
        if i + 1 < len(steps):
            out.append(("swap", steps[:i] + [steps[i + 1], s] + steps[i + 2:]))
        for k, a in enumerate(s.action.args):
            if isinstance(a, Const):
                for c in consts:
                    if c != a:
                        args = s.action.args[:k] + (c,) + s.action.args[k + 1:]
                        out.append(("retarget", steps[:i] + [Step(s.assumptions, Task(s.action.name, args))]
                                    + steps[i + 1:]))
                        break
    for j in range(len(conj.final)):
        out.append(("drop-final", None, j))
    for label, new_steps, *rest in out:
        if label == "drop-final":
            m = Conjecture(conj.steps, conj.final[:rest[0]] + conj.final[rest[0] + 1:])
        else:
            m = Conjecture(tuple(new_steps), conj.final)
        if m != conj:
            yield label, m
