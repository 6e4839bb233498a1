"""Substitution search over a knowledge state and assumption generation.

An action whose preconditions do not all hold is still applied: each precondition
instance missing from the state becomes an :class:`Assumption`. Three kinds are
distinguished. A *hypothesis* is a literal the state says nothing about. A *fact
negation* contradicts a fact the state holds. A *constraint violation* is a
numeric comparison that fails or cannot be decided yet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .logic import (
    EMPTY, Constraint, KnowledgeState, Literal, Num, Substitution, Truth, Var,
    apply, eval_constraint, unify, variables,
)

__all__ = [
    "Kind", "Assumption", "find_substitutions", "match_branches", "generate_assumptions",
    "classify", "is_legal", "instantiate_from_constraints",
]


class Kind(enum.Enum):
    HYPOTHESIS = "hypothesis"
    FACT_NEGATION = "fact-negation"
    CONSTRAINT_VIOLATION = "constraint-violation"


@dataclass(frozen=True)
class Assumption:
    content: Literal | Constraint
    # the kind is a function of content and the generating state, so it is not
    # part of identity (serialised forms without kinds compare equal)
    kind: Kind = field(default=Kind.HYPOTHESIS, compare=False)

    def __str__(self) -> str:
        return str(self.content)

    def substitute(self, m) -> "Assumption":
        return Assumption(self.content.substitute(m), self.kind)

    def iter_vars(self):
        return self.content.iter_vars()


def _rigid(state: KnowledgeState, sigma: Substitution) -> frozenset[str]:
    # variables already living in the state, or handed in through sigma's range,
    # stand for unknown individuals; matching must not instantiate them
    return state.variables() | variables(tuple(sigma.values()))


def match_branches(pre: Sequence, state: KnowledgeState, sigma: Substitution = EMPTY,
                   rigid: frozenset[str] | None = None
                   ) -> Iterator[tuple[Substitution, frozenset[tuple[int, Literal]]]]:
    """Every unify-or-skip choice sequence over the literal preconditions.

    Yields ``(substitution, matched)`` where ``matched`` records which precondition
    (by index) was unified with which fact. Order: at each precondition the facts
    are tried in state order, the skip branch last.
    """
    if rigid is None:
        rigid = _rigid(state, sigma)
    lits = [(i, p) for i, p in enumerate(pre) if isinstance(p, Literal)]

    def rec(k: int, s: Substitution, matched: frozenset) -> Iterator:
        if k == len(lits):
            yield s, matched
            return
        i, p = lits[k]
        for fact in state.matching(p):
            theta = unify(p, fact, s, rigid)
            if theta is not None:
                yield from rec(k + 1, theta, matched | {(i, fact)})
        yield from rec(k + 1, s, matched)

    yield from rec(0, sigma, frozenset())


def find_substitutions(pre: Sequence, state: KnowledgeState,
                       sigma: Substitution = EMPTY) -> list[Substitution]:
    """All maximal substitutions making preconditions match facts of ``state``.

    A branch is dropped when another branch matched a strict superset of its
    (precondition, fact) pairs; the survivors are deduplicated, first seen first.
    With no preconditions the result is ``[sigma]``.
    """
    branches = list(match_branches(pre, state, sigma))
    keep: list[Substitution] = []
    seen: set[Substitution] = set()
    for s, m in branches:
        if any(m < other for _, other in branches):
            continue
        if s not in seen:
            seen.add(s)
            keep.append(s)
    return keep


def classify(p: Literal | Constraint, state: KnowledgeState) -> Kind:
    if isinstance(p, Constraint):
        return Kind.CONSTRAINT_VIOLATION
    if p.negate() in state:
        return Kind.FACT_NEGATION
    return Kind.HYPOTHESIS


def generate_assumptions(action, sigma: Substitution, state: KnowledgeState) -> tuple[Assumption, ...]:
    """Precondition instances of ``action`` under ``sigma`` that ``state`` does not entail.

    ``action`` is an operator/method (anything with ``pre``) or a bare precondition
    sequence. Output follows precondition order, without duplicates.
    """
    pre = action.pre if hasattr(action, "pre") else action
    out: list[Assumption] = []
    seen: set = set()
    for p in pre:
        q = apply(p, sigma)
        if isinstance(q, Constraint):
            if eval_constraint(q) is Truth.SATISFIED:
                continue
        elif q in state:
            continue
        if q not in seen:
            seen.add(q)
            out.append(Assumption(q, classify(q, state)))
    return tuple(out)


def is_legal(h: Assumption, domain) -> bool:
    c = h.content
    key = c.op if isinstance(c, Constraint) else c.pred
    return key in domain.hypothetical


_BOUNDARY = {">=": "lower", "<=": "upper", "=": "exact"}


def instantiate_from_constraints(pre: Sequence, sigma: Substitution, state: KnowledgeState,
                                 rigid: frozenset[str] | None = None) -> Substitution:
    """Pick values for hypothesised unknowns from the comparisons that bound them.

    A variable qualifies when it is still free under ``sigma``, is not an existing
    unknown (``rigid`` or in the state), appears in a literal precondition that would
    become a hypothesis, and is compared with ``>=``, ``<=`` or ``=`` against a number.
    It is bound to that number, the least committal value that satisfies the
    comparison. Comparisons are processed in precondition order.
    """
    if rigid is None:
        rigid = _rigid(state, sigma)
    hypothesised: set[str] = set()
    for p in pre:
        if isinstance(p, Literal):
            q = apply(p, sigma)
            if q not in state:
                hypothesised.update(q.iter_vars())
    if not hypothesised:
        return sigma
    out = sigma
    for p in pre:
        if not isinstance(p, Constraint) or p.op not in _BOUNDARY:
            continue
        c = apply(p, out)
        if eval_constraint(c) is not Truth.UNDETERMINED:
            continue
        for var_side, num_side in ((c.left, c.right), (c.right, c.left)):
            if (isinstance(var_side, Var) and isinstance(num_side, Num)
                    and var_side.name in hypothesised and var_side.name not in rigid
                    and var_side.name not in out):
                out = out.compose({var_side.name: num_side})
                break
    return out
