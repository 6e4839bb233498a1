"""First-order terms, literals, constraints, substitutions and knowledge states.

Everything here is immutable. Numbers are exact rationals (:class:`fractions.Fraction`)
so that ``10`` and ``10.00`` denote the same value and comparisons never drift.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Var", "Const", "Num", "Arith", "Term", "Literal", "Constraint", "Expr",
    "Substitution", "EMPTY", "KnowledgeState", "InconsistentStateError", "Truth",
    "unify", "apply", "fold", "eval_constraint", "consistent_union",
    "variables", "format_number", "COMPARISONS", "ARITH_OPS",
]

ARITH_OPS = ("+", "-", "*", "/")
COMPARISONS = ("<", "<=", "=", ">=", ">", "!=")


def format_number(value: Fraction) -> str:
    """Render a rational as an integer, a terminating decimal, or ``p/q``."""
    if value.denominator == 1:
        return str(value.numerator)
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{value.numerator}/{value.denominator}"
    k = 1
    while (value * 10**k).denominator != 1:
        k += 1
    scaled = abs(value.numerator * 10**k // value.denominator)
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if value < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


# --------------------------------------------------------------------------- terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str  # includes the leading "?"

    def __str__(self) -> str:
        return self.name

    def substitute(self, m: Mapping[str, "Term"]) -> "Term":
        return m.get(self.name, self)

    def iter_vars(self) -> Iterator[str]:
        yield self.name


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name

    def substitute(self, m: Mapping[str, "Term"]) -> "Term":
        return self

    def iter_vars(self) -> Iterator[str]:
        return iter(())


@dataclass(frozen=True, slots=True)
class Num:
    value: Fraction

    def __init__(self, value) -> None:
        object.__setattr__(self, "value", Fraction(value))

    def __str__(self) -> str:
        return format_number(self.value)

    def substitute(self, m: Mapping[str, "Term"]) -> "Term":
        return self

    def iter_vars(self) -> Iterator[str]:
        return iter(())


@dataclass(frozen=True, slots=True)
class Arith:
    op: str
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return f"({self.op} {self.left} {self.right})"

    def substitute(self, m: Mapping[str, "Term"]) -> "Term":
        return fold(Arith(self.op, self.left.substitute(m), self.right.substitute(m)))

    def iter_vars(self) -> Iterator[str]:
        yield from self.left.iter_vars()
        yield from self.right.iter_vars()


Term = Union[Var, Const, Num, Arith]


def fold(term: Term) -> Term:
    """Evaluate ground arithmetic bottom-up. Division by zero is left unfolded."""
    if not isinstance(term, Arith):
        return term
    left, right = fold(term.left), fold(term.right)
    if isinstance(left, Num) and isinstance(right, Num):
        a, b = left.value, right.value
        if term.op == "+":
            return Num(a + b)
        if term.op == "-":
            return Num(a - b)
        if term.op == "*":
            return Num(a * b)
        if b != 0:
            return Num(a / b)
    if left is term.left and right is term.right:
        return term
    return Arith(term.op, left, right)


# ------------------------------------------------------------------ literals etc.


@dataclass(frozen=True, slots=True)
class Literal:
    pred: str
    args: tuple[Term, ...] = ()
    positive: bool = True

    def __str__(self) -> str:
        atom = "(" + " ".join([self.pred, *map(str, self.args)]) + ")"
        return atom if self.positive else f"(not {atom})"

    def negate(self) -> "Literal":
        return Literal(self.pred, self.args, not self.positive)

    @property
    def arity(self) -> int:
        return len(self.args)

    def substitute(self, m: Mapping[str, Term]) -> "Literal":
        if not m:
            return self.folded()
        return Literal(self.pred, tuple(a.substitute(m) for a in self.args), self.positive)

    def folded(self) -> "Literal":
        args = tuple(fold(a) for a in self.args)
        if all(x is y for x, y in zip(args, self.args)):
            return self
        return Literal(self.pred, args, self.positive)

    def iter_vars(self) -> Iterator[str]:
        for a in self.args:
            yield from a.iter_vars()


@dataclass(frozen=True, slots=True)
class Constraint:
    op: str
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"({self.op} {self.left} {self.right})"

    def substitute(self, m: Mapping[str, Term]) -> "Constraint":
        return Constraint(self.op, fold(self.left.substitute(m)), fold(self.right.substitute(m)))

    def iter_vars(self) -> Iterator[str]:
        yield from self.left.iter_vars()
        yield from self.right.iter_vars()


Expr = Union[Term, Literal, Constraint]


def variables(expr) -> frozenset[str]:
    """Names of all variables occurring in an expression or a collection of them."""
    if isinstance(expr, (list, tuple, set, frozenset)):
        out: set[str] = set()
        for e in expr:
            out.update(variables(e))
        return frozenset(out)
    if isinstance(expr, KnowledgeState):
        return expr.variables()
    return frozenset(expr.iter_vars())


def apply(expr, sigma: Mapping[str, Term]):
    """Simultaneously replace every bound variable of ``expr``; ground arithmetic folds.

    Works on terms, literals, constraints, anything else exposing ``substitute``,
    and on lists/tuples of those (shape preserved).
    """
    if isinstance(expr, (list, tuple)):
        return type(expr)(apply(e, sigma) for e in expr)
    if isinstance(sigma, Substitution):
        sigma = sigma._map
    return expr.substitute(sigma)


# ------------------------------------------------------------------ substitutions


class Substitution(Mapping[str, Term]):
    """A finite, acyclic map from variable names to terms.

    Identity bindings are dropped on construction; a binding graph that would make
    repeated application diverge raises :class:`ValueError`.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Mapping[str, Term] | Iterable[tuple[str, Term]] = ()) -> None:
        m = dict(bindings)
        m = {k: v for k, v in m.items() if not (isinstance(v, Var) and v.name == k)}
        _check_acyclic(m)
        self._map = m
        self._hash: int | None = None

    @classmethod
    def _trusted(cls, m: dict[str, Term]) -> "Substitution":
        s = cls.__new__(cls)
        s._map = m
        s._hash = None
        return s

    def __getitem__(self, key: str) -> Term:
        return self._map[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}->{v}" for k, v in sorted(self._map.items()))
        return "{" + inner + "}"

    def apply(self, expr):
        return apply(expr, self._map)

    def compose(self, theta: Mapping[str, Term]) -> "Substitution":
        """``self`` followed by ``theta``: theta applied to our range, plus theta's new keys."""
        theta_map = theta._map if isinstance(theta, Substitution) else dict(theta)
        out = {x: t.substitute(theta_map) for x, t in self._map.items()}
        for y, s in theta_map.items():
            out.setdefault(y, s)
        return Substitution(out)

    def restrict(self, names: Iterable[str]) -> "Substitution":
        keep = set(names)
        return Substitution._trusted({k: v for k, v in self._map.items() if k in keep})

    def is_idempotent(self) -> bool:
        dom = set(self._map)
        return not any(dom.intersection(t.iter_vars()) for t in self._map.values())


def _check_acyclic(m: Mapping[str, Term]) -> None:
    state: dict[str, int] = {}

    def visit(v: str) -> None:
        mark = state.get(v)
        if mark == 2:
            return
        if mark == 1:
            raise ValueError(f"cyclic substitution through {v}")
        state[v] = 1
        for w in m[v].iter_vars():
            if w in m:
                visit(w)
        state[v] = 2

    for v in m:
        visit(v)


EMPTY = Substitution()


# -------------------------------------------------------------------- unification


def _walk(t: Term, s: dict[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def _occurs(name: str, t: Term, s: dict[str, Term]) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Arith):
        return _occurs(name, t.left, s) or _occurs(name, t.right, s)
    return False


def _unify_terms(a: Term, b: Term, s: dict[str, Term], rigid: frozenset[str]) -> bool:
    a, b = _walk(a, s), _walk(b, s)
    if a == b:
        return True
    if isinstance(a, Var) and a.name not in rigid:
        if _occurs(a.name, b, s):
            return False
        s[a.name] = b
        return True
    if isinstance(b, Var) and b.name not in rigid:
        if _occurs(b.name, a, s):
            return False
        s[b.name] = a
        return True
    if isinstance(a, Arith) and isinstance(b, Arith) and a.op == b.op:
        return _unify_terms(a.left, b.left, s, rigid) and _unify_terms(a.right, b.right, s, rigid)
    return False


def _resolve(t: Term, s: dict[str, Term]) -> Term:
    t = _walk(t, s)
    if isinstance(t, Arith):
        return fold(Arith(t.op, _resolve(t.left, s), _resolve(t.right, s)))
    return t


def unify(p: Literal | Constraint, e: Literal | Constraint, sigma: Mapping[str, Term] = EMPTY,
          rigid: frozenset[str] = frozenset()) -> Substitution | None:
    """Most general unifier of ``p`` and ``e`` extending ``sigma``, or ``None``.

    ``sigma`` is expected to be idempotent; the result is too. Variables named in
    ``rigid`` behave like constants (they are never bound). Literals only unify with
    literals of the same polarity, predicate and arity; constraints only with
    constraints.
    """
    if isinstance(p, Literal) and isinstance(e, Literal):
        if p.pred != e.pred or p.positive != e.positive or len(p.args) != len(e.args):
            return None
        pairs = list(zip(p.args, e.args))
    elif isinstance(p, Constraint) and isinstance(e, Constraint):
        if p.op != e.op:
            return None
        pairs = [(p.left, e.left), (p.right, e.right)]
    else:
        return None
    base = sigma._map if isinstance(sigma, Substitution) else dict(sigma)
    s = dict(base)
    for a, b in pairs:
        if not _unify_terms(a, b, s, rigid):
            return None
    if len(s) == len(base) and all(s[k] is base[k] for k in base):
        return sigma if isinstance(sigma, Substitution) else Substitution(s)
    resolved = {k: _resolve(v, s) for k, v in s.items()}
    return Substitution._trusted({k: v for k, v in resolved.items()
                                  if not (isinstance(v, Var) and v.name == k)})


# -------------------------------------------------------------------- constraints


class Truth(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    UNDETERMINED = "undetermined"


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "!=": lambda a, b: a != b,
}


def eval_constraint(c: Constraint) -> Truth:
    left, right = fold(c.left), fold(c.right)
    if isinstance(left, Num) and isinstance(right, Num):
        return Truth.SATISFIED if _CMP[c.op](left.value, right.value) else Truth.VIOLATED
    if next(left.iter_vars(), None) is None and next(right.iter_vars(), None) is None:
        # ground but not numeric: division by zero or a symbol in a comparison
        return Truth.VIOLATED
    return Truth.UNDETERMINED


# ---------------------------------------------------------------- knowledge state


class InconsistentStateError(ValueError):
    pass


@lru_cache(maxsize=1 << 16)
def _sort_key(lit: Literal) -> str:
    return str(lit)


class KnowledgeState:
    """A consistent set of literals with deterministic (sorted) iteration order."""

    __slots__ = ("_facts", "_order", "_index", "_hash", "_vars")

    def __init__(self, facts: Iterable[Literal] = ()) -> None:
        fs = frozenset(f.folded() for f in facts)
        for f in fs:
            if not f.positive and f.negate() in fs:
                raise InconsistentStateError(f"state contains both {f.negate()} and {f}")
        self._init(fs)

    def _init(self, fs: frozenset[Literal]) -> None:
        self._facts = fs
        self._order: tuple[Literal, ...] | None = None
        self._index: dict[tuple[str, bool], tuple[Literal, ...]] | None = None
        self._hash: int | None = None
        self._vars: frozenset[str] | None = None

    @classmethod
    def _trusted(cls, fs: frozenset[Literal]) -> "KnowledgeState":
        s = cls.__new__(cls)
        s._init(fs)
        return s

    @property
    def facts(self) -> frozenset[Literal]:
        return self._facts

    def ordered(self) -> tuple[Literal, ...]:
        if self._order is None:
            self._order = tuple(sorted(self._facts, key=_sort_key))
        return self._order

    def matching(self, lit: Literal) -> tuple[Literal, ...]:
        """Facts with the same predicate and polarity as ``lit``, in state order."""
        if self._index is None:
            idx: dict[tuple[str, bool], list[Literal]] = {}
            for f in self.ordered():
                idx.setdefault((f.pred, f.positive), []).append(f)
            self._index = {k: tuple(v) for k, v in idx.items()}
        return self._index.get((lit.pred, lit.positive), ())

    def variables(self) -> frozenset[str]:
        if self._vars is None:
            self._vars = variables(tuple(self._facts))
        return self._vars

    def __contains__(self, lit: object) -> bool:
        return lit in self._facts

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.ordered())

    def __len__(self) -> int:
        return len(self._facts)

    def __eq__(self, other) -> bool:
        if isinstance(other, KnowledgeState):
            return self._facts == other._facts
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._facts)
        return self._hash

    def __repr__(self) -> str:
        return "KnowledgeState{" + ", ".join(map(str, self.ordered())) + "}"

    def is_consistent(self) -> bool:
        return not any(not f.positive and f.negate() in self._facts for f in self._facts)

    def without(self, lits: Iterable[Literal]) -> "KnowledgeState":
        drop = {l.folded() for l in lits}
        if not drop & self._facts:
            return self
        return KnowledgeState._trusted(self._facts - drop)

    def insert(self, lits: Iterable[Literal]) -> "KnowledgeState":
        """Add literals one at a time; each addition displaces its complement."""
        fs = set(self._facts)
        for lit in lits:
            lit = lit.folded()
            fs.discard(lit.negate())
            fs.add(lit)
        return KnowledgeState._trusted(frozenset(fs))


def consistent_union(state: KnowledgeState, hyps: Iterable[Literal]) -> KnowledgeState:
    """``(state - {not h : h in hyps}) | hyps``. ``hyps`` must be internally consistent."""
    hs = {h.folded() for h in hyps}
    for h in hs:
        if h.negate() in hs:
            raise InconsistentStateError(f"assumptions contain both {h} and {h.negate()}")
    if not hs:
        return state
    return KnowledgeState._trusted((state.facts - {h.negate() for h in hs}) | hs)
