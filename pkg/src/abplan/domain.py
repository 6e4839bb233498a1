"""Planning domains and problems: data model, parser and pretty-printer.

Domain files look like::

    (defdomain taxi
      (:operator (!load ?p ?t ?x)
        :pre ((at ?p ?x) (at ?t ?x))
        :del ((at ?p ?x))
        :add ((in ?p ?t)))
      (:method (move-passenger ?p ?x ?y)
        :pre ((at ?p ?x) (at ?t ?x))
        :act ((!load ?p ?t ?x) (!move ?t ?x ?y) (!unload ?p ?t ?y)))
      (:hypothetical hasfuel isloaded >=))

Primitive task names carry a ``!`` prefix; everything else is compound.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .logic import (
    ARITH_OPS, COMPARISONS, Arith, Const, Constraint, InconsistentStateError,
    KnowledgeState, Literal, Num, Term, Var, fold, variables,
)
from .sexp import Node, ParseError, SList, Sym, read_one

log = logging.getLogger(__name__)

__all__ = [
    "Task", "Operator", "Method", "Domain", "Problem", "Schema",
    "DomainError", "ParseError", "ArityError", "FreeVariableError",
    "DuplicateNameError", "UnknownTaskError",
    "parse_domain", "parse_problem", "format_domain", "format_problem",
    "parse_term", "parse_atom", "parse_condition", "parse_task",
]


class DomainError(ParseError):
    """Base class for every structured diagnostic raised while reading domains/problems."""


class ArityError(DomainError):
    pass


class FreeVariableError(DomainError):
    pass


class DuplicateNameError(DomainError):
    pass


class UnknownTaskError(DomainError):
    pass


# ---------------------------------------------------------------------- model


@dataclass(frozen=True)
class Task:
    name: str
    args: tuple[Term, ...] = ()

    @property
    def primitive(self) -> bool:
        return self.name.startswith("!")

    @property
    def kind(self) -> str:
        return "primitive" if self.primitive else "compound"

    def __str__(self) -> str:
        return "(" + " ".join([self.name, *map(str, self.args)]) + ")"

    def substitute(self, m) -> "Task":
        return Task(self.name, tuple(fold(a.substitute(m)) for a in self.args))

    def iter_vars(self):
        for a in self.args:
            yield from a.iter_vars()

    def as_literal(self) -> Literal:
        return Literal(self.name, self.args)


Condition = Union[Literal, Constraint]


@dataclass(frozen=True)
class Operator:
    name: str
    params: tuple[Var, ...]
    pre: tuple[Condition, ...] = ()
    delete: tuple[Literal, ...] = ()
    add: tuple[Literal, ...] = ()

    def head(self) -> Literal:
        return Literal(self.name, self.params)


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[Var, ...]
    pre: tuple[Condition, ...] = ()
    act: tuple[Task, ...] = ()

    def head(self) -> Literal:
        return Literal(self.name, self.params)


Schema = Union[Operator, Method]


@dataclass(frozen=True)
class Domain:
    name: str
    operators: tuple[Operator, ...] = ()
    methods: tuple[Method, ...] = ()
    hypothetical: frozenset[str] = frozenset()
    _ops: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _meths: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_ops", {o.name: o for o in self.operators})
        by_name: dict[str, list[Method]] = {}
        for m in self.methods:
            by_name.setdefault(m.name, []).append(m)
        object.__setattr__(self, "_meths", {k: tuple(v) for k, v in by_name.items()})

    def operator(self, name: str) -> Operator | None:
        return self._ops.get(name)

    def methods_for(self, name: str) -> tuple[Method, ...]:
        return self._meths.get(name, ())

    def schemas_for(self, task: Task) -> tuple[Schema, ...]:
        """Every operator/method that can realise ``task`` (methods in file order)."""
        if task.primitive:
            op = self._ops.get(task.name)
            return (op,) if op else ()
        return self._meths.get(task.name, ())

    def knows(self, name: str) -> bool:
        return name in self._ops or name in self._meths

    def task_arity(self, name: str) -> int | None:
        if name in self._ops:
            return len(self._ops[name].params)
        if name in self._meths:
            return len(self._meths[name][0].params)
        return None


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    init: KnowledgeState
    goals: tuple[Task, ...] = ()


# ---------------------------------------------------------------- term syntax

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")
_KEYWORD_HEADS = {"not", *COMPARISONS}


def _err(cls, msg: str, node: Node) -> DomainError:
    return cls(msg, node.line or None, node.column or None)


def _sym(node: Node, what: str) -> str:
    if not isinstance(node, Sym):
        raise _err(DomainError, f"expected {what}, found a list", node)
    return node.text


def _name(node: Node, what: str) -> str:
    text = _sym(node, what)
    if text.startswith(("?", ":")) or _NUMBER.match(text):
        raise _err(DomainError, f"invalid {what} {text!r}", node)
    return text


def parse_term(node: Node) -> Term:
    if isinstance(node, Sym):
        t = node.text
        if t.startswith("?"):
            if len(t) == 1:
                raise _err(DomainError, "empty variable name", node)
            return Var(t)
        if _NUMBER.match(t):
            try:
                return Num(Fraction(t))
            except (ValueError, ZeroDivisionError):
                raise _err(DomainError, f"invalid number {t!r}", node) from None
        if t.startswith(":"):
            raise _err(DomainError, f"unexpected keyword {t!r}", node)
        return Const(t)
    if len(node) == 3 and isinstance(node[0], Sym) and node[0].text in ARITH_OPS:
        return fold(Arith(node[0].text, parse_term(node[1]), parse_term(node[2])))
    raise _err(DomainError, "expected a term", node)


def parse_atom(node: Node) -> Literal:
    if not isinstance(node, SList) or not node.items:
        raise _err(DomainError, "expected an atom", node)
    head = node[0]
    if isinstance(head, Sym) and head.text == "not":
        if len(node) != 2:
            raise _err(DomainError, "'not' takes exactly one atom", node)
        inner = parse_atom(node[1])
        if not inner.positive:
            raise _err(DomainError, "double negation", node)
        return inner.negate()
    pred = _name(head, "predicate")
    if pred in _KEYWORD_HEADS:
        raise _err(DomainError, f"{pred!r} cannot be used as a predicate here", head)
    return Literal(pred, tuple(parse_term(a) for a in node.items[1:]))


def parse_condition(node: Node) -> Condition:
    if (isinstance(node, SList) and node.items and isinstance(node[0], Sym)
            and node[0].text in COMPARISONS):
        if len(node) != 3:
            raise _err(DomainError, f"comparison {node[0].text!r} takes two terms", node)
        return Constraint(node[0].text, parse_term(node[1]), parse_term(node[2]))
    return parse_atom(node)


def parse_task(node: Node) -> Task:
    if not isinstance(node, SList) or not node.items:
        raise _err(DomainError, "expected a task", node)
    name = _name(node[0], "task name")
    return Task(name, tuple(parse_term(a) for a in node.items[1:]))


def _list(node: Node, what: str) -> SList:
    if not isinstance(node, SList):
        raise _err(DomainError, f"expected a list of {what}", node)
    return node


def _keyword_sections(node: SList, start: int, allowed: tuple[str, ...]) -> dict[str, SList]:
    out: dict[str, SList] = {}
    items = node.items[start:]
    if len(items) % 2:
        raise _err(DomainError, "expected ':keyword (...)' pairs", items[-1])
    for key, value in zip(items[::2], items[1::2]):
        k = _sym(key, "keyword")
        if k not in allowed:
            raise _err(DomainError, f"unknown section {k!r} (expected one of {', '.join(allowed)})", key)
        if k in out:
            raise _err(DuplicateNameError, f"section {k} given twice", key)
        out[k] = _list(value, k)
    return out


def _head(node: Node, what: str) -> tuple[str, tuple[Var, ...]]:
    if not isinstance(node, SList) or not node.items:
        raise _err(DomainError, f"expected ({what} ?param ...)", node)
    name = _name(node[0], f"{what} name")
    params: list[Var] = []
    for p in node.items[1:]:
        t = _sym(p, "parameter")
        if not t.startswith("?") or len(t) == 1:
            raise _err(DomainError, f"parameter {t!r} must be a variable", p)
        if any(v.name == t for v in params):
            raise _err(DuplicateNameError, f"duplicate parameter {t}", p)
        params.append(Var(t))
    return name, tuple(params)


# ------------------------------------------------------------------- domains


def _parse_operator(node: SList) -> Operator:
    if len(node) < 2:
        raise _err(DomainError, ":operator needs a head", node)
    name, params = _head(node[1], "operator")
    if not name.startswith("!"):
        raise _err(DomainError, f"operator name {name!r} must start with '!'", node[1])
    sec = _keyword_sections(node, 2, (":pre", ":del", ":add"))
    pre = tuple(parse_condition(x) for x in sec.get(":pre", ()))
    dels = tuple(parse_atom(x) for x in sec.get(":del", ()))
    adds = tuple(parse_atom(x) for x in sec.get(":add", ()))
    bound = {p.name for p in params} | variables(pre)
    for eff_node, eff in zip([*sec.get(":del", ()), *sec.get(":add", ())], [*dels, *adds]):
        free = sorted(set(eff.iter_vars()) - bound)
        if free:
            raise _err(FreeVariableError, f"free effect variable {free[0]}", eff_node)
    return Operator(name, params, pre, dels, adds)


def _parse_method(node: SList) -> Method:
    if len(node) < 2:
        raise _err(DomainError, ":method needs a head", node)
    name, params = _head(node[1], "method")
    if name.startswith("!"):
        raise _err(DomainError, f"method name {name!r} must not start with '!'", node[1])
    sec = _keyword_sections(node, 2, (":pre", ":act"))
    pre = tuple(parse_condition(x) for x in sec.get(":pre", ()))
    act_nodes = sec.get(":act", ())
    act = tuple(parse_task(x) for x in act_nodes)
    bound = {p.name for p in params} | variables(pre)
    for tn, t in zip(act_nodes, act):
        free = sorted(set(t.iter_vars()) - bound)
        if free:
            raise _err(FreeVariableError, f"free task variable {free[0]}", tn)
    return Method(name, params, pre, act)


def _check_arities(literals: Iterable[tuple[Literal, Node | None]], known: dict[str, int]) -> None:
    for lit, node in literals:
        seen = known.setdefault(lit.pred, lit.arity)
        if seen != lit.arity:
            msg = f"predicate {lit.pred!r} used with arity {lit.arity}, elsewhere {seen}"
            if node is None:
                raise ArityError(msg)
            raise _err(ArityError, msg, node)


def _predicate_arities(domain: Domain) -> dict[str, int]:
    known: dict[str, int] = {}
    lits = []
    for op in domain.operators:
        lits += [c for c in op.pre if isinstance(c, Literal)] + list(op.delete) + list(op.add)
    for m in domain.methods:
        lits += [c for c in m.pre if isinstance(c, Literal)]
    _check_arities(((l, None) for l in lits), known)
    return known


def parse_domain(text: str) -> Domain:
    """Parse and validate a domain description."""
    root = read_one(text)
    if not isinstance(root, SList) or not root.items or _sym(root[0], "defdomain") != "defdomain":
        raise _err(DomainError, "expected (defdomain <name> ...)", root)
    if len(root) < 2:
        raise _err(DomainError, "defdomain needs a name", root)
    dname = _name(root[1], "domain name")
    ops: list[Operator] = []
    meths: list[Method] = []
    hyp: list[str] = []
    nodes: dict[int, SList] = {}
    for item in root.items[2:]:
        if not isinstance(item, SList) or not item.items or not isinstance(item[0], Sym):
            raise _err(DomainError, "expected (:operator ...), (:method ...) or (:hypothetical ...)", item)
        kind = item[0].text
        if kind == ":operator":
            op = _parse_operator(item)
            if any(o.name == op.name for o in ops):
                raise _err(DuplicateNameError, f"duplicate operator {op.name}", item[1])
            nodes[id(op)] = item
            ops.append(op)
        elif kind == ":method":
            m = _parse_method(item)
            nodes[id(m)] = item
            meths.append(m)
        elif kind == ":hypothetical":
            for h in item.items[1:]:
                t = _sym(h, "predicate or comparison")
                if t in hyp:
                    raise _err(DuplicateNameError, f"{t} declared hypothetical twice", h)
                hyp.append(t)
        else:
            raise _err(DomainError, f"unknown domain item {kind!r}", item[0])

    # method/operator name clashes and consistent method arity
    op_names = {o.name for o in ops}
    marity: dict[str, int] = {}
    for m in meths:
        node = nodes[id(m)]
        if m.name in op_names:
            raise _err(DuplicateNameError, f"method {m.name} clashes with an operator", node[1])
        if marity.setdefault(m.name, len(m.params)) != len(m.params):
            raise _err(ArityError, f"methods for {m.name} disagree on arity", node[1])

    known: dict[str, int] = {}
    for schema in [*ops, *meths]:
        node = nodes[id(schema)]
        lits = [c for c in schema.pre if isinstance(c, Literal)]
        if isinstance(schema, Operator):
            lits += [*schema.delete, *schema.add]
        _check_arities(((l, node) for l in lits), known)

    domain = Domain(dname, tuple(ops), tuple(meths), frozenset(hyp))
    for m in meths:
        node = nodes[id(m)]
        for t in m.act:
            _check_task(domain, t, node)

    mentioned = set(known) | {c.op for s in [*ops, *meths] for c in s.pre if isinstance(c, Constraint)}
    for h in hyp:
        if h not in mentioned:
            log.warning("hypothetical %r is not used anywhere in domain %s", h, dname)
    return domain


def _check_task(domain: Domain, task: Task, node: Node | None) -> None:
    arity = domain.task_arity(task.name)
    if arity is None:
        msg = f"unknown task {task.name}"
        raise _err(UnknownTaskError, msg, node) if node is not None else UnknownTaskError(msg)
    if arity != len(task.args):
        msg = f"task {task.name} takes {arity} argument(s), got {len(task.args)}"
        raise _err(ArityError, msg, node) if node is not None else ArityError(msg)


# ------------------------------------------------------------------ problems


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parse a problem and resolve its goal tasks against ``domain``."""
    root = read_one(text)
    if not isinstance(root, SList) or not root.items or _sym(root[0], "defproblem") != "defproblem":
        raise _err(DomainError, "expected (defproblem <name> <domain> ...)", root)
    if len(root) < 3:
        raise _err(DomainError, "defproblem needs a name and a domain name", root)
    pname = _name(root[1], "problem name")
    dname = _name(root[2], "domain name")
    if dname != domain.name:
        raise _err(DomainError, f"problem is for domain {dname!r}, not {domain.name!r}", root[2])
    init_nodes: list[Node] = []
    goal_nodes: list[Node] = []
    seen: set[str] = set()
    for item in root.items[3:]:
        if not isinstance(item, SList) or len(item) != 2 or not isinstance(item[0], Sym):
            raise _err(DomainError, "expected (:init (...)) or (:goal (...))", item)
        key = item[0].text
        if key not in (":init", ":goal"):
            raise _err(DomainError, f"unknown problem section {key!r}", item[0])
        if key in seen:
            raise _err(DuplicateNameError, f"section {key} given twice", item[0])
        seen.add(key)
        body = _list(item[1], key).items
        (init_nodes if key == ":init" else goal_nodes).extend(body)

    init = [parse_atom(n) for n in init_nodes]
    known = _predicate_arities(domain)
    _check_arities(zip(init, init_nodes), known)
    for lit, n in zip(init, init_nodes):
        if variables(lit):
            raise _err(DomainError, f"initial fact {lit} is not ground", n)
    try:
        state = KnowledgeState(init)
    except InconsistentStateError as exc:
        raise _err(DomainError, str(exc), root) from None
    goals = []
    for n in goal_nodes:
        t = parse_task(n)
        _check_task(domain, t, n)
        goals.append(t)
    return Problem(pname, dname, state, tuple(goals))


# ------------------------------------------------------------- pretty printing


def _fmt_list(items) -> str:
    return "(" + " ".join(map(str, items)) + ")"


def format_domain(domain: Domain) -> str:
    lines = [f"(defdomain {domain.name}"]
    for op in domain.operators:
        lines.append(f"  (:operator {op.head()}")
        lines.append(f"    :pre {_fmt_list(op.pre)}")
        lines.append(f"    :del {_fmt_list(op.delete)}")
        lines.append(f"    :add {_fmt_list(op.add)})")
    for m in domain.methods:
        lines.append(f"  (:method {m.head()}")
        lines.append(f"    :pre {_fmt_list(m.pre)}")
        lines.append(f"    :act {_fmt_list(m.act)})")
    if domain.hypothetical:
        lines.append("  (:hypothetical " + " ".join(sorted(domain.hypothetical)) + ")")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def format_problem(problem: Problem) -> str:
    return (
        f"(defproblem {problem.name} {problem.domain_name}\n"
        f"  (:init {_fmt_list(problem.init.ordered())})\n"
        f"  (:goal {_fmt_list(problem.goals)}))\n"
    )
