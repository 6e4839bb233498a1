"""Text forms of conjectures and reports: s-expressions and JSON.

Conjecture s-expression::

    (:conjecture :weight 1
      (:step (:assume ()) (:action (!load fred cab38 downtown)))
      (:step (:assume ((hasfuel cab38 10))) (:action (!move cab38 downtown park)))
      (:step (:assume ()) (:action (!unload fred cab38 park))))

A trailing ``(:final (:assume (...)))`` form carries assumptions made by
decompositions after the last primitive step. Assumption kinds are not written in
the s-expression form; JSON records them.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .assumptions import Assumption, Kind
from .domain import DomainError, Task, parse_condition, parse_task
from .logic import (
    Arith, Const, Constraint, KnowledgeState, Literal, Num, Term, Var, format_number,
)
from .sexp import Node, ParseError, SList, Sym, read_one
from .search import Conjecture, Step

__all__ = [
    "conjecture_to_sexp", "conjecture_from_sexp", "conjecture_to_json", "conjecture_from_json",
    "read_conjecture", "plan_report_to_sexp", "plan_report_to_json",
    "validation_to_sexp", "validation_to_json", "oracle_to_sexp", "oracle_to_json",
    "term_to_json", "term_from_json",
]


# --------------------------------------------------------------- s-expressions


def _assume(hyps) -> str:
    return "(:assume (" + " ".join(str(h) for h in hyps) + "))"


def conjecture_to_sexp(conj: Conjecture, indent: str = "") -> str:
    lines = [f"{indent}(:conjecture :weight {conj.total_weight}"]
    for s in conj.steps:
        lines.append(f"{indent}  (:step {_assume(s.assumptions)} (:action {s.action}))")
    if conj.final:
        lines.append(f"{indent}  (:final {_assume(conj.final)})")
    lines[-1] += ")"
    return "\n".join(lines)


def _to_assumption(node: Node) -> Assumption:
    c = parse_condition(node)
    kind = Kind.CONSTRAINT_VIOLATION if isinstance(c, Constraint) else Kind.HYPOTHESIS
    return Assumption(c, kind)


def _assume_list(node: Node) -> tuple[Assumption, ...]:
    if not (isinstance(node, SList) and len(node) == 2 and isinstance(node[0], Sym)
            and node[0].text == ":assume" and isinstance(node[1], SList)):
        raise DomainError("expected (:assume (...))", node.line or None, node.column or None)
    return tuple(_to_assumption(n) for n in node[1])


def _conjecture_node(node: Node) -> Conjecture:
    if not (isinstance(node, SList) and len(node) >= 3 and isinstance(node[0], Sym)
            and node[0].text == ":conjecture" and isinstance(node[1], Sym)
            and node[1].text == ":weight" and isinstance(node[2], Sym)):
        raise DomainError("expected (:conjecture :weight W ...)", node.line or None, node.column or None)
    try:
        weight = int(node[2].text)
    except ValueError:
        raise DomainError("weight must be an integer", node[2].line, node[2].column) from None
    steps: list[Step] = []
    final: tuple[Assumption, ...] = ()
    for item in node.items[3:]:
        if not (isinstance(item, SList) and item.items and isinstance(item[0], Sym)):
            raise DomainError("expected (:step ...) or (:final ...)", item.line or None, item.column or None)
        head = item[0].text
        if head == ":step" and len(item) == 3:
            hyps = _assume_list(item[1])
            act = item[2]
            if not (isinstance(act, SList) and len(act) == 2 and isinstance(act[0], Sym)
                    and act[0].text == ":action"):
                raise DomainError("expected (:action (...))", act.line or None, act.column or None)
            task = parse_task(act[1])
            if not task.primitive:
                raise DomainError(f"step action {task.name} is not primitive", act.line, act.column)
            steps.append(Step(hyps, task))
        elif head == ":final" and len(item) == 2:
            final = _assume_list(item[1])
        else:
            raise DomainError(f"unexpected {head}", item.line, item.column)
    conj = Conjecture(tuple(steps), final)
    if conj.total_weight != weight:
        raise DomainError(f"declared weight {weight} but {conj.total_weight} assumptions listed",
                          node.line, node.column)
    return conj


def conjecture_from_sexp(text: str) -> Conjecture:
    """Read a bare ``(:conjecture ...)`` or a ``(:report ...)`` that contains one."""
    node = read_one(text)
    if isinstance(node, SList) and node.items and isinstance(node[0], Sym) and node[0].text == ":report":
        for item in node.items:
            if isinstance(item, SList) and item.items and isinstance(item[0], Sym) \
                    and item[0].text == ":conjecture":
                return _conjecture_node(item)
        raise DomainError("report carries no conjecture", node.line, node.column)
    return _conjecture_node(node)


# ------------------------------------------------------------------------ JSON


def term_to_json(t: Term) -> Any:
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Num):
        return {"num": format_number(t.value)}
    return {"op": t.op, "args": [term_to_json(t.left), term_to_json(t.right)]}


def term_from_json(d: Any) -> Term:
    if isinstance(d, str):
        return Const(d)
    if "var" in d:
        return Var(d["var"])
    if "num" in d:
        return Num(Fraction(d["num"]))
    left, right = d["args"]
    return Arith(d["op"], term_from_json(left), term_from_json(right))


def _cond_to_json(c: Literal | Constraint) -> dict:
    if isinstance(c, Constraint):
        return {"cmp": c.op, "args": [term_to_json(c.left), term_to_json(c.right)]}
    return {"pred": c.pred, "args": [term_to_json(a) for a in c.args], "positive": c.positive}


def _cond_from_json(d: dict) -> Literal | Constraint:
    if "cmp" in d:
        left, right = d["args"]
        return Constraint(d["cmp"], term_from_json(left), term_from_json(right))
    return Literal(d["pred"], tuple(term_from_json(a) for a in d["args"]), d.get("positive", True))


def _hyp_to_json(h: Assumption) -> dict:
    return {"kind": h.kind.value, "content": _cond_to_json(h.content), "text": str(h.content)}


def _hyp_from_json(d: dict) -> Assumption:
    return Assumption(_cond_from_json(d["content"]), Kind(d["kind"]))


def _task_to_json(t: Task) -> dict:
    return {"name": t.name, "args": [term_to_json(a) for a in t.args], "text": str(t)}


def conjecture_to_json(conj: Conjecture) -> dict:
    out = {
        "weight": conj.total_weight,
        "steps": [{"assume": [_hyp_to_json(h) for h in s.assumptions],
                   "action": _task_to_json(s.action)} for s in conj.steps],
    }
    if conj.final:
        out["final"] = [_hyp_to_json(h) for h in conj.final]
    return out


def conjecture_from_json(d: dict) -> Conjecture:
    steps = tuple(
        Step(tuple(_hyp_from_json(h) for h in s["assume"]),
             Task(s["action"]["name"], tuple(term_from_json(a) for a in s["action"]["args"])))
        for s in d["steps"])
    conj = Conjecture(steps, tuple(_hyp_from_json(h) for h in d.get("final", ())))
    if "weight" in d and d["weight"] != conj.total_weight:
        raise DomainError(f"declared weight {d['weight']} but {conj.total_weight} assumptions listed")
    return conj


def read_conjecture(text: str) -> Conjecture:
    """Read a conjecture file in either format (JSON if it starts with ``{``)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            d = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        try:
            return conjecture_from_json(d.get("conjecture", d) or {})
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed conjecture JSON: {exc}") from None
    return conjecture_from_sexp(text)


# --------------------------------------------------------------------- reports


def _stats_fields(stats, timing: bool) -> list[tuple[str, Any]]:
    out = [("expansions", stats.expansions), ("max-frontier", stats.max_frontier),
           ("tree-size", stats.tree_size)]
    if timing:
        out.append(("elapsed-ms", round(stats.elapsed * 1000, 3)))
    return out


def plan_report_to_sexp(report, timing: bool = False) -> str:
    head = f"(:report :status {report.status.value}"
    for k, v in _stats_fields(report.stats, timing):
        head += f" :{k} {v}"
    if report.conjecture is None:
        return head + ")\n"
    return head + "\n" + conjecture_to_sexp(report.conjecture, "  ") + ")\n"


def plan_report_to_json(report, timing: bool = False) -> str:
    d = {"status": report.status.value, "stats": {k: v for k, v in _stats_fields(report.stats, timing)},
         "conjecture": conjecture_to_json(report.conjecture) if report.conjecture else None}
    return json.dumps(d, sort_keys=True) + "\n"


def _state_sexp(s: KnowledgeState) -> str:
    return "(" + " ".join(map(str, s.ordered())) + ")"


def _failure_text(f) -> str:
    return str(f[1]) if not isinstance(f[1], str) else json.dumps(f[1])


def validation_to_sexp(report) -> str:
    out = f"(:validation :valid {'true' if report.valid else 'false'}"
    if report.first_failure is not None:
        out += f"\n  (:failure :step {report.first_failure[0]} :missing {_failure_text(report.first_failure)})"
    out += "\n  (:trajectory"
    for s in report.trajectory:
        out += "\n    " + _state_sexp(s)
    return out + "))\n"


def validation_to_json(report) -> str:
    d = {"valid": report.valid,
         "trajectory": [[str(f) for f in s.ordered()] for s in report.trajectory],
         "first_failure": None if report.first_failure is None else
         {"step": report.first_failure[0], "missing": str(report.first_failure[1])}}
    return json.dumps(d, sort_keys=True) + "\n"


def oracle_to_sexp(result) -> str:
    mw = "none" if result.min_weight is None else result.min_weight
    out = f"(:oracle :min-weight {mw} :witnesses {len(result.witnesses)} :explored {result.explored}"
    for w in sorted(result.witnesses, key=conjecture_to_sexp):
        out += "\n" + conjecture_to_sexp(w, "  ")
    return out + ")\n"


def oracle_to_json(result) -> str:
    d = {"min_weight": result.min_weight, "witness_count": len(result.witnesses),
         "explored": result.explored,
         "witnesses": [conjecture_to_json(w) for w in sorted(result.witnesses, key=conjecture_to_sexp)]}
    return json.dumps(d, sort_keys=True) + "\n"
