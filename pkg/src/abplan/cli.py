"""``abp`` command line: plan, validate, oracle and bench.

Exit codes: 0 success (solved / valid), 1 input or usage error, 2 no solution
within bounds (or invalid conjecture), 3 node budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
import time
from pathlib import Path

from .domain import Domain, Problem, parse_domain, parse_problem
from .oracle import OracleBoundError, brute_force
from .planner import PlanningError, plan, validate
from .search import SearchConfig, SearchError, Status
from .serialize import (
    oracle_to_json, oracle_to_sexp, plan_report_to_json, plan_report_to_sexp,
    read_conjecture, validation_to_json, validation_to_sexp,
)
from .sexp import ParseError, SList, Sym, read_one

EXIT_OK, EXIT_ERROR, EXIT_NO_SOLUTION, EXIT_BUDGET = 0, 1, 2, 3
_STATUS_EXIT = {Status.SOLVED: EXIT_OK, Status.NO_SOLUTION: EXIT_NO_SOLUTION,
                Status.BUDGET_EXHAUSTED: EXIT_BUDGET}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None


def _load(domain_path: str, problem_path: str) -> tuple[Domain, Problem]:
    try:
        domain = parse_domain(_read(domain_path))
    except ParseError as exc:
        raise UsageError(f"{domain_path}:{exc}") from None
    try:
        problem = parse_problem(_read(problem_path), domain)
    except ParseError as exc:
        raise UsageError(f"{problem_path}:{exc}") from None
    return domain, problem


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(
            max_assumptions=args.max_assumptions,
            max_depth=args.max_depth,
            iterative_deepening=getattr(args, "iterative_deepening", False),
            widen_assumptions=getattr(args, "widen_assumptions", False),
            node_budget=args.node_budget,
            prune_duplicates=getattr(args, "prune_duplicates", False),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_plan(args, out) -> int:
    domain, problem = _load(args.domain, args.problem)
    report = plan(domain, problem, _config(args))
    if args.format == "json":
        out.write(plan_report_to_json(report, args.timing))
    else:
        out.write(plan_report_to_sexp(report, args.timing))
    return _STATUS_EXIT[report.status]


def cmd_validate(args, out) -> int:
    domain, problem = _load(args.domain, args.problem)
    try:
        conj = read_conjecture(_read(args.conjecture))
    except ParseError as exc:
        raise UsageError(f"{args.conjecture}:{exc}") from None
    report = validate(conj, problem.init, domain, problem.goals)
    out.write(validation_to_json(report) if args.format == "json" else validation_to_sexp(report))
    return EXIT_OK if report.valid else EXIT_NO_SOLUTION


def cmd_oracle(args, out) -> int:
    domain, problem = _load(args.domain, args.problem)
    result = brute_force(problem.init, domain, problem.goals, args.depth, args.weight)
    out.write(oracle_to_json(result) if args.format == "json" else oracle_to_sexp(result))
    return EXIT_OK


def _domain_name_of(text: str) -> str | None:
    node = read_one(text)
    if isinstance(node, SList) and len(node) >= 3 and isinstance(node[2], Sym):
        return node[2].text
    return None


def suite_instances(suite: Path) -> list[tuple[str, Domain, Problem]]:
    """Every ``*.p`` problem in ``suite`` paired with the ``*.abp`` domain it names."""
    domains: dict[str, Domain] = {}
    for f in sorted(suite.glob("*.abp")):
        try:
            d = parse_domain(f.read_text(encoding="utf-8"))
        except ParseError as exc:
            raise UsageError(f"{f}:{exc}") from None
        domains.setdefault(d.name, d)
    out = []
    for f in sorted(suite.glob("*.p")):
        text = f.read_text(encoding="utf-8")
        try:
            dname = _domain_name_of(text)
            if dname not in domains:
                raise UsageError(f"{f}: no domain named {dname!r} in {suite}")
            out.append((f.stem, domains[dname], parse_problem(text, domains[dname])))
        except ParseError as exc:
            raise UsageError(f"{f}:{exc}") from None
    return out


def cmd_bench(args, out) -> int:
    suite = Path(args.suite_dir)
    if not suite.is_dir():
        raise UsageError(f"{suite}: not a directory")
    try:
        bounds = [int(b) for b in args.bounds.split(",") if b.strip()]
    except ValueError:
        raise UsageError(f"bad --bounds {args.bounds!r}") from None
    if args.repeat < 1:
        raise UsageError("--repeat must be at least 1")
    for name, domain, problem in suite_instances(suite):
        for bound in bounds:
            cfg = SearchConfig(max_assumptions=bound, max_depth=args.max_depth,
                               node_budget=args.node_budget)
            times = []
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                report = plan(domain, problem, cfg)
                times.append((time.perf_counter() - t0) * 1000)
            row = {"instance": name, "bound": bound, "status": report.status.value,
                   "weight": report.conjecture.total_weight if report.conjecture else None,
                   "expansions": report.stats.expansions,
                   "milliseconds": round(statistics.median(times), 3)}
            if args.format == "json":
                out.write(json.dumps(row) + "\n")
            else:
                w = "none" if row["weight"] is None else row["weight"]
                out.write(f"(:row :instance {name} :bound {bound} :status {row['status']} :weight {w} "
                          f":expansions {row['expansions']} :milliseconds {row['milliseconds']})\n")
    return EXIT_OK


def _bound_arg(text: str) -> int | None:
    if text in ("none", "inf", "unlimited"):
        return None
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abp", description="Assumption-based HTN planner.")
    sub = p.add_subparsers(dest="command", required=True)

    def search_flags(sp, default_budget: int = 10**6) -> None:
        sp.add_argument("--max-assumptions", type=_bound_arg, default=None, metavar="N",
                        help="assumption bound (default: unlimited; 0 = classical HTN)")
        sp.add_argument("--max-depth", type=int, default=64, metavar="D")
        sp.add_argument("--node-budget", type=int, default=default_budget, metavar="B")

    sp = sub.add_parser("plan", help="find a least-assumption conjecture")
    sp.add_argument("domain")
    sp.add_argument("problem")
    search_flags(sp)
    sp.add_argument("--iterative-deepening", action="store_true")
    sp.add_argument("--widen-assumptions", action="store_true",
                    help="rerun with assumption bounds 0, 1, 2, ... until a conjecture appears")
    sp.add_argument("--prune-duplicates", action="store_true",
                    help="skip nodes whose state and task list were reached with no more assumptions")
    sp.add_argument("--format", choices=("sexp", "json"), default="sexp")
    sp.add_argument("--seed", type=int, default=0,
                    help="accepted for reproducible scripting; the search itself is deterministic")
    sp.add_argument("--timing", action="store_true", help="include elapsed time in the report")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("validate", help="replay a conjecture against a problem")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("conjecture")
    sp.add_argument("--format", choices=("sexp", "json"), default="sexp")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("oracle", help="exhaustive minimum-assumption search (small instances)")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--weight", type=int, required=True)
    sp.add_argument("--format", choices=("sexp", "json"), default="sexp")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("bench", help="time every problem of a suite directory under several bounds")
    sp.add_argument("suite_dir")
    sp.add_argument("--repeat", type=int, default=3, metavar="K")
    sp.add_argument("--bounds", default="0,2", help="comma-separated assumption bounds")
    sp.add_argument("--max-depth", type=int, default=64)
    sp.add_argument("--node-budget", type=int, default=10**6)
    sp.add_argument("--format", choices=("sexp", "json"), default="json")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="abp: %(levelname)s: %(message)s", stream=err)
    try:
        return args.func(args, out)
    except (UsageError, OracleBoundError, PlanningError, SearchError) as exc:
        err.write(f"abp {args.command}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
