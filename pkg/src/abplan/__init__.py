"""Assumption-based HTN planning.

When the initial state is incomplete, the planner may assume missing facts and
unmet comparisons, and it returns the plan that needs the fewest assumptions.
"""

from __future__ import annotations

from .assumptions import (
    Assumption, Kind, classify, find_substitutions, generate_assumptions, is_legal,
)
from .domain import (
    ArityError, Domain, DomainError, DuplicateNameError, FreeVariableError, Method,
    Operator, Problem, Task, UnknownTaskError, parse_domain, parse_problem,
)
from .logic import (
    Arith, Const, Constraint, InconsistentStateError, KnowledgeState, Literal, Num,
    Substitution, Truth, Var, apply, consistent_union, eval_constraint, unify,
)
from .planner import PlanningError, PlanReport, ValidationReport, plan, validate
from .search import (
    Conjecture, ConjectureNode, ConjectureTree, SearchConfig, SearchResult, Status, Step,
    expand, extract_conjecture, find_conjecture, select_best,
)
from .sexp import ParseError

__version__ = "0.1.0"

__all__ = [
    "Arith", "ArityError", "Assumption", "Conjecture", "ConjectureNode", "ConjectureTree",
    "Const", "Constraint", "Domain", "DomainError", "DuplicateNameError", "FreeVariableError",
    "InconsistentStateError", "Kind", "KnowledgeState", "Literal", "Method", "Num",
    "Operator", "ParseError", "PlanReport", "PlanningError", "Problem", "SearchConfig",
    "SearchResult", "Status", "Step", "Substitution", "Task", "Truth", "UnknownTaskError",
    "ValidationReport", "Var", "apply", "classify", "consistent_union", "eval_constraint",
    "expand", "extract_conjecture", "find_conjecture", "find_substitutions",
    "generate_assumptions", "is_legal", "parse_domain", "parse_problem", "plan",
    "select_best", "unify", "validate",
]
