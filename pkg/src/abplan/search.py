"""Conjecture-tree search: best-first by assumption count, then extraction.

Each node holds a knowledge state, the tasks still to accomplish, and the number of
assumptions made on the way from the root. The frontier is ordered by
``(weight, -depth, insertion)``: fewest assumptions first, deeper nodes first among
equals (which makes the zero-assumption mode a depth-first HTN planner), then FIFO.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .assumptions import (
    Assumption, find_substitutions, generate_assumptions, instantiate_from_constraints,
    is_legal,
)
from .domain import Domain, Method, Operator, Schema, Task
from .logic import (
    Constraint, InconsistentStateError, KnowledgeState, Literal, Substitution, Var,
    apply, consistent_union, unify, variables,
)

__all__ = [
    "SearchConfig", "Edge", "ConjectureNode", "ConjectureTree", "Step", "Conjecture",
    "Status", "SearchResult", "SearchError", "Transition",
    "expand", "select_best", "find_conjecture", "extract_conjecture",
    "standardize_apart", "bind_task", "make_transition",
]


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    max_assumptions: int | None = None
    max_depth: int = 64
    iterative_deepening: bool = False
    widen_assumptions: bool = False
    node_budget: int = 10**6
    prune_duplicates: bool = False

    def __post_init__(self) -> None:
        if self.max_assumptions is not None and self.max_assumptions < 0:
            raise ValueError("max_assumptions must be non-negative")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if self.node_budget < 1:
            raise ValueError("node_budget must be positive")


@dataclass(frozen=True)
class Edge:
    action: Task
    kind: str  # "primitive" | "compound"
    assumptions: tuple[Assumption, ...]
    substitution: Substitution
    schema: str = ""


@dataclass(eq=False)
class ConjectureNode:
    state: KnowledgeState
    remaining: tuple[Task, ...]
    weight: int = 0
    depth: int = 0
    parent: "ConjectureNode | None" = None
    in_edge: Edge | None = None
    id: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.remaining

    def __repr__(self) -> str:
        return f"<node #{self.id} w={self.weight} d={self.depth} remaining={len(self.remaining)}>"


@dataclass(frozen=True)
class Step:
    assumptions: tuple[Assumption, ...]
    action: Task


@dataclass(frozen=True)
class Conjecture:
    steps: tuple[Step, ...] = ()
    # assumptions of decompositions after the last primitive step
    final: tuple[Assumption, ...] = ()

    @property
    def total_weight(self) -> int:
        return sum(len(s.assumptions) for s in self.steps) + len(self.final)

    @property
    def actions(self) -> tuple[Task, ...]:
        return tuple(s.action for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


class Status(enum.Enum):
    SOLVED = "solved"
    NO_SOLUTION = "no_solution_within_bounds"
    BUDGET_EXHAUSTED = "budget_exhausted"


# ------------------------------------------------------------------ transitions


def standardize_apart(schema: Schema, avoid: frozenset[str]) -> Schema:
    """Rename schema variables that collide with ``avoid`` to ``?name#k`` forms.

    The fresh suffix is the smallest one free of both ``avoid`` and the schema's own
    variables, so renaming is a pure function of its inputs.
    """
    own = {v.name for v in schema.params} | variables(schema.pre)
    if isinstance(schema, Operator):
        own |= variables(schema.delete) | variables(schema.add)
    else:
        own |= variables(schema.act)
    clash = sorted(own & avoid)
    if not clash:
        return schema
    taken = set(avoid) | own
    ren: dict[str, Var] = {}
    for name in clash:
        base = name.split("#", 1)[0]
        k = 1
        while f"{base}#{k}" in taken:
            k += 1
        taken.add(f"{base}#{k}")
        ren[name] = Var(f"{base}#{k}")
    params = tuple(ren.get(v.name, v) for v in schema.params)
    pre = apply(schema.pre, ren)
    if isinstance(schema, Operator):
        return Operator(schema.name, params, pre, apply(schema.delete, ren), apply(schema.add, ren))
    return Method(schema.name, params, pre, apply(schema.act, ren))


def bind_task(schema: Schema, task: Task, rigid: frozenset[str]) -> Substitution | None:
    """Bind schema parameters to the task's arguments."""
    return unify(schema.head(), task.as_literal(), Substitution(), rigid)


@dataclass(frozen=True)
class Transition:
    edge: Edge
    state: KnowledgeState
    remaining: tuple[Task, ...]


def make_transition(domain: Domain, schema: Schema, state: KnowledgeState,
                    rest: tuple[Task, ...], sigma: Substitution,
                    rigid: frozenset[str]) -> Transition | None:
    """Apply ``schema`` under ``sigma`` with whatever assumptions that requires.

    Returns ``None`` when an assumption is not declared hypothetical in the domain or
    the assumptions contradict each other.
    """
    sigma = instantiate_from_constraints(schema.pre, sigma, state, rigid)
    hyps = generate_assumptions(schema, sigma, state)
    if not all(is_legal(h, domain) for h in hyps):
        return None
    lits = [h.content for h in hyps if isinstance(h.content, Literal)]
    try:
        after = consistent_union(state, lits)
    except InconsistentStateError:
        return None
    action = Task(schema.name, tuple(apply(list(schema.params), sigma)))
    if isinstance(schema, Operator):
        after = after.without(apply(schema.delete, sigma)).insert(apply(schema.add, sigma))
        remaining = rest
        kind = "primitive"
    else:
        remaining = tuple(apply(schema.act, sigma)) + rest
        kind = "compound"
    return Transition(Edge(action, kind, hyps, sigma, schema.name), after, remaining)


def _transitions(domain: Domain, state: KnowledgeState,
                 remaining: tuple[Task, ...]) -> Iterable[Transition]:
    task, rest = remaining[0], remaining[1:]
    schemas = domain.schemas_for(task)
    if not schemas:
        raise SearchError(f"no operator or method for task {task}")
    avoid = state.variables() | variables(remaining)
    for schema in schemas:
        schema = standardize_apart(schema, avoid)
        sigma0 = bind_task(schema, task, avoid)
        if sigma0 is None:
            continue
        seen: set = set()
        for sigma in find_substitutions(schema.pre, state, sigma0):
            t = make_transition(domain, schema, state, rest, sigma, avoid)
            if t is None:
                continue
            key = (t.edge.action, t.edge.assumptions, t.state, t.remaining)
            if key in seen:
                continue
            seen.add(key)
            yield t


# ------------------------------------------------------------------------ tree


@dataclass
class SearchStats:
    expansions: int = 0
    max_frontier: int = 0
    tree_size: int = 0
    elapsed: float = 0.0
    depth_cutoffs: int = 0
    weight_cutoffs: int = 0


class ConjectureTree:
    """Search state for one problem under one configuration.

    The tree keeps every node it creates (``nodes``) so it can be inspected after a
    search, and its frontier survives a successful search: :meth:`next_conjecture`
    resumes where the previous call stopped.
    """

    def __init__(self, domain: Domain, state: KnowledgeState, goals: Sequence[Task],
                 config: SearchConfig = SearchConfig()) -> None:
        self.domain = domain
        self.config = config
        self.root = ConjectureNode(state, tuple(goals), 0, 0, None, None, 0)
        self.nodes: list[ConjectureNode] = [self.root]
        self.frontier: list[tuple[int, int, int, ConjectureNode]] = []
        self.closed: set[int] = set()
        self.stats = SearchStats(tree_size=1)
        self._counter = itertools.count()
        self._seen: dict = {}
        self.push(self.root)

    def push(self, node: ConjectureNode) -> None:
        heapq.heappush(self.frontier, (node.weight, -node.depth, next(self._counter), node))
        self.stats.max_frontier = max(self.stats.max_frontier, len(self.frontier))

    def __getstate__(self):
        d = dict(self.__dict__)
        d["_counter"] = next(self._counter)
        return d

    def __setstate__(self, d):
        d["_counter"] = itertools.count(d["_counter"])
        self.__dict__.update(d)

    def next_conjecture(self, budget: int | None = None) -> tuple[Conjecture | None, Status]:
        """Pop and expand until a leaf is selected, the frontier empties or the budget runs out."""
        budget = self.config.node_budget if budget is None else budget
        t0 = time.perf_counter()
        try:
            while True:
                if self.stats.expansions >= budget and self.frontier:
                    return None, Status.BUDGET_EXHAUSTED
                node = select_best(self)
                if node is None:
                    return None, Status.NO_SOLUTION
                if node.is_leaf:
                    self.closed.add(node.id)
                    return extract_conjecture(self, node), Status.SOLVED
                expand(self, node)
        finally:
            self.stats.elapsed += time.perf_counter() - t0


def select_best(tree: ConjectureTree) -> ConjectureNode | None:
    if not tree.frontier:
        return None
    return heapq.heappop(tree.frontier)[-1]


def expand(tree: ConjectureTree, node: ConjectureNode) -> list[ConjectureNode]:
    """Create the children of ``node`` for its first remaining task."""
    if not node.remaining:
        raise SearchError("cannot expand a node with no remaining tasks")
    if node.id in tree.closed:
        raise SearchError(f"node #{node.id} was already expanded")
    tree.closed.add(node.id)
    tree.stats.expansions += 1
    cfg = tree.config
    children: list[ConjectureNode] = []
    for t in _transitions(tree.domain, node.state, node.remaining):
        weight = node.weight + len(t.edge.assumptions)
        if cfg.max_assumptions is not None and weight > cfg.max_assumptions:
            tree.stats.weight_cutoffs += 1
            continue
        depth = node.depth + 1
        if depth > cfg.max_depth:
            tree.stats.depth_cutoffs += 1
            continue
        if cfg.prune_duplicates:
            # dominated: same state and tasks reached as cheaply and no deeper
            key = (t.state, t.remaining)
            best = tree._seen.get(key)
            if best is not None and best[0] <= weight and best[1] <= depth:
                continue
            if best is None or (weight <= best[0] and depth <= best[1]):
                tree._seen[key] = (weight, depth)
        child = ConjectureNode(t.state, t.remaining, weight, depth, node, t.edge, len(tree.nodes))
        tree.nodes.append(child)
        tree.stats.tree_size += 1
        tree.push(child)
        children.append(child)
    return children


def extract_conjecture(tree: ConjectureTree | None, leaf: ConjectureNode) -> Conjecture:
    """Read the conjecture off the path from the root to ``leaf``.

    Assumptions made while decomposing a compound task are carried by the next
    primitive step in execution order; if none follows they go to ``final``.
    """
    if leaf.remaining:
        raise SearchError("extraction needs a leaf (no remaining tasks)")
    edges: list[Edge] = []
    n = leaf
    while n.parent is not None:
        edges.append(n.in_edge)
        n = n.parent
    edges.reverse()
    steps: list[Step] = []
    pending: list[Assumption] = []
    for e in edges:
        if e.kind == "primitive":
            steps.append(Step(tuple(pending) + e.assumptions, e.action))
            pending = []
        else:
            pending.extend(e.assumptions)
    conj = Conjecture(tuple(steps), tuple(pending))
    assert conj.total_weight == leaf.weight
    return conj


# --------------------------------------------------------------------- driver


@dataclass
class SearchResult:
    conjecture: Conjecture | None
    status: Status
    stats: SearchStats
    tree: ConjectureTree | None = field(default=None, repr=False)


def _run(domain, state, goals, cfg: SearchConfig, budget: int, totals: SearchStats):
    tree = ConjectureTree(domain, state, goals, cfg)
    conj, status = tree.next_conjecture(budget)
    s = tree.stats
    totals.expansions += s.expansions
    totals.max_frontier = max(totals.max_frontier, s.max_frontier)
    totals.tree_size += s.tree_size
    totals.elapsed += s.elapsed
    totals.depth_cutoffs += s.depth_cutoffs
    totals.weight_cutoffs += s.weight_cutoffs
    return tree, conj, status


def _deepening(domain, state, goals, cfg: SearchConfig, totals: SearchStats):
    if not cfg.iterative_deepening:
        return _run(domain, state, goals, cfg, cfg.node_budget - totals.expansions, totals)
    tree = conj = None
    status = Status.NO_SOLUTION
    for depth in range(1, cfg.max_depth + 1):
        before = totals.depth_cutoffs
        sub = SearchConfig(cfg.max_assumptions, depth, False, False,
                           cfg.node_budget, cfg.prune_duplicates)
        tree, conj, status = _run(domain, state, goals, sub,
                                  cfg.node_budget - totals.expansions, totals)
        if status is not Status.NO_SOLUTION or totals.depth_cutoffs == before:
            break
    return tree, conj, status


def find_conjecture(state: KnowledgeState, domain: Domain, goals: Sequence[Task],
                    config: SearchConfig = SearchConfig()) -> SearchResult:
    """Least-assumption conjecture for ``goals`` from ``state`` within the configured bounds."""
    totals = SearchStats()
    if not config.widen_assumptions:
        tree, conj, status = _deepening(domain, state, goals, config, totals)
        return SearchResult(conj, status, totals, tree)
    bound = 0
    while True:
        before = totals.weight_cutoffs
        sub = SearchConfig(bound, config.max_depth, config.iterative_deepening, False,
                           config.node_budget, config.prune_duplicates)
        tree, conj, status = _deepening(domain, state, goals, sub, totals)
        if status is not Status.NO_SOLUTION or totals.weight_cutoffs == before:
            break
        if config.max_assumptions is not None and bound >= config.max_assumptions:
            break
        bound += 1
    return SearchResult(conj, status, totals, tree)
