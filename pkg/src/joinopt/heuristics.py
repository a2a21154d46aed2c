"""Heuristics for queries too large for exact DP: GOO, IDP2 and UnionDP.

All three work on *units*: disjoint subplans that are joined as opaque
leaves.  A unit carries its full subplan, so the final tree needs no separate
expansion step, and its cost counts as the unit's leaf cost.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from .costmodel import CostKind, CostModel, DEFAULT_COST_KIND
from .dpexact import JoinProblem, OptimizerResult, mpdp
from .errors import ContractViolation, OptimizerTimeout
from .planmemo import Plan, RunStats, _postorder
from .querygraph import EdgeInfo, QueryGraph
from .relset import EXACT_CAPACITY, RelSet, lowest

DEFAULT_K = 15


def _model(graph: QueryGraph, cost) -> CostModel:
    return cost if isinstance(cost, CostModel) else CostModel(graph, cost)


def _check_k(k: int) -> None:
    if not 2 <= k <= EXACT_CAPACITY:
        raise ContractViolation(f"k must be in [2, {EXACT_CAPACITY}], got {k}")


class _Budget:
    def __init__(self, timeout: float | None, workers: int = 1):
        self.workers = workers
        self.started = time.monotonic()
        self.deadline = None if timeout is None else self.started + timeout

    def remaining(self) -> float | None:
        if self.deadline is None:
            return None
        return max(0.0, self.deadline - time.monotonic())

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    def elapsed(self) -> float:
        return time.monotonic() - self.started


def _exact(model: CostModel, units: list[Plan], stats: RunStats, budget: _Budget) -> Plan:
    """Optimal plan over ``units`` with MPDP; adds its counters to ``stats``."""
    if len(units) == 1:
        return units[0]
    problem = JoinProblem.from_units(model, units)
    result = mpdp(problem, cost=model, workers=budget.workers, timeout=budget.remaining())
    stats.evaluated_counter += result.stats.evaluated_counter
    stats.ccp_counter += result.stats.ccp_counter
    if result.plan is None:
        raise OptimizerTimeout
    return result.plan


# ---------------------------------------------------------------------------
# GOO


def greedy_join(model: CostModel, units: list[Plan]) -> Plan:
    """Join connected units pairwise, smallest result first, until one is left.

    Candidates are ranked by (result cardinality, join cost, result set); the
    left input is the unit with the smaller relation set.
    """
    if not units:
        raise ContractViolation("nothing to join")
    adjacency = JoinProblem.from_units(model, units).index.adjacency
    alive: dict[int, Plan] = dict(enumerate(units))
    nbrs: dict[int, set[int]] = {
        i: {j for j in range(len(units)) if adjacency[i] >> j & 1} for i in range(len(units))
    }
    heap: list[tuple] = []

    def push(a: int, b: int) -> None:
        pa, pb = alive[a], alive[b]
        if pb.relations < pa.relations:
            a, b, pa, pb = b, a, pb, pa
        s = pa.relations | pb.relations
        heapq.heappush(heap, (model.cardinality(s), model.join_cost(pa, pb), s, a, b))

    for a in nbrs:
        for b in nbrs[a]:
            if a < b:
                push(a, b)
    next_id = len(units)
    while len(alive) > 1:
        if not heap:
            raise ContractViolation("units are not connected")
        _, _, _, a, b = heapq.heappop(heap)
        if a not in alive or b not in alive:
            continue
        merged = model.join(alive.pop(a), alive.pop(b))
        c = next_id
        next_id += 1
        alive[c] = merged
        around = (nbrs.pop(a) | nbrs.pop(b)) - {a, b}
        nbrs[c] = around
        for d in around:
            nbrs[d] -= {a, b}
            nbrs[d].add(c)
            push(c, d)
    return next(iter(alive.values()))


def goo(graph: QueryGraph, *, cost: CostKind | str | CostModel = DEFAULT_COST_KIND) -> OptimizerResult:
    """Greedy operator ordering over the base relations."""
    started = time.monotonic()
    model = _model(graph, cost)
    plan = greedy_join(model, model.leaves())
    return OptimizerResult(plan, RunStats(elapsed=time.monotonic() - started), "goo")


# ---------------------------------------------------------------------------
# IDP2


class _Node:
    """Mutable join-tree node; a node with ``unit`` set is an opaque leaf."""

    __slots__ = ("unit", "left", "right", "plan", "units")

    def __init__(self, unit: Plan | None = None, left: _Node | None = None, right: _Node | None = None):
        self.unit = unit
        self.left = left
        self.right = right
        self.plan = unit
        self.units = 1


def _to_nodes(plan: Plan) -> _Node:
    built: dict[int, _Node] = {}
    for p in _postorder(plan):
        if p.is_leaf:
            built[id(p)] = _Node(p)
        else:
            built[id(p)] = _Node(None, built.pop(id(p.left)), built.pop(id(p.right)))
    return built[id(plan)]


def _refresh(root: _Node, model: CostModel) -> list[_Node]:
    """Recompute plans and unit counts bottom-up; returns the nodes in post-order."""
    order: list[_Node] = []
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if node.unit is not None:
            node.plan, node.units = node.unit, 1
            order.append(node)
        elif done:
            node.plan = model.join(node.left.plan, node.right.plan)
            node.units = node.left.units + node.right.units
            order.append(node)
        else:
            stack += [(node, True), (node.right, False), (node.left, False)]
    return order


def _units_of(node: _Node) -> list[Plan]:
    out = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.unit is not None:
            out.append(cur.unit)
        else:
            stack += [cur.right, cur.left]
    return out


def idp2(
    graph: QueryGraph,
    k: int = DEFAULT_K,
    *,
    cost: CostKind | str | CostModel = DEFAULT_COST_KIND,
    timeout: float | None = None,
    workers: int = 1,
) -> OptimizerResult:
    """Iterative DP seeded with GOO.

    The costliest subtree with between 2 and ``k`` units is re-optimised with
    MPDP and collapsed into a single unit, until one unit remains.  Replacing
    a subtree by a cheaper plan over the same relations never raises the cost
    of its ancestors, so the result is never worse than GOO.  On timeout the
    current tree is returned with ``stats.timed_out`` set.
    """
    _check_k(k)
    budget = _Budget(timeout, workers)
    model = _model(graph, cost)
    stats = RunStats()
    root = _to_nodes(greedy_join(model, model.leaves()))
    while root.unit is None:
        if budget.expired():
            stats.timed_out = True
            break
        order = _refresh(root, model)
        target = max(
            (node for node in order if 1 < node.units <= k),
            key=lambda node: (node.plan.cost, node.units, -node.plan.relations),
        )
        try:
            best = _exact(model, _units_of(target), stats, budget)
        except OptimizerTimeout:
            stats.timed_out = True
            break
        target.unit, target.left, target.right = best, None, None
    _refresh(root, model)
    stats.elapsed = budget.elapsed()
    return OptimizerResult(root.plan, stats, "idp2")


# ---------------------------------------------------------------------------
# UnionDP


class UnionFind:
    """Disjoint sets over ``0..n-1`` with member bitmasks and sizes per root."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.size = [1] * n
        self.members: list[RelSet] = [1 << i for i in range(n)]

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        if self.rank[a] < self.rank[b]:
            a, b = b, a
        self.parent[b] = a
        if self.rank[a] == self.rank[b]:
            self.rank[a] += 1
        self.size[a] += self.size[b]
        self.members[a] |= self.members[b]
        return a

    def groups(self) -> list[RelSet]:
        """Member sets of all roots, ordered by their lowest member."""
        return sorted((self.members[r] for r in range(len(self.parent)) if self.parent[r] == r), key=lowest)


@dataclass(frozen=True)
class CompositeNode:
    relations: RelSet
    plan: Plan


@dataclass(frozen=True)
class CompositeGraph:
    nodes: tuple[CompositeNode, ...]
    edges: tuple[EdgeInfo, ...]

    @property
    def n(self) -> int:
        return len(self.nodes)

    def units(self) -> list[Plan]:
        return [node.plan for node in self.nodes]


def contract(graph: QueryGraph, partitions: list[RelSet], subplans: list[Plan]) -> CompositeGraph:
    """One node per partition; the original edges between two partitions are
    merged into one edge whose selectivity is their product (ascending order)."""
    if len(partitions) != len(subplans):
        raise ContractViolation("one subplan per partition is required")
    owner = [-1] * graph.n
    for p, (part, plan) in enumerate(zip(partitions, subplans)):
        if plan.relations != part:
            raise ContractViolation("a subplan does not cover its partition")
        rest = part
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            if owner[i] >= 0:
                raise ContractViolation("partitions overlap")
            owner[i] = p
            rest ^= low
    if min(owner) < 0:
        raise ContractViolation("partitions do not cover the graph")
    merged: dict[tuple[int, int], float] = {}
    for e in graph.edges:
        a, b = owner[e.u], owner[e.v]
        if a != b:
            key = (min(a, b), max(a, b))
            merged[key] = merged.get(key, 1.0) * e.selectivity
    nodes = tuple(CompositeNode(part, plan) for part, plan in zip(partitions, subplans))
    edges = tuple(EdgeInfo(a, b, sel) for (a, b), sel in sorted(merged.items()))
    return CompositeGraph(nodes, edges)


def partition(model: CostModel, cg: CompositeGraph, k: int) -> list[RelSet]:
    """Union-find partitioning of composite nodes into groups of at most ``k``.

    Edges are taken in increasing order of the combined size of the two sets
    they connect, then edge weight, then edge index; sizes are re-read after
    every union so stale heap entries are pushed back with their new key.
    Returns the groups as bitmasks over node indices.
    """
    uf = UnionFind(cg.n)
    units = cg.units()
    weights = [model.edge_weight(units[e.u], units[e.v]) for e in cg.edges]
    heap = [(2, w, idx) for idx, w in enumerate(weights)]
    heapq.heapify(heap)
    while heap:
        size, w, idx = heapq.heappop(heap)
        e = cg.edges[idx]
        a, b = uf.find(e.u), uf.find(e.v)
        if a == b:
            continue
        current = uf.size[a] + uf.size[b]
        if current > k:
            continue  # sets only grow
        if current != size:
            heapq.heappush(heap, (current, w, idx))
            continue
        uf.union(a, b)
    return uf.groups()


def uniondp(
    graph: QueryGraph,
    k: int = DEFAULT_K,
    *,
    cost: CostKind | str | CostModel = DEFAULT_COST_KIND,
    timeout: float | None = None,
    workers: int = 1,
) -> OptimizerResult:
    """Partition into groups of at most ``k`` nodes, optimise each group with
    MPDP, contract every group into one composite node, and repeat until at
    most ``k`` nodes remain; the last graph is solved exactly.

    A timeout returns no plan and ``stats.timed_out = True``.
    """
    _check_k(k)
    budget = _Budget(timeout, workers)
    model = _model(graph, cost)
    stats = RunStats()
    leaves = model.leaves()
    cg = contract(graph, [leaf.relations for leaf in leaves], leaves)
    try:
        while cg.n > k:
            groups = partition(model, cg, k)
            parts, plans = [], []
            for group in groups:
                members = [cg.nodes[i] for i in range(cg.n) if group >> i & 1]
                parts.append(sum(node.relations for node in members))
                plans.append(_exact(model, [node.plan for node in members], stats, budget))
            cg = contract(graph, parts, plans)
        plan = _exact(model, cg.units(), stats, budget)
    except OptimizerTimeout:
        stats.timed_out = True
        stats.elapsed = budget.elapsed()
        return OptimizerResult(None, stats, "uniondp")
    stats.elapsed = budget.elapsed()
    return OptimizerResult(plan, stats, "uniondp")


HEURISTICS = {"goo": goo, "idp2": idp2, "uniondp": uniondp}
