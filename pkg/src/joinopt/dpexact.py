"""Exact join-order dynamic programs: DPSIZE, DPSUB, MPDP:Tree and MPDP.

DPSUB, MPDP:Tree and MPDP share one level-synchronous driver
(:func:`level_pipeline`).  For each level ``i`` it

1. *unranks* the ``C(n, i)`` candidate sets in work items of
   :data:`WORK_ITEM_SIZE` consecutive colex ranks,
2. *filters* out the disconnected ones (vectorised over the work item),
3. *evaluates* the join pairs of each remaining set with the algorithm's
   enumeration rule and *prunes* to the best pair per set, and
4. *scatters* the winners into the memo once the work item is done.

Work items read only memo levels ``< i`` and every set is owned by exactly one
work item, so the result does not depend on how items are spread over
workers.  With ``workers > 1`` each level forks a process pool that inherits
the finished levels copy-on-write.
"""

from __future__ import annotations

import multiprocessing
import os
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .costmodel import CostKind, CostModel, DEFAULT_COST_KIND
from .errors import CapacityError, ContractViolation, NotATreeError, OptimizerTimeout
from .planmemo import MemoEntry, MemoTable, Plan, RunStats, extract_tree
from .querygraph import AdjacencyIndex, QueryGraph
from .relset import EXACT_CAPACITY, RelSet, full_set, iter_proper_subsets, iter_subsets, unrank_combinations

WORK_ITEM_SIZE = 1024
ORACLE_CAPACITY = 14

ALGORITHMS = ("dpsize", "dpsub", "mpdp_tree", "mpdp")


@dataclass
class OptimizerResult:
    plan: Plan | None
    stats: RunStats = field(default_factory=RunStats)
    algorithm: str = ""

    @property
    def cost(self) -> float | None:
        return None if self.plan is None else self.plan.cost


class JoinProblem:
    """An exact-DP instance: ``n`` leaf plans and the adjacency among them.

    For a plain query the leaves are the base relations.  The heuristics also
    build problems whose leaves are already-optimised subplans (composite
    nodes, temporary tables); cardinalities of leaf sets are then evaluated on
    the union of the underlying base relations, so costs stay identical to a
    bottom-up recomputation of the expanded plan.
    """

    def __init__(self, model: CostModel, leaves: list[Plan], adjacency: list[int]):
        self.model = model
        self.leaves = leaves
        self.n = len(leaves)
        self.index = AdjacencyIndex(adjacency)
        self._identity = all(p.relations == 1 << i for i, p in enumerate(leaves))
        self._cards: dict[RelSet, float] = {}

    @classmethod
    def from_graph(cls, graph: QueryGraph, cost: CostKind | str | CostModel = DEFAULT_COST_KIND) -> JoinProblem:
        model = cost if isinstance(cost, CostModel) else CostModel(graph, cost)
        return cls(model, model.leaves(), list(graph.adjacency))

    @classmethod
    def from_units(cls, model: CostModel, units: list[Plan]) -> JoinProblem:
        """Problem over ``units`` (disjoint subplans); two units are adjacent
        when a join edge of the underlying graph connects them."""
        gindex = model.graph.index
        owner = {}
        for i, u in enumerate(units):
            rest = u.relations
            while rest:
                low = rest & -rest
                owner[low.bit_length() - 1] = i
                rest ^= low
        adjacency = [0] * len(units)
        for i, u in enumerate(units):
            rest = gindex.neighbors(u.relations)
            while rest:
                low = rest & -rest
                j = owner.get(low.bit_length() - 1)
                if j is not None:
                    adjacency[i] |= 1 << j
                rest ^= low
        return cls(model, list(units), adjacency)

    def base_relations(self, s: RelSet) -> RelSet:
        if self._identity:
            return s
        out = 0
        leaves = self.leaves
        while s:
            low = s & -s
            out |= leaves[low.bit_length() - 1].relations
            s ^= low
        return out

    def cardinality(self, s: RelSet) -> float:
        if self._identity:
            return self.model.cardinality(s)
        card = self._cards.get(s)
        if card is None:
            card = self._cards[s] = self.model.cardinality(self.base_relations(s))
        return card

    def is_tree(self) -> bool:
        edges = sum(a.bit_count() for a in self.index.adjacency) // 2
        return edges == self.n - 1

    def new_memo(self) -> MemoTable:
        memo = MemoTable(self.n)
        for i, leaf in enumerate(self.leaves):
            memo.seed(1 << i, leaf.cost, leaf.cardinality)
        return memo


def _as_problem(source: QueryGraph | JoinProblem, cost) -> JoinProblem:
    problem = source if isinstance(source, JoinProblem) else JoinProblem.from_graph(source, cost)
    if problem.n > EXACT_CAPACITY:
        raise CapacityError(
            f"{problem.n} relations exceed the exact optimizers' capacity of {EXACT_CAPACITY}"
        )
    return problem


# ---------------------------------------------------------------------------
# per-set evaluation rules


class _Context:
    """Everything a work item needs; read-only while a level runs."""

    def __init__(self, problem: JoinProblem, memo: MemoTable, skip_last_block: bool = False):
        self.problem = problem
        self.memo = memo
        self.index = problem.index
        self.combine = problem.model.combine
        self.cardinality = problem.cardinality
        self.skip_last_block = skip_last_block

    def lookup(self, s: RelSet) -> MemoEntry:
        return self.memo.levels[s.bit_count()][s]


# Each rule returns (best entry or None, evaluated count, ccp count) for the
# connected set ``s``.  When ``pairs`` is a list, every CCP pair produced is
# appended to it as (left, right).


def _eval_dpsub(s: RelSet, ctx: _Context, pairs: list | None = None):
    index = ctx.index
    connected = index.is_connected
    neighbors = index.neighbors
    levels = ctx.memo.levels
    combine = ctx.combine
    card = ctx.cardinality(s)
    best = None
    evaluated = ccp = 0
    for left in iter_subsets(s):
        evaluated += 1
        right = s ^ left
        # CCP block: nonempty, connected, disjoint, adjacent
        if not right or not left:
            continue
        if not connected(left) or not connected(right):
            continue
        if left & right or not neighbors(left) & right:
            continue
        ccp += 1
        if pairs is not None:
            pairs.append((left, right))
        lc, _, _, lcard = levels[left.bit_count()][left]
        rc, _, _, rcard = levels[right.bit_count()][right]
        cand = (combine(lc, lcard, rc, rcard, card), left, right, card)
        if best is None or cand < best:
            best = cand
    return best, evaluated, ccp


def _eval_mpdp_tree(s: RelSet, ctx: _Context, pairs: list | None = None):
    index = ctx.index
    adj = index.adjacency
    grow = index.grow
    levels = ctx.memo.levels
    combine = ctx.combine
    card = ctx.cardinality(s)
    best = None
    evaluated = ccp = 0
    rest = s
    while rest:
        low = rest & -rest
        rest ^= low
        higher = adj[low.bit_length() - 1] & rest
        while higher:
            hb = higher & -higher
            higher ^= hb
            # removing the induced edge (low, hb) splits the subtree in two
            left = grow(low, s ^ hb)
            right = s ^ left
            for l, r in ((left, right), (right, left)):
                evaluated += 1
                ccp += 1
                if pairs is not None:
                    pairs.append((l, r))
                lc, _, _, lcard = levels[l.bit_count()][l]
                rc, _, _, rcard = levels[r.bit_count()][r]
                cand = (combine(lc, lcard, rc, rcard, card), l, r, card)
                if best is None or cand < best:
                    best = cand
    return best, evaluated, ccp


def _eval_mpdp(s: RelSet, ctx: _Context, pairs: list | None = None):
    index = ctx.index
    connected = index.is_connected
    neighbors = index.neighbors
    grow = index.grow
    levels = ctx.memo.levels
    combine = ctx.combine
    card = ctx.cardinality(s)
    best = None
    evaluated = ccp = 0
    blocks = index.find_blocks(s)
    if ctx.skip_last_block and len(blocks) > 1:
        blocks = blocks[:-1]
    for block in blocks:
        if block.bit_count() == 2:
            # a bridge: both single-vertex sides are CCP pairs, and one grow
            # yields the extension for both orientations
            lo = block & -block
            left = grow(lo, s ^ block ^ lo)
            right = s ^ left
            extended = ((left, right), (right, left))
            evaluated += 2
            ccp += 2
        else:
            extended = []
            for lb in iter_proper_subsets(block):
                evaluated += 1
                rb = block ^ lb
                if not connected(lb) or not connected(rb):
                    continue
                if not neighbors(lb) & rb:
                    continue
                ccp += 1
                # extend the block pair to a pair of s through the cut vertices
                left = grow(lb, s ^ rb)
                extended.append((left, s ^ left))
        for left, right in extended:
            if pairs is not None:
                pairs.append((left, right))
            lc, _, _, lcard = levels[left.bit_count()][left]
            rc, _, _, rcard = levels[right.bit_count()][right]
            cand = (combine(lc, lcard, rc, rcard, card), left, right, card)
            if best is None or cand < best:
                best = cand
    return best, evaluated, ccp


_RULES: dict[str, Callable] = {
    "dpsub": _eval_dpsub,
    "mpdp_tree": _eval_mpdp_tree,
    "mpdp": _eval_mpdp,
}


def set_pairs(source: QueryGraph | JoinProblem, s: RelSet, algorithm: str, memo: MemoTable | None = None):
    """CCP pairs a rule produces for one connected set ``s``.

    Returns ``(evaluated, pairs)``.  Without a memo, a complete exact run is
    performed first so the rule can read the lower levels.
    """
    problem = _as_problem(source, DEFAULT_COST_KIND)
    if memo is None:
        memo = exact_memo(problem)
    pairs: list[tuple[RelSet, RelSet]] = []
    _, evaluated, _ = _RULES[algorithm](s, _Context(problem, memo), pairs)
    return evaluated, pairs


def exact_memo(source: QueryGraph | JoinProblem, cost=DEFAULT_COST_KIND) -> MemoTable:
    """Complete memo of an MPDP run (every connected set filled)."""
    return _run_levels(_as_problem(source, cost), _RULES["mpdp"], 1, None, RunStats())


# ---------------------------------------------------------------------------
# level-synchronous driver


def connected_candidates(index: AdjacencyIndex, n: int, i: int, start: int, stop: int) -> list[RelSet]:
    """Unrank colex ranks ``[start, stop)`` of ``i``-subsets and keep the connected ones."""
    masks = unrank_combinations(np.arange(start, stop, dtype=np.int64), i, n)
    return [int(m) for m in masks[connected_array(index, masks)]]


def connected_array(index: AdjacencyIndex, masks: np.ndarray) -> np.ndarray:
    """Vectorised connectivity test: grow from each set's lowest member."""
    tables = index.table_array
    masks = np.asarray(masks, dtype=np.uint64)
    reach = masks & (~masks + np.uint64(1))
    shifts = [np.uint64(8 * b) for b in range(index.nbytes)]
    byte = np.uint64(0xFF)
    while True:
        nb = np.zeros_like(masks)
        for b, shift in enumerate(shifts):
            nb |= tables[b][(reach >> shift) & byte]
        grown = reach | (nb & masks)
        if np.array_equal(grown, reach):
            return reach == masks
        reach = grown


def _work_item(ctx: _Context, rule: Callable, i: int, start: int, stop: int):
    results = []
    evaluated = ccp = 0
    for s in connected_candidates(ctx.index, ctx.problem.n, i, start, stop):
        best, ev, cc = rule(s, ctx)
        evaluated += ev
        ccp += cc
        if best is not None:
            results.append((s, best))
    return results, evaluated, ccp


_FORK_STATE: tuple | None = None


def _forked_work_item(task):
    ctx, rule = _FORK_STATE
    return _work_item(ctx, rule, *task)


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise OptimizerTimeout


def _run_parallel(worker_fn, tasks, workers, state, merge, deadline) -> None:
    global _FORK_STATE
    _FORK_STATE = state
    try:
        with multiprocessing.get_context("fork").Pool(min(workers, len(tasks))) as pool:
            for result in pool.imap_unordered(worker_fn, tasks):
                merge(result)
                _check_deadline(deadline)
    finally:
        _FORK_STATE = None


def _run_levels(
    problem: JoinProblem,
    rule: Callable,
    workers: int,
    deadline: float | None,
    stats: RunStats,
    *,
    skip_last_block: bool = False,
) -> MemoTable:
    n = problem.n
    memo = problem.new_memo()
    ctx = _Context(problem, memo, skip_last_block)

    def merge(result):
        entries, ev, cc = result
        stats.evaluated_counter += ev
        stats.ccp_counter += cc
        for s, entry in entries:
            memo.update(s, entry)

    for i in range(2, n + 1):
        _check_deadline(deadline)
        total = comb(n, i)
        tasks = [(i, start, min(start + WORK_ITEM_SIZE, total)) for start in range(0, total, WORK_ITEM_SIZE)]
        if workers > 1 and len(tasks) > 1 and _fork_available():
            _run_parallel(_forked_work_item, tasks, workers, (ctx, rule), merge, deadline)
        else:
            for task in tasks:
                merge(_work_item(ctx, rule, *task))
                _check_deadline(deadline)
    return memo


def _fork_available() -> bool:
    return "fork" in multiprocessing.get_all_start_methods()


def _deadline(timeout: float | None) -> float | None:
    return None if timeout is None else time.monotonic() + timeout


def _finish(problem: JoinProblem, memo: MemoTable, stats: RunStats, algorithm: str, started: float) -> OptimizerResult:
    plan = extract_tree(memo, full_set(problem.n), problem.leaves, problem.base_relations)
    stats.elapsed = time.monotonic() - started
    return OptimizerResult(plan, stats, algorithm)


def _timed_out(stats: RunStats, algorithm: str, started: float) -> OptimizerResult:
    stats.elapsed = time.monotonic() - started
    stats.timed_out = True
    return OptimizerResult(None, stats, algorithm)


def default_workers() -> int:
    return int(os.environ.get("JOINOPT_WORKERS", "1"))


def level_pipeline(
    source: QueryGraph | JoinProblem,
    algorithm: str,
    *,
    cost: CostKind | str | CostModel = DEFAULT_COST_KIND,
    workers: int = 1,
    timeout: float | None = None,
    skip_last_block: bool = False,
) -> OptimizerResult:
    """Run ``algorithm`` (``dpsub``, ``mpdp_tree`` or ``mpdp``) level by level.

    ``timeout`` is in seconds and is checked between levels and work items; a
    run that exceeds it returns no plan and ``stats.timed_out = True``.
    ``skip_last_block`` deliberately breaks MPDP (used to test the verifier).
    """
    if algorithm not in _RULES:
        raise ContractViolation(f"unknown pipeline algorithm {algorithm!r}")
    if workers < 1:
        raise ContractViolation("workers must be >= 1")
    problem = _as_problem(source, cost)
    if algorithm == "mpdp_tree" and not problem.is_tree():
        raise NotATreeError("mpdp_tree needs an acyclic join graph; use mpdp instead")
    started = time.monotonic()
    stats = RunStats()
    try:
        memo = _run_levels(
            problem, _RULES[algorithm], workers, _deadline(timeout), stats, skip_last_block=skip_last_block
        )
    except OptimizerTimeout:
        return _timed_out(stats, algorithm, started)
    return _finish(problem, memo, stats, algorithm, started)


def dpsub(source, *, cost=DEFAULT_COST_KIND, workers: int = 1, timeout: float | None = None) -> OptimizerResult:
    """Vertex-based enumeration: every subset of each connected set."""
    return level_pipeline(source, "dpsub", cost=cost, workers=workers, timeout=timeout)


def mpdp_tree(source, *, cost=DEFAULT_COST_KIND, workers: int = 1, timeout: float | None = None) -> OptimizerResult:
    """Edge-based enumeration for acyclic graphs: each induced edge, both orientations."""
    return level_pipeline(source, "mpdp_tree", cost=cost, workers=workers, timeout=timeout)


def mpdp(source, *, cost=DEFAULT_COST_KIND, workers: int = 1, timeout: float | None = None) -> OptimizerResult:
    """Vertex-based enumeration inside blocks, extended across cut vertices with grow."""
    return level_pipeline(source, "mpdp", cost=cost, workers=workers, timeout=timeout)


# ---------------------------------------------------------------------------
# DPSIZE


_DPSIZE_ITEM_PAIRS = 1 << 16


def _dpsize_item(ctx: _Context, size: int, lsize: int, start: int, stop: int):
    levels = ctx.memo.levels
    neighbors = ctx.index.neighbors
    combine = ctx.combine
    cardinality = ctx.cardinality
    llevel = levels[lsize]
    rlevel = levels[size - lsize]
    lefts = list(llevel)[start:stop]
    rights = list(rlevel)
    best: dict[RelSet, MemoEntry] = {}
    ccp = 0
    for left in lefts:
        nl = neighbors(left)
        lc, _, _, lcard = llevel[left]
        for right in rights:
            # both sides are memoised, hence nonempty and connected
            if left & right or not nl & right:
                continue
            ccp += 1
            s = left | right
            rc, _, _, rcard = rlevel[right]
            card = cardinality(s)
            cand = (combine(lc, lcard, rc, rcard, card), left, right, card)
            cur = best.get(s)
            if cur is None or cand < cur:
                best[s] = cand
    # overlapping and non-adjacent pairs are considered too
    return list(best.items()), len(lefts) * len(rights), ccp


def _forked_dpsize_item(task):
    ctx, _ = _FORK_STATE
    return _dpsize_item(ctx, *task)


def dpsize(
    source: QueryGraph | JoinProblem,
    *,
    cost: CostKind | str | CostModel = DEFAULT_COST_KIND,
    workers: int = 1,
    timeout: float | None = None,
) -> OptimizerResult:
    """Size-driven enumeration: pair every memo entry of size ``l`` with every
    entry of size ``s - l``, overlapping pairs included."""
    if workers < 1:
        raise ContractViolation("workers must be >= 1")
    problem = _as_problem(source, cost)
    started = time.monotonic()
    deadline = _deadline(timeout)
    stats = RunStats()
    memo = problem.new_memo()
    ctx = _Context(problem, memo)

    def merge(result):
        entries, ev, cc = result
        stats.evaluated_counter += ev
        stats.ccp_counter += cc
        for s, entry in entries:
            memo.update(s, entry)

    try:
        for size in range(2, problem.n + 1):
            _check_deadline(deadline)
            tasks = []
            for lsize in range(1, size):
                nleft = len(memo.levels[lsize])
                nright = len(memo.levels[size - lsize])
                step = max(1, _DPSIZE_ITEM_PAIRS // max(nright, 1))
                tasks += [(size, lsize, a, min(a + step, nleft)) for a in range(0, nleft, step)]
            if workers > 1 and len(tasks) > 1 and _fork_available():
                _run_parallel(_forked_dpsize_item, tasks, workers, (ctx, None), merge, deadline)
            else:
                for task in tasks:
                    merge(_dpsize_item(ctx, *task))
                    _check_deadline(deadline)
    except OptimizerTimeout:
        return _timed_out(stats, "dpsize", started)
    return _finish(problem, memo, stats, "dpsize", started)


OPTIMIZERS: dict[str, Callable[..., OptimizerResult]] = {
    "dpsize": dpsize,
    "dpsub": dpsub,
    "mpdp_tree": mpdp_tree,
    "mpdp": mpdp,
}


# ---------------------------------------------------------------------------
# brute-force oracles


def _connected_table(index: AdjacencyIndex, n: int) -> list[bool]:
    return [bool(s) and index.is_connected(s) for s in range(1 << n)]


def oracle_optimal(graph: QueryGraph, cost: CostKind | str | CostModel = DEFAULT_COST_KIND) -> Plan:
    """Optimal plan by plain memoised recursion over every split of every set.

    Independent of the level structure and enumeration rules above; uses the
    same cost functional and tie-break rule.
    """
    n = graph.n
    if n > ORACLE_CAPACITY:
        raise CapacityError(f"oracle_optimal refuses n={n} > {ORACLE_CAPACITY}")
    model = cost if isinstance(cost, CostModel) else CostModel(graph, cost)
    index = graph.index
    conn = _connected_table(index, n)
    best: dict[RelSet, MemoEntry] = {}

    def solve(s: RelSet) -> MemoEntry:
        entry = best.get(s)
        if entry is not None:
            return entry
        if s & (s - 1) == 0:
            entry = (0.0, 0, 0, model.cardinality(s))
        else:
            card = model.cardinality(s)
            entry = None
            left = (s - 1) & s
            while left:
                right = s ^ left
                if conn[left] and conn[right] and index.neighbors(left) & right:
                    lc, _, _, lcard = solve(left)
                    rc, _, _, rcard = solve(right)
                    cand = (model.combine(lc, lcard, rc, rcard, card), left, right, card)
                    if entry is None or cand < entry:
                        entry = cand
                left = (left - 1) & s
        best[s] = entry
        return entry

    solve(graph.all_relations)

    def build(s: RelSet) -> Plan:
        _, left, right, _ = best[s]
        if not left:
            return model.leaf(s.bit_length() - 1)
        return model.join(build(left), build(right))

    return build(graph.all_relations)


def oracle_ccp_count(graph: QueryGraph) -> int:
    """Ordered CCP pairs of the whole query, by exhaustive testing.

    Every disjoint pair of nonempty subsets is tested against the four CCP
    conditions (overlapping pairs fail the disjointness condition and are
    skipped without testing).
    """
    n = graph.n
    if n > ORACLE_CAPACITY:
        raise CapacityError(f"oracle_ccp_count refuses n={n} > {ORACLE_CAPACITY}")
    index = graph.index
    conn = _connected_table(index, n)
    everything = full_set(n)
    count = 0
    for left in range(1, 1 << n):
        if not conn[left]:
            continue
        nl = index.neighbors(left)
        rest = everything ^ left
        right = rest
        while right:
            if conn[right] and nl & right:
                count += 1
            right = (right - 1) & rest
    return count


# ---------------------------------------------------------------------------
# counting mode


def count_pairs(graph: QueryGraph, algorithm: str = "dpsub", *, chunk_bits: int = 20) -> RunStats:
    """EvaluatedCounter and CCP-Counter of a full run, without costing.

    Connected sets are found with the vectorised filter over all ``2^n``
    masks.  Per connected set ``S`` the counters are what the enumeration
    rules increment: DPSUB evaluates ``2^|S| - 1`` subsets; MPDP evaluates
    ``sum(2^|b| - 2)`` over the blocks ``b`` of ``S``.  The CCP count of ``S``
    is the number of block pairs passing the CCP checks.  When ``S`` induces a
    tree both MPDP numbers are ``2(|S| - 1)`` in closed form; other sets are
    enumerated block by block.
    """
    if algorithm not in ("dpsub", "mpdp"):
        raise ContractViolation("counting mode supports dpsub and mpdp")
    n = graph.n
    if n > 40:
        raise CapacityError("counting mode enumerates 2^n masks; n <= 40 supported")
    index = graph.index
    adj = np.array(graph.adjacency, dtype=np.uint64)
    stats = RunStats()
    started = time.monotonic()
    total = 1 << n
    step = 1 << min(chunk_bits, n)
    for start in range(0, total, step):
        masks = np.arange(start, min(start + step, total), dtype=np.uint64)
        size = np.bitwise_count(masks).astype(np.int64)
        masks, size = masks[size >= 2], size[size >= 2]
        keep = connected_array(index, masks)
        masks, size = masks[keep], size[keep]
        edges = np.zeros(masks.shape, dtype=np.int64)
        for v in range(n):
            inside = ((masks >> np.uint64(v)) & np.uint64(1)).astype(bool)
            edges += np.where(inside, np.bitwise_count(masks & adj[v]), 0)
        edges //= 2
        tree = edges == size - 1
        tree_sizes = np.bincount(size[tree], minlength=n + 1)
        for k, count in enumerate(tree_sizes.tolist()):
            stats.ccp_counter += count * 2 * (k - 1) if count else 0
            if algorithm == "mpdp" and count:
                stats.evaluated_counter += count * 2 * (k - 1)
        for s in masks[~tree].tolist():
            ev, cc = _block_counts(index, int(s))
            stats.ccp_counter += cc
            if algorithm == "mpdp":
                stats.evaluated_counter += ev
        if algorithm == "dpsub":
            for k, count in enumerate(np.bincount(size, minlength=n + 1).tolist()):
                stats.evaluated_counter += count * ((1 << k) - 1)
    stats.elapsed = time.monotonic() - started
    return stats


def _block_counts(index: AdjacencyIndex, s: RelSet) -> tuple[int, int]:
    evaluated = ccp = 0
    for block in index.find_blocks(s):
        for lb in iter_proper_subsets(block):
            evaluated += 1
            rb = block ^ lb
            if index.is_connected(lb) and index.is_connected(rb) and index.neighbors(lb) & rb:
                ccp += 1
    return evaluated, ccp
