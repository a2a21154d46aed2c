"""Join graphs and the set-level graph primitives used by every optimizer."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContractViolation, DisconnectedGraphError
from .relset import RelSet, full_set, lowest, members


@dataclass(frozen=True)
class RelationInfo:
    name: str
    base_cardinality: float
    selection_factor: float = 1.0

    def __post_init__(self) -> None:
        if not self.base_cardinality >= 1:
            raise ContractViolation(
                f"relation {self.name!r}: cardinality {self.base_cardinality} < 1"
            )
        if not 0 < self.selection_factor <= 1:
            raise ContractViolation(
                f"relation {self.name!r}: selection factor {self.selection_factor} "
                "outside (0, 1]"
            )


@dataclass(frozen=True)
class EdgeInfo:
    u: int
    v: int
    selectivity: float

    def __post_init__(self) -> None:
        if not self.u < self.v:
            raise ContractViolation(f"edge ({self.u}, {self.v}) must have u < v")
        if not 0 < self.selectivity <= 1:
            raise ContractViolation(
                f"edge ({self.u}, {self.v}): selectivity {self.selectivity} "
                "outside (0, 1]"
            )


class AdjacencyIndex:
    """Bitmask adjacency with byte-indexed neighbourhood tables.

    ``neighbors`` ORs one precomputed table row per byte of the argument, so
    its cost grows with ``n / 8`` rather than with the size of the set.
    """

    def __init__(self, adjacency: Sequence[int]):
        self.adjacency = tuple(adjacency)
        self.n = len(self.adjacency)
        self.nbytes = (self.n + 7) // 8
        tables = []
        for b in range(self.nbytes):
            row = [0] * 256
            for byte in range(1, 256):
                low = byte & -byte
                v = 8 * b + low.bit_length() - 1
                row[byte] = row[byte ^ low] | (self.adjacency[v] if v < self.n else 0)
            tables.append(row)
        self._tables = tables

    @cached_property
    def table_array(self) -> np.ndarray:
        """Neighbourhood tables as a ``(nbytes, 256)`` uint64 array (n <= 64)."""
        return np.array(self._tables, dtype=np.uint64)

    def neighbors(self, s: RelSet) -> RelSet:
        """Vertices adjacent to ``s`` that are not in ``s``."""
        out = 0
        shift = 0
        for row in self._tables:
            if not s >> shift:
                break
            out |= row[(s >> shift) & 0xFF]
            shift += 8
        return out & ~s

    def grow(self, source: RelSet, restriction: RelSet) -> RelSet:
        """Vertices of ``restriction`` reachable from ``source`` inside it."""
        if not source:
            raise ContractViolation("grow needs a nonempty source set")
        reach = source
        frontier = source
        tables = self._tables
        while frontier:
            nb = 0
            shift = 0
            for row in tables:
                if not frontier >> shift:
                    break
                nb |= row[(frontier >> shift) & 0xFF]
                shift += 8
            frontier = nb & restriction & ~reach
            reach |= frontier
        return reach

    def is_connected(self, s: RelSet) -> bool:
        if not s:
            return False
        return self.grow(s & -s, s) == s

    def is_ccp_pair(self, left: RelSet, right: RelSet) -> bool:
        return bool(
            left
            and right
            and not left & right
            and self.is_connected(left)
            and self.is_connected(right)
            and self.neighbors(left) & right
        )

    def induced_edge_count(self, s: RelSet) -> int:
        adj = self.adjacency
        total = 0
        rest = s
        while rest:
            low = rest & -rest
            total += (adj[low.bit_length() - 1] & s).bit_count()
            rest ^= low
        return total // 2

    def find_blocks(self, s: RelSet) -> list[RelSet]:
        """Biconnected components (as vertex sets) of the subgraph induced by ``s``.

        A singleton has no blocks.  When the induced subgraph is a tree every
        edge is its own block and the DFS is skipped.
        """
        size = s.bit_count()
        if size < 2:
            if not s:
                raise DisconnectedGraphError("find_blocks on an empty set")
            return []
        adj = self.adjacency
        if self.induced_edge_count(s) == size - 1:
            if not self.is_connected(s):
                raise DisconnectedGraphError("find_blocks on a disconnected set")
            blocks = []
            rest = s
            while rest:
                low = rest & -rest
                higher = adj[low.bit_length() - 1] & s & ~((low << 1) - 1)
                while higher:
                    hb = higher & -higher
                    blocks.append(low | hb)
                    higher ^= hb
                rest ^= low
            return blocks
        return self._hopcroft_tarjan(s)

    def _hopcroft_tarjan(self, s: RelSet) -> list[RelSet]:
        adj = self.adjacency
        root = lowest(s)
        disc = {root: 0}
        low = {root: 0}
        counter = 1
        blocks: list[RelSet] = []
        edge_stack: list[tuple[int, int]] = []
        # frames: (vertex, parent, remaining neighbours in s)
        stack = [(root, -1, adj[root] & s)]
        while stack:
            v, parent, pending = stack[-1]
            if pending:
                bit = pending & -pending
                stack[-1] = (v, parent, pending ^ bit)
                w = bit.bit_length() - 1
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    edge_stack.append((v, w))
                    stack.append((w, v, adj[w] & s))
                elif w != parent and disc[w] < disc[v]:
                    edge_stack.append((v, w))
                    if disc[w] < low[v]:
                        low[v] = disc[w]
                continue
            stack.pop()
            if parent < 0:
                continue
            if low[v] < low[parent]:
                low[parent] = low[v]
            if low[v] >= disc[parent]:
                block = 0
                while True:
                    a, b = edge_stack.pop()
                    block |= (1 << a) | (1 << b)
                    if (a, b) == (parent, v):
                        break
                blocks.append(block)
        if len(disc) != s.bit_count():
            raise DisconnectedGraphError("find_blocks on a disconnected set")
        return blocks


@dataclass(frozen=True)
class QueryGraph:
    """Relations plus undirected inner-join edges; immutable after construction."""

    relations: tuple[RelationInfo, ...]
    edges: tuple[EdgeInfo, ...]
    adjacency: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(
        self,
        relations: Sequence[RelationInfo],
        edges: Sequence[EdgeInfo],
        *,
        require_connected: bool = True,
    ):
        relations = tuple(relations)
        edges = tuple(sorted(edges, key=lambda e: (e.u, e.v)))
        n = len(relations)
        if n < 1:
            raise ContractViolation("a query needs at least one relation")
        adjacency = [0] * n
        for e in edges:
            if e.v >= n:
                raise ContractViolation(f"edge ({e.u}, {e.v}) references a missing relation")
            if adjacency[e.u] >> e.v & 1:
                raise ContractViolation(f"duplicate edge ({e.u}, {e.v})")
            adjacency[e.u] |= 1 << e.v
            adjacency[e.v] |= 1 << e.u
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", tuple(adjacency))
        if require_connected and not self.index.is_connected(full_set(n)):
            raise DisconnectedGraphError("the join graph is not connected")

    @property
    def n(self) -> int:
        return len(self.relations)

    @property
    def all_relations(self) -> RelSet:
        return full_set(self.n)

    @cached_property
    def index(self) -> AdjacencyIndex:
        return AdjacencyIndex(self.adjacency)

    @cached_property
    def selectivity(self) -> dict[tuple[int, int], float]:
        return {(e.u, e.v): e.selectivity for e in self.edges}

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def induced_edges(self, s: RelSet) -> list[EdgeInfo]:
        return [e for e in self.edges if s >> e.u & 1 and s >> e.v & 1]

    def relation_names(self, s: RelSet) -> list[str]:
        return [self.relations[i].name for i in members(s)]


def neighbors(s: RelSet, g: QueryGraph) -> RelSet:
    return g.index.neighbors(s)


def grow(source: RelSet, restriction: RelSet, g: QueryGraph) -> RelSet:
    if source & ~restriction:
        raise ContractViolation("grow source must lie inside the restriction")
    return g.index.grow(source, restriction)


def is_connected(s: RelSet, g: QueryGraph) -> bool:
    return g.index.is_connected(s)


def is_ccp_pair(left: RelSet, right: RelSet, g: QueryGraph) -> bool:
    return g.index.is_ccp_pair(left, right)


def find_blocks(s: RelSet, g: QueryGraph) -> list[RelSet]:
    return g.index.find_blocks(s)
