"""Cardinality estimation and join costing.

Every optimizer compares plans through a :class:`CostModel`, so the numbers
they report are produced by one code path.  Cardinalities are a function of
the relation set alone and are always evaluated in one canonical order
(relations ascending, each followed by its edges to lower members), which
makes them bit-identical however the set was reached.
"""

from __future__ import annotations

from enum import Enum

from .errors import ContractViolation
from .planmemo import Plan
from .querygraph import QueryGraph
from .relset import RelSet


class CostKind(str, Enum):
    C_OUT = "c_out"
    HASH_JOIN = "hash_join"


DEFAULT_COST_KIND = CostKind.HASH_JOIN


def estimate_cardinality(s: RelSet, g: QueryGraph) -> float:
    """Product of filtered base cardinalities times every induced edge selectivity.

    Factors are applied in one fixed order: relations ascending, each followed
    by the selectivities of its induced edges to lower-numbered members
    (ascending).  Interleaving keeps long products of key-joined relations
    near the final magnitude instead of overflowing first.
    """
    rels = g.relations
    adj = g.adjacency
    sel = g.selectivity
    card = 1.0
    seen = 0
    rest = s
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        r = rels[v]
        card *= r.base_cardinality * r.selection_factor
        lower = adj[v] & seen
        while lower:
            lb = lower & -lower
            card *= sel[(lb.bit_length() - 1, v)]
            lower ^= lb
        seen |= low
        rest ^= low
    return card


def c_out_cost(lcost: float, lcard: float, rcost: float, rcard: float, card: float) -> float:
    return lcost + rcost + card


def hash_join_cost(lcost: float, lcard: float, rcost: float, rcard: float, card: float) -> float:
    # grouped as (l + r) + (l + r) so swapping the inputs is bit-exact
    return (lcost + rcost) + (lcard + rcard) + card


_COMBINE = {CostKind.C_OUT: c_out_cost, CostKind.HASH_JOIN: hash_join_cost}


class CostModel:
    """Costing for one query graph under one cost kind.

    Cardinalities are memoised per relation set; the cache only grows, and
    identical inputs always produce identical outputs.
    """

    def __init__(self, graph: QueryGraph, kind: CostKind | str = DEFAULT_COST_KIND):
        self.graph = graph
        self.kind = CostKind(kind)
        self.combine = _COMBINE[self.kind]
        self._cards: dict[RelSet, float] = {}

    def cardinality(self, s: RelSet) -> float:
        card = self._cards.get(s)
        if card is None:
            card = self._cards[s] = estimate_cardinality(s, self.graph)
        return card

    def leaf(self, i: int) -> Plan:
        return Plan(relations=1 << i, cardinality=self.cardinality(1 << i), cost=0.0, relation=i)

    def leaves(self) -> list[Plan]:
        return [self.leaf(i) for i in range(self.graph.n)]

    def join_cost(self, left: Plan, right: Plan) -> float:
        if left.relations & right.relations:
            raise ContractViolation("join inputs overlap")
        card = self.cardinality(left.relations | right.relations)
        return self.combine(left.cost, left.cardinality, right.cost, right.cardinality, card)

    def join(self, left: Plan, right: Plan) -> Plan:
        s = left.relations | right.relations
        cost = self.join_cost(left, right)
        return Plan(relations=s, cardinality=self.cardinality(s), cost=cost, left=left, right=right)

    def edge_weight(self, left: Plan, right: Plan) -> float:
        """Weight of an edge: the cost of joining the current plans on its two sides."""
        return self.join_cost(left, right)


def join_cost(left: Plan, right: Plan, g: QueryGraph, kind: CostKind | str = DEFAULT_COST_KIND) -> float:
    return CostModel(g, kind).join_cost(left, right)
