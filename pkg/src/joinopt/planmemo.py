"""Join trees, the level-organised DP memo table, and run statistics."""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from typing import Any

from .errors import IncompleteMemoError
from .relset import RelSet, format_relset, popcount

# A memo entry is ``(cost, left, right, cardinality)``.  Comparing entries as
# tuples applies the plan tie-break rule: lower cost, then the smaller left
# child set, then the smaller right child set.  Leaves use ``left = right = 0``.
MemoEntry = tuple[float, RelSet, RelSet, float]


@dataclass(frozen=True, eq=False)
class Plan:
    """A binary join tree node.

    Leaves carry the index of their base relation in ``relation``.  A plan used
    as a leaf of a sub-problem (a composite node or a temporary table) keeps
    its own children, so nesting it under new joins expands it in place.
    """

    relations: RelSet
    cardinality: float
    cost: float
    left: Plan | None = None
    right: Plan | None = None
    relation: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def walk(self) -> Iterator[Plan]:
        """Pre-order traversal without recursion (left-deep trees can be deep)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.left is not None:
                stack.append(node.right)
                stack.append(node.left)

    def leaf_count(self) -> int:
        return sum(1 for node in self.walk() if node.is_leaf)

    def join_count(self) -> int:
        return sum(1 for node in self.walk() if not node.is_leaf)

    def to_text(self, names: Sequence[str] | None = None) -> str:
        return plan_to_text(self, names)

    def to_dict(self, names: Sequence[str] | None = None) -> dict[str, Any]:
        return plan_to_dict(self, names)


def _postorder(plan: Plan) -> list[Plan]:
    order = []
    stack = [(plan, False)]
    while stack:
        node, done = stack.pop()
        if done or node.is_leaf:
            order.append(node)
        else:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
    return order


def plan_to_text(plan: Plan, names: Sequence[str] | None = None) -> str:
    """Nested parenthesised form, e.g. ``((R0 ⋈ R2) ⋈ R1)``."""
    text: dict[int, str] = {}
    for node in _postorder(plan):
        if node.is_leaf:
            text[id(node)] = names[node.relation] if names else f"R{node.relation}"
        else:
            text[id(node)] = f"({text.pop(id(node.left))} ⋈ {text.pop(id(node.right))})"
    return text[id(plan)]


def plan_to_dict(plan: Plan, names: Sequence[str] | None = None) -> dict[str, Any]:
    out: dict[int, dict[str, Any]] = {}
    for node in _postorder(plan):
        d: dict[str, Any] = {"cost": node.cost, "cardinality": node.cardinality}
        if node.is_leaf:
            d["relation"] = names[node.relation] if names else f"R{node.relation}"
            d["index"] = node.relation
        else:
            d["left"] = out.pop(id(node.left))
            d["right"] = out.pop(id(node.right))
        out[id(node)] = d
    return out[id(plan)]


def recompute_plan(plan: Plan, model) -> Plan:
    """Rebuild ``plan`` bottom-up with ``model``, from its base-relation leaves."""
    built: dict[int, Plan] = {}
    for node in _postorder(plan):
        if node.is_leaf:
            built[id(node)] = model.leaf(node.relation)
        else:
            built[id(node)] = model.join(built.pop(id(node.left)), built.pop(id(node.right)))
    return built[id(plan)]


def check_plan(plan: Plan, graph) -> None:
    """Raise ``AssertionError`` unless every join is a CCP pair of ``graph``."""
    index = graph.index
    for node in plan.walk():
        if node.is_leaf:
            assert node.relations == 1 << node.relation
        else:
            l, r = node.left.relations, node.right.relations
            assert l | r == node.relations, "join set is not the union of its inputs"
            assert index.is_ccp_pair(l, r), f"{format_relset(l)} ⋈ {format_relset(r)} is not a CCP pair"


@dataclass
class RunStats:
    evaluated_counter: int = 0
    ccp_counter: int = 0
    elapsed: float = 0.0
    timed_out: bool = False

    def __post_init__(self) -> None:
        assert self.ccp_counter <= self.evaluated_counter


class MemoTable:
    """Best entry per relation set, kept in one dictionary per set size.

    Finishing level ``i`` never touches the dictionaries of smaller sizes, so
    readers of lower levels need no synchronisation.
    """

    def __init__(self, n: int):
        self.n = n
        self.levels: list[dict[RelSet, MemoEntry]] = [{} for _ in range(n + 1)]

    def __contains__(self, s: RelSet) -> bool:
        return s in self.levels[popcount(s)]

    def __len__(self) -> int:
        return sum(len(level) for level in self.levels)

    def get(self, s: RelSet) -> MemoEntry | None:
        return self.levels[popcount(s)].get(s)

    def seed(self, s: RelSet, cost: float, cardinality: float) -> None:
        self.levels[popcount(s)][s] = (cost, 0, 0, cardinality)

    def update(self, s: RelSet, entry: MemoEntry) -> bool:
        level = self.levels[popcount(s)]
        current = level.get(s)
        if current is None or entry < current:
            level[s] = entry
            return True
        return False


def memo_update(memo: MemoTable, candidate: Plan) -> bool:
    """Store ``candidate`` if it beats the current entry for its set."""
    if candidate.is_leaf:
        entry = (candidate.cost, 0, 0, candidate.cardinality)
    else:
        entry = (
            candidate.cost,
            candidate.left.relations,
            candidate.right.relations,
            candidate.cardinality,
        )
    return memo.update(candidate.relations, entry)


def extract_tree(
    memo: MemoTable,
    s: RelSet,
    leaf: Callable[[int], Plan] | Sequence[Plan] | None = None,
    relations: Callable[[RelSet], RelSet] | None = None,
) -> Plan:
    """Rebuild the join tree for ``s`` from the memo.

    ``leaf`` supplies the plan for a singleton index (a sequence or callable);
    by default a bare leaf with the memo's cost and cardinality is created.
    ``relations`` maps memo sets to the sets stored on the join nodes (for
    memos whose indices stand for composite leaves).
    """
    if isinstance(leaf, Sequence):
        leaves = leaf
        leaf = leaves.__getitem__

    def build(t: RelSet) -> Plan:
        entry = memo.get(t)
        if entry is None:
            raise IncompleteMemoError(f"no memo entry for {format_relset(t)}")
        cost, left, right, card = entry
        if not left:
            i = t.bit_length() - 1
            return leaf(i) if leaf is not None else Plan(t, card, cost, relation=i)
        own = relations(t) if relations is not None else t
        return Plan(own, card, cost, left=build(left), right=build(right))

    return build(s)
