from __future__ import annotations

import pytest

from joinopt import EdgeInfo, QueryGraph, RelationInfo


def make_graph(n: int, edges, cards=None, sel: float = 0.1) -> QueryGraph:
    cards = cards or [10.0 * (i + 1) for i in range(n)]
    rels = [RelationInfo(f"R{i}", float(c)) for i, c in enumerate(cards)]
    return QueryGraph(rels, [EdgeInfo(min(u, v), max(u, v), sel) for u, v in edges])


# 1-based vertex labels as drawn in the figures, shifted to 0-based
CYCLIC_EDGES = [(1, 2), (2, 3), (3, 4), (1, 4), (4, 5), (5, 9), (6, 7), (7, 8), (8, 9), (6, 9)]
TREE_EDGES = [(1, 2), (2, 3), (2, 4), (4, 5), (5, 6), (6, 7), (6, 8)]


@pytest.fixture
def cyclic_graph() -> QueryGraph:
    """Two 4-cycles joined by a path of two bridges through cut vertices 4 and 5 and 9."""
    return make_graph(9, [(u - 1, v - 1) for u, v in CYCLIC_EDGES])


@pytest.fixture
def tree_graph() -> QueryGraph:
    return make_graph(8, [(u - 1, v - 1) for u, v in TREE_EDGES])


def star(n: int) -> list[tuple[int, int]]:
    return [(0, i) for i in range(1, n)]


def chain(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def clique(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


# (criterion, passed, detail) rows filled in by test_acceptance
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
