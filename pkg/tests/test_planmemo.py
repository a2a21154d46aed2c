import pytest

from joinopt import CostModel, MemoTable, Plan, check_plan, extract_tree, recompute_plan
from joinopt.errors import IncompleteMemoError
from joinopt.planmemo import RunStats, memo_update

from conftest import make_graph


@pytest.fixture
def chain3():
    return make_graph(3, [(0, 1), (1, 2)])


def test_plan_text_and_dict(chain3):
    model = CostModel(chain3)
    plan = model.join(model.join(model.leaf(0), model.leaf(1)), model.leaf(2))
    assert plan.to_text() == "((R0 ⋈ R1) ⋈ R2)"
    assert plan.to_text(["a", "b", "c"]) == "((a ⋈ b) ⋈ c)"
    d = plan.to_dict()
    assert d["right"] == {"cost": 0.0, "cardinality": 30.0, "relation": "R2", "index": 2}
    assert d["cost"] == plan.cost
    assert plan.leaf_count() == 3 and plan.join_count() == 2


def test_deep_plans_do_not_recurse():
    n = 1500
    g = make_graph(n, [(i, i + 1) for i in range(n - 1)], cards=[10.0] * n, sel=0.1)
    model = CostModel(g)
    plan = model.leaf(0)
    for i in range(1, n):
        plan = model.join(plan, model.leaf(i))
    assert recompute_plan(plan, model).cost == plan.cost
    assert plan.to_text().count("⋈") == n - 1
    assert plan.leaf_count() == n


def test_memo_tie_break_prefers_smaller_left_set():
    memo = MemoTable(3)
    assert memo.update(0b111, (5.0, 0b110, 0b001, 1.0))
    assert memo.update(0b111, (5.0, 0b011, 0b100, 1.0))
    assert not memo.update(0b111, (5.0, 0b100, 0b011, 1.0))
    assert memo.update(0b111, (4.0, 0b100, 0b011, 1.0))
    assert memo.get(0b111)[1] == 0b100
    assert 0b111 in memo and 0b011 not in memo


def test_extract_tree_and_incomplete_memo(chain3):
    model = CostModel(chain3)
    memo = MemoTable(3)
    for i in range(3):
        memo_update(memo, model.leaf(i))
    p01 = model.join(model.leaf(0), model.leaf(1))
    memo_update(memo, p01)
    full = model.join(p01, model.leaf(2))
    memo_update(memo, full)
    got = extract_tree(memo, 0b111, model.leaves())
    assert got.to_text() == full.to_text() and got.cost == full.cost
    bare = extract_tree(memo, 0b111)
    assert bare.left.left.relation == 0
    del memo.levels[2][0b011]
    with pytest.raises(IncompleteMemoError):
        extract_tree(memo, 0b111)


def test_check_plan_rejects_cross_products(chain3):
    model = CostModel(chain3)
    bad = Plan(0b101, 1.0, 1.0, left=model.leaf(0), right=model.leaf(2))
    with pytest.raises(AssertionError):
        check_plan(bad, chain3)


def test_runstats_invariant():
    with pytest.raises(AssertionError):
        RunStats(evaluated_counter=1, ccp_counter=2)
