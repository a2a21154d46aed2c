import json
import math

import pytest

from joinopt import GeneratorConfig, generate, read_query, write_query
from joinopt.errors import ContractViolation, QueryFormatError
from joinopt.workload import TOPOLOGIES, mixed_suite, query_from_dict, query_to_dict, schema_graph, snowflake_fanout


def test_star_shape():
    g = generate(GeneratorConfig("star", 4, seed=3))
    assert [(e.u, e.v) for e in g.edges] == [(0, 1), (0, 2), (0, 3)]
    assert g.relations[0].selection_factor == 1.0
    assert all(0.05 <= r.selection_factor <= 1.0 for r in g.relations[1:])


def test_chain_shape():
    g = generate(GeneratorConfig("chain", 5, seed=3))
    assert len(g.edges) == 4
    assert all(a.bit_count() <= 2 for a in g.adjacency)


def test_clique_shape():
    g = generate(GeneratorConfig("clique", 6))
    assert len(g.edges) == 15


@pytest.mark.parametrize("depth", [2, 3, 4])
@pytest.mark.parametrize("n", [2, 7, 30, 100])
def test_snowflake_depth(n, depth):
    g = generate(GeneratorConfig("snowflake", n, seed=1, depth=depth))
    assert g.is_tree()
    level = {0: 0}
    for e in g.edges:
        level[e.v] = level[e.u] + 1
    assert max(level.values()) <= depth
    fanout = snowflake_fanout(n, depth)
    assert max(a.bit_count() for a in g.adjacency) <= fanout + 1


def test_randomwalk_is_connected_and_may_cycle():
    cyclic = 0
    for seed in range(20):
        g = generate(GeneratorConfig("randomwalk", 20, seed=seed))
        assert g.n == 20
        assert g.index.is_connected(g.all_relations)
        cyclic += not g.is_tree()
    assert cyclic > 0


def test_schema_is_fixed():
    cards, fks = schema_graph()
    assert len(cards) == 56
    assert schema_graph() == (cards, fks)


def test_key_side_selectivity():
    g = generate(GeneratorConfig("chain", 6, seed=9))
    for e in g.edges:
        assert e.selectivity == 1.0 / g.relations[e.v].base_cardinality


@pytest.mark.parametrize("topology", TOPOLOGIES)
def test_generation_is_deterministic(topology):
    a = generate(GeneratorConfig(topology, 12, seed=42))
    b = generate(GeneratorConfig(topology, 12, seed=42))
    c = generate(GeneratorConfig(topology, 12, seed=43))
    assert query_to_dict(a) == query_to_dict(b)
    assert query_to_dict(a) != query_to_dict(c)
    for r in a.relations:
        assert r.base_cardinality >= 1 and r.base_cardinality == math.floor(r.base_cardinality)
    assert all(0 < e.selectivity <= 1 for e in a.edges)


def test_config_validation():
    with pytest.raises(ContractViolation):
        GeneratorConfig("ring", 5)
    with pytest.raises(ContractViolation):
        GeneratorConfig("star", 1)
    with pytest.raises(ContractViolation):
        GeneratorConfig("snowflake", 10, depth=5)
    with pytest.raises(ContractViolation):
        GeneratorConfig("randomwalk", 57)
    with pytest.raises(ContractViolation):
        GeneratorConfig("chain", 5, cardinality_range=(0.5, 10))


def test_roundtrip(tmp_path):
    for i, (_, g) in enumerate(mixed_suite(100, (2, 20), seed=7)):
        path = tmp_path / f"q{i}.json"
        write_query(g, path)
        back = read_query(path)
        assert back == g


def test_format_errors(tmp_path):
    good = query_to_dict(generate(GeneratorConfig("chain", 3, seed=1)))

    def load(data):
        path = tmp_path / "q.json"
        path.write_text(json.dumps(data) if not isinstance(data, str) else data)
        return read_query(path)

    with pytest.raises(QueryFormatError, match="relations"):
        load({"edges": []})
    with pytest.raises(QueryFormatError, match=r"edge \(0, 1\): selectivity"):
        load({**good, "edges": [{"left": 0, "right": 1, "selectivity": 0}]})
    with pytest.raises(QueryFormatError, match="duplicate"):
        load({**good, "edges": good["edges"] + good["edges"][:1]})
    with pytest.raises(QueryFormatError, match="left < right"):
        load({**good, "edges": [{"left": 1, "right": 0, "selectivity": 0.5}]})
    with pytest.raises(QueryFormatError, match=r"relations\[1\].cardinality"):
        bad = json.loads(json.dumps(good))
        bad["relations"][1]["cardinality"] = "big"
        load(bad)
    with pytest.raises(QueryFormatError, match="line 2"):
        load('{"relations": [],\n "edges": [,]}')
    with pytest.raises(QueryFormatError, match="not connected"):
        load({**good, "edges": good["edges"][:1]})


def test_integer_values_are_accepted():
    g = query_from_dict(
        {"relations": [{"name": "a", "cardinality": 10, "selectivity": 1}], "edges": []}
    )
    assert g.relations[0].base_cardinality == 10.0
