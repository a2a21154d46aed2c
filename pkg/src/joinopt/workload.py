"""Synthetic query-graph generators and the JSON query file format.

File format (UTF-8 JSON)::

    {"relations": [{"name": "R0", "cardinality": 12345.0, "selectivity": 1.0}, ...],
     "edges": [{"left": 0, "right": 3, "selectivity": 0.001}, ...]}

Relations are indexed by position; an edge needs ``left < right`` and may not
repeat.  Relation ``selectivity`` is the filter (selection) factor applied to
the base relation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractViolation, JoinOptError, QueryFormatError
from .querygraph import EdgeInfo, QueryGraph, RelationInfo

TOPOLOGIES = ("star", "snowflake", "chain", "clique", "randomwalk")

DEFAULT_CARDINALITY_RANGE = (10.0, 1e6)
DIMENSION_SELECTION_RANGE = (0.05, 1.0)
MUSICBRAINZ_TABLES = 56
SCHEMA_SEED = 0x5EED


@dataclass(frozen=True)
class GeneratorConfig:
    topology: str
    n_rels: int
    seed: int = 0
    depth: int = 4
    cardinality_range: tuple[float, float] = DEFAULT_CARDINALITY_RANGE
    schema_size: int = MUSICBRAINZ_TABLES

    def __post_init__(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ContractViolation(f"unknown topology {self.topology!r}")
        if self.n_rels < 2:
            raise ContractViolation("n_rels must be >= 2")
        if self.topology == "snowflake" and not 2 <= self.depth <= 4:
            raise ContractViolation("snowflake depth must be in [2, 4]")
        low, high = self.cardinality_range
        if not 1 <= low <= high:
            raise ContractViolation("cardinality range must satisfy 1 <= low <= high")
        if self.topology == "randomwalk" and self.n_rels > self.schema_size:
            raise ContractViolation("randomwalk needs n_rels <= schema_size")


def _cardinalities(rng: np.random.Generator, count: int, low: float, high: float) -> list[float]:
    # log-uniform, rounded to whole rows
    logs = rng.uniform(math.log(low), math.log(high), size=count)
    return [float(max(1, round(math.exp(x)))) for x in logs]


def _pkfk(cards: list[float], key_side: int, u: int, v: int) -> EdgeInfo:
    return EdgeInfo(min(u, v), max(u, v), 1.0 / cards[key_side])


def snowflake_fanout(n_rels: int, depth: int) -> int:
    """Smallest fan-out whose complete tree of the given depth holds ``n_rels`` nodes."""
    fanout = 1
    while sum(fanout**d for d in range(depth + 1)) < n_rels:
        fanout += 1
    return fanout


def _tree_query(parents: list[int], cards: list[float], selections: list[float], prefix="R") -> QueryGraph:
    rels = [RelationInfo(f"{prefix}{i}", c, s) for i, (c, s) in enumerate(zip(cards, selections))]
    # the child is the dimension (primary-key side) of its parent
    edges = [_pkfk(cards, child, parent, child) for child, parent in enumerate(parents) if child]
    return QueryGraph(rels, edges)


def generate(cfg: GeneratorConfig) -> QueryGraph:
    """Build the query graph described by ``cfg``; deterministic in ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_rels
    low, high = cfg.cardinality_range
    if cfg.topology == "randomwalk":
        return _random_walk_query(cfg, rng)
    cards = _cardinalities(rng, n, low, high)
    if cfg.topology in ("star", "snowflake"):
        dims = rng.uniform(*DIMENSION_SELECTION_RANGE, size=n - 1).tolist()
        selections = [1.0] + [float(x) for x in dims]
        if cfg.topology == "star":
            parents = [-1] + [0] * (n - 1)
        else:
            fanout = snowflake_fanout(n, cfg.depth)
            parents = [-1] + [(i - 1) // fanout for i in range(1, n)]
        return _tree_query(parents, cards, selections)
    rels = [RelationInfo(f"R{i}", c) for i, c in enumerate(cards)]
    if cfg.topology == "chain":
        edges = [_pkfk(cards, i + 1, i, i + 1) for i in range(n - 1)]
    else:
        edges = [_pkfk(cards, v, u, v) for u in range(n) for v in range(u + 1, n)]
    return QueryGraph(rels, edges)


def schema_graph(size: int = MUSICBRAINZ_TABLES, seed: int = SCHEMA_SEED, cardinality_range=DEFAULT_CARDINALITY_RANGE):
    """Seeded preferential-attachment schema with primary-key/foreign-key edges.

    Returns ``(cards, fks)`` where ``fks`` lists ``(referencing, referenced)``
    table pairs.  Each new table references one existing table, or two with
    probability 0.3, chosen proportionally to degree + 1.
    """
    rng = np.random.default_rng(seed)
    cards = _cardinalities(rng, size, *cardinality_range)
    degree = [0] * size
    fks: list[tuple[int, int]] = []
    for t in range(1, size):
        wanted = 2 if t > 1 and rng.random() < 0.3 else 1
        weights = np.array(degree[:t], dtype=float) + 1.0
        targets = rng.choice(t, size=wanted, replace=False, p=weights / weights.sum())
        for target in sorted(int(x) for x in targets):
            fks.append((t, target))
            degree[t] += 1
            degree[target] += 1
    return cards, fks


def _random_walk_query(cfg: GeneratorConfig, rng: np.random.Generator) -> QueryGraph:
    cards, fks = schema_graph(cfg.schema_size, SCHEMA_SEED, cfg.cardinality_range)
    nbrs: list[list[int]] = [[] for _ in range(cfg.schema_size)]
    for a, b in fks:
        nbrs[a].append(b)
        nbrs[b].append(a)
    current = int(rng.integers(cfg.schema_size))
    picked = [current]
    seen = {current}
    while len(picked) < cfg.n_rels:
        current = nbrs[current][int(rng.integers(len(nbrs[current])))]
        if current not in seen:
            seen.add(current)
            picked.append(current)
    local = {t: i for i, t in enumerate(picked)}
    rels = [RelationInfo(f"T{t}", cards[t]) for t in picked]
    edges = [
        EdgeInfo(min(local[a], local[b]), max(local[a], local[b]), 1.0 / cards[b])
        for a, b in fks
        if a in local and b in local
    ]
    return QueryGraph(rels, edges)


def query_to_dict(g: QueryGraph) -> dict:
    return {
        "relations": [
            {"name": r.name, "cardinality": r.base_cardinality, "selectivity": r.selection_factor}
            for r in g.relations
        ],
        "edges": [{"left": e.u, "right": e.v, "selectivity": e.selectivity} for e in g.edges],
    }


def write_query(g: QueryGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(query_to_dict(g), indent=1) + "\n", encoding="utf-8")


def _field(obj, key: str, where: str, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise QueryFormatError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise QueryFormatError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def query_from_dict(data) -> QueryGraph:
    relations_raw = _field(data, "relations", "query", list)
    edges_raw = _field(data, "edges", "query", list)
    try:
        rels = [
            RelationInfo(
                _field(r, "name", f"relations[{i}]", str),
                _field(r, "cardinality", f"relations[{i}]", float),
                _field(r, "selectivity", f"relations[{i}]", float),
            )
            for i, r in enumerate(relations_raw)
        ]
        edges = []
        seen = set()
        for i, e in enumerate(edges_raw):
            where = f"edges[{i}]"
            u = _field(e, "left", where, int)
            v = _field(e, "right", where, int)
            if not 0 <= u < v < len(rels):
                raise QueryFormatError(f"{where}: need 0 <= left < right < {len(rels)}, got ({u}, {v})")
            if (u, v) in seen:
                raise QueryFormatError(f"{where}: duplicate edge ({u}, {v})")
            seen.add((u, v))
            edges.append(EdgeInfo(u, v, _field(e, "selectivity", where, float)))
        return QueryGraph(rels, edges)
    except QueryFormatError:
        raise
    except JoinOptError as exc:
        raise QueryFormatError(str(exc)) from exc


def read_query(path: str | Path) -> QueryGraph:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise QueryFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return query_from_dict(data)
    except QueryFormatError as exc:
        raise QueryFormatError(f"{path}: {exc}") from exc


def random_connected(n_rels: int, seed: int, extra_edge_prob: float = 0.2, cardinality_range=DEFAULT_CARDINALITY_RANGE) -> QueryGraph:
    """Random spanning tree plus independent extra edges; selectivities from
    the key side as for the named topologies."""
    rng = np.random.default_rng(seed)
    cards = _cardinalities(rng, n_rels, *cardinality_range)
    pairs = {(int(rng.integers(v)), v) for v in range(1, n_rels)}
    for u in range(n_rels):
        for v in range(u + 1, n_rels):
            if (u, v) not in pairs and rng.random() < extra_edge_prob:
                pairs.add((u, v))
    rels = [RelationInfo(f"R{i}", c) for i, c in enumerate(cards)]
    return QueryGraph(rels, [_pkfk(cards, v, u, v) for u, v in sorted(pairs)])


MIXED_TOPOLOGIES = TOPOLOGIES + ("random",)


def mixed_suite(count: int, n_range: tuple[int, int], seed: int = 0) -> list[tuple[str, QueryGraph]]:
    """``count`` seeded graphs cycling through every topology, sizes uniform in ``n_range``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        topology = MIXED_TOPOLOGIES[i % len(MIXED_TOPOLOGIES)]
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        qseed = int(rng.integers(2**63))
        if topology == "random":
            g = random_connected(n, qseed)
        else:
            g = generate(GeneratorConfig(topology, n, seed=qseed, depth=4))
        out.append((topology, g))
    return out
