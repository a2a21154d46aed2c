"""Join-order optimization: exact DP enumerators, large-query heuristics and workloads."""

from .costmodel import CostKind, CostModel, DEFAULT_COST_KIND, estimate_cardinality, join_cost
from .dpexact import (
    JoinProblem,
    OptimizerResult,
    count_pairs,
    dpsize,
    dpsub,
    level_pipeline,
    mpdp,
    mpdp_tree,
    oracle_ccp_count,
    oracle_optimal,
)
from .errors import (
    CapacityError,
    ContractViolation,
    DisconnectedGraphError,
    IncompleteMemoError,
    JoinOptError,
    NotATreeError,
    OptimizerTimeout,
    QueryFormatError,
)
from .heuristics import CompositeGraph, UnionFind, contract, goo, idp2, uniondp
from .planmemo import MemoTable, Plan, RunStats, check_plan, extract_tree, recompute_plan
from .querygraph import EdgeInfo, QueryGraph, RelationInfo
from .workload import GeneratorConfig, generate, read_query, write_query

__all__ = [name for name in dir() if not name.startswith("_")]
