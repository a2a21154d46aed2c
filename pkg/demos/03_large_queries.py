"""
Heuristics for queries too large for exact DP
=============================================

GOO builds a plan greedily.  IDP2 starts from that plan and re-optimizes its
most expensive subtrees exactly.  UnionDP partitions the graph, solves each
piece exactly and recurses on the contracted graph.
"""

import time

from joinopt import CostModel, GeneratorConfig, check_plan, generate, goo, idp2, recompute_plan, uniondp

g = generate(GeneratorConfig("snowflake", 40, seed=11))
print(f"snowflake with {g.n} relations and {len(g.edges)} joins")

for name, run in (("goo", lambda: goo(g)), ("idp2", lambda: idp2(g, 10)), ("uniondp", lambda: uniondp(g, 10))):
    start = time.perf_counter()
    r = run()
    print(f"{name:>8}: cost {r.cost:.6g} in {time.perf_counter() - start:.2f}s")

# uniondp scales to hundreds of relations
big = generate(GeneratorConfig("snowflake", 300, seed=11))
start = time.perf_counter()
r = uniondp(big, 15)
print(f"uniondp on {big.n} relations: {time.perf_counter() - start:.1f}s")

# plans are ordinary trees, so they can be checked and re-costed
check_plan(r.plan, big)
print("recomputed cost matches:", recompute_plan(r.plan, CostModel(big)).cost == r.cost)
