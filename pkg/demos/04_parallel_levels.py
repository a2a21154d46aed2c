"""
Level-parallel MPDP
===================

Each level of the DP (all sets of one size) is split into work items that can
run in worker processes.  Results are merged in a fixed order, so the plan is
the same whatever the worker count.
"""

import os
import time

from joinopt import GeneratorConfig, generate, mpdp

g = generate(GeneratorConfig("randomwalk", 16, seed=3))
print(f"{g.n} relations, {len(g.edges)} joins, {os.cpu_count()} cpu")

for workers in (1, 2, 4):
    start = time.perf_counter()
    r = mpdp(g, workers=workers)
    print(f"workers={workers}: cost {r.cost!r} evaluated {r.stats.evaluated_counter} in {time.perf_counter() - start:.2f}s")
