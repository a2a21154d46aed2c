"""
How much work does vertex-based enumeration throw away?
=======================================================

DPSUB looks at every subset of every connected set, most of which are not
valid joins.  On star queries almost everything is wasted.  Counting mode
gives the counters of a full run without costing any plan.
"""

from joinopt import EdgeInfo, QueryGraph, RelationInfo, count_pairs


def star_query(n):
    rels = [RelationInfo(f"t{i}", 1000.0 * (i + 1)) for i in range(n)]
    return QueryGraph(rels, [EdgeInfo(0, i, 1e-3) for i in range(1, n)])


print(f"{'n':>3} {'dpsub evaluated':>16} {'mpdp evaluated':>15} {'ccp pairs':>12} {'waste':>8}")
for n in (5, 10, 15, 20, 25):
    g = star_query(n)
    sub = count_pairs(g, "dpsub")
    mp = count_pairs(g, "mpdp")
    assert sub.ccp_counter == mp.ccp_counter
    print(
        f"{n:>3} {sub.evaluated_counter:>16,} {mp.evaluated_counter:>15,} "
        f"{sub.ccp_counter:>12,} {sub.evaluated_counter / sub.ccp_counter:>8.1f}"
    )

# a star is a tree, so every block is a single edge and mpdp wastes nothing
