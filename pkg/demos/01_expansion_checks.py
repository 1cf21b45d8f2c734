"""
Expansion properties of small random graphs
===========================================

Sample G(n, p), run the expansion checkers and re-check every failing
witness against the graph.
"""

import math

from combforge.graphs import (
    check_ddr,
    check_expander,
    check_pairwise_edge,
    mindegexp_parameters,
    recheck,
    sample_gnp,
)

# a sparse and a denser graph on 12 vertices: small enough for exact answers
for p in (0.2, 0.6):
    g = sample_gnp(12, p, seed=7)
    print(f"G(12, {p}): {g.m} edges, max degree {g.max_degree()}")
    for rep in (check_pairwise_edge(g, 3), check_expander(g, 2), check_ddr(g, 1, 2, 2)):
        verdict = "holds" if rep.holds else f"fails, witness {rep.witness}, reproduced: {recheck(g, rep)}"
        print(f"  {rep.name:<14} [{rep.mode}] {verdict}")

# the (d, D, r)-property of a sparse graph, certified by its maximum degree
n = 1000
p = math.log(n) ** 2 / n
prm = mindegexp_parameters(n, p, d=4, alpha=23.0, beta=0.05)
g = sample_gnp(n, p, seed=1)
rep = check_ddr(g, prm["d"], prm["D"], prm["r"])
print(f"\nG({n}, log²n/n): Δ = {g.max_degree()}, D = {prm['D']:.1f}, r = {prm['r']}")
print(f"  (d, D, r)-property: {rep.holds} via {rep.notes or rep.mode}")
