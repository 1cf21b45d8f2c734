"""
Connectors and their Hamilton paths
===================================

Build a connector in a sparse random graph and walk every Hamilton path that
its certificates promise, from each vertex of H⁺ to each vertex of H⁻.
"""

import math
import random

from combforge.connectors import build_connector, hamilton_path, validate_path
from combforge.graphs import sample_gnp

n = 3000
g = sample_gnp(n, math.log(n) ** 2 / n, seed=0)
region = random.Random(0).sample(range(n), n // 2)

c = build_connector(g, 60, region, seed=0, k=3)
print(f"connector on {len(c.vertices)} vertices, |H+| = {len(c.plus)}, |H-| = {len(c.minus)}")

count = 0
for x in c.plus:
    for y in c.minus:
        validate_path(g, hamilton_path(c, x, y), c.vertices)
        count += 1
print(f"all {count} Hamilton paths validated edge by edge")

path = hamilton_path(c, c.plus[0], c.minus[0])
print("one of them:", " ".join(map(str, path[:10])), "...", path[-1])
