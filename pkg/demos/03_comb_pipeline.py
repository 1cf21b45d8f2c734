"""
Embedding a comb with √n teeth
==============================

Three random rounds give connectors and a spine, a Hamilton cycle cut into
paths, and two matchings that splice them into a spanning comb.  The trace
replays to the same embedding.
"""

from combforge.embedding import PipelineTrace, validate
from combforge.pipelines import embed_comb_sqrt, replay

res = embed_comb_sqrt(900, seed=3)
print(validate(res.graph, res.tree, res.embedding).to_text().strip())
print(f"union graph: {res.graph.m} edges, tree: {res.tree.n} vertices")

print("\ntrace:")
print(res.trace.to_text())

again = replay(PipelineTrace.from_text(res.trace.to_text()))
print("replay reproduces the embedding:", again.embedding == res.embedding)
