"""
Spanning trees with many teeth
==============================

The five-round pipeline: split the tree, embed its core, attach connectors
to shortened teeth, cover the rest with two trees and paths, and close every
tooth with one Hall matching.  A failure names its stage.
"""

from combforge.embedding import validate
from combforge.extraction import PipelineError
from combforge.pipelines import embed_teeth_tree
from combforge.trees import make_comb

T = make_comb(400, 20)
for seed in range(3):
    try:
        res = embed_teeth_tree(T, 19, 1.0, seed)
    except PipelineError as exc:
        print(f"seed {seed}: failed at {exc.stage}")
        continue
    rep = validate(res.graph, T, res.embedding)
    stages = [st["stage"] for st in res.trace.stages]
    print(f"seed {seed}: valid={rep.holds}, stages: {' > '.join(stages)}")
