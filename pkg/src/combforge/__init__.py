"""Random graphs, tree decompositions, connectors and comb embeddings."""

from .embedding import Embedding, EmbeddingError, PipelineTrace, embed_avoid, embed_tree_in_expander, validate
from .extraction import PipelineError, almost_spanning_pipeline
from .graphs import Graph, PropertyReport, derive_seed, sample_gnp
from .pipelines import DESK, ASYMPTOTIC, Profile, embed_comb_sqrt, embed_teeth_tree, replay
from .trees import Tree, find_teeth, make_comb, random_tree

__all__ = [
    "ASYMPTOTIC",
    "DESK",
    "Embedding",
    "EmbeddingError",
    "Graph",
    "PipelineError",
    "PipelineTrace",
    "Profile",
    "PropertyReport",
    "Tree",
    "almost_spanning_pipeline",
    "derive_seed",
    "embed_avoid",
    "embed_comb_sqrt",
    "embed_teeth_tree",
    "embed_tree_in_expander",
    "find_teeth",
    "make_comb",
    "random_tree",
    "replay",
    "sample_gnp",
    "validate",
]
