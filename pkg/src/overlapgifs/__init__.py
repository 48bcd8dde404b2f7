"""Non-overlapping graph-directed representations of self-similar sets of finite type."""
from .algebra import FieldElement, NumberField
from .dimension import (WeightedGifs, char_poly, hausdorff_dim, incidence_matrix,
                        spectral_radius)
from .errors import GifsError
from .gifsbuild import GifsSystem, build_gifs, validate_gifs
from .nbrgraph import (BuildOptions, LabeledDigraph, build_neighbor_graph,
                       extract_overlap_graph, reachability_closure)
from .reduce import language_included, merge_identical, reduce_system, restrict_reachable
from .similitude import IfsSpec, Similitude

__version__ = "0.1.0"

__all__ = [
    "NumberField", "FieldElement", "Similitude", "IfsSpec", "LabeledDigraph", "BuildOptions",
    "build_neighbor_graph", "extract_overlap_graph", "reachability_closure", "GifsSystem",
    "build_gifs", "validate_gifs", "language_included", "merge_identical", "reduce_system",
    "restrict_reachable", "incidence_matrix", "char_poly", "spectral_radius", "hausdorff_dim",
    "WeightedGifs", "GifsError",
]
