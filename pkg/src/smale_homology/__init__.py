"""Homology of Smale spaces from finite pair presentations."""
from .graph import Graph, GraphHom, adjacency_matrix, higher_block, validate_graph
from .dimension import (CanonicalForm, StationarySystem, classify_limit, dimension_group,
                        induced_map)
from .pair import PairPresentation, gen_example, load_pair, dump_pair, validate_pair
from .complex import StationaryComplex, build_complex
from .homology import HomologyReport, homology, homology_integral, homology_rational

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphHom", "adjacency_matrix", "higher_block", "validate_graph",
    "CanonicalForm", "StationarySystem", "classify_limit", "dimension_group", "induced_map",
    "PairPresentation", "gen_example", "load_pair", "dump_pair", "validate_pair",
    "StationaryComplex", "build_complex", "HomologyReport", "homology",
    "homology_integral", "homology_rational",
]
