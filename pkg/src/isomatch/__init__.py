"""Cycle-consistent dense correspondences across collections of
near-isometric triangle meshes.

Pairwise matchings are factored through a virtual universe shape: each mesh
carries a partial permutation into universe points and an orthogonal
functional map into a shared spectral frame, and both stacks are optimised
jointly by alternating projections. Correspondences composed through the
universe are cycle-consistent by construction.
"""

__version__ = "0.1.0"

from .core import (SolverState, StackedBasis, objective, pairwise_from_universe,
                   q_update, run, u_update)
from .errors import InputError, IsomatchError, MeshError, NumericalError
from .mesh import GeodesicField, Shape, diameter, geodesic_distances, load_mesh, save_mesh
from .pipeline import PipelineResult, RunConfig, match_collection
from .spectral import SpectralBasis, cotangent_laplacian, eigenbasis
from .universe import PartialPermutation, UniverseMaps, UniverseMatching

__all__ = [
    "__version__",
    "Shape", "GeodesicField", "load_mesh", "save_mesh",
    "geodesic_distances", "diameter",
    "SpectralBasis", "cotangent_laplacian", "eigenbasis",
    "PartialPermutation", "UniverseMatching", "UniverseMaps",
    "StackedBasis", "SolverState", "objective", "u_update", "q_update", "run",
    "pairwise_from_universe",
    "RunConfig", "PipelineResult", "match_collection",
    "IsomatchError", "InputError", "MeshError", "NumericalError",
]
