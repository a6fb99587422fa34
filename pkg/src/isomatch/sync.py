"""Synchronise pairwise functional maps into cycle-consistent
shape-to-universe initial values.

Pipeline: band-filter each pairwise map (isometric spectra make the true
maps band-diagonal), project to the orthogonal set, run orthogonal
transformation synchronisation to get per-shape universe maps, embed all
eigenfunctions in universe coordinates, and cluster the embedded vertices
into universe points under the one-to-one constraint.

The clustering step is a deterministic greedy-reference scheme: the first
shape seeds the universe, and each later shape is assigned by a linear
assignment against running centroids. It is a documented stand-in for
fancier permutation-synchronisation machinery; the only contract is that
the output is a valid blockwise partial permutation.
"""
from __future__ import annotations

import warnings

import numpy as np

from .assignment import solve_lap_max
from .errors import InputError
from .ortho import project_orthogonal
from .universe import UniverseMaps, UniverseMatching

__all__ = [
    "band_filter",
    "ortho_sync",
    "build_universe_embedding",
    "perm_sync",
    "DEFAULT_BAND_RADIUS",
]

DEFAULT_BAND_RADIUS = 6


def band_filter(C, r: int):
    """Zero all entries farther than r from the diagonal."""
    if r < 0:
        raise InputError("band radius must be >= 0")
    C = np.asarray(C, dtype=np.float64)
    rows, cols = np.indices(C.shape)
    return np.where(np.abs(rows - cols) <= r, C, 0.0)


def ortho_sync(pairwise: dict, k: int, b: int) -> UniverseMaps:
    """Orthogonal transformation synchronisation.

    pairwise maps (i, j) -> orthogonal b x b matrix C_ij for i < j (the
    reverse direction is C_ij^T, the diagonal is I). Builds the k*b x k*b
    block matrix of all C_ij, takes its top-b eigenvectors, and projects
    each b x b block back to the orthogonal set. For consistent input
    C_ij = C_i C_j^T the products of the output blocks reproduce the input
    exactly, up to a global orthogonal gauge.
    """
    H = np.zeros((k * b, k * b))
    for i in range(k):
        H[i * b:(i + 1) * b, i * b:(i + 1) * b] = np.eye(b)
    for (i, j), C in pairwise.items():
        C = np.asarray(C, dtype=np.float64)
        if C.shape != (b, b):
            raise InputError(f"pairwise map ({i},{j}) has shape {C.shape}")
        H[i * b:(i + 1) * b, j * b:(j + 1) * b] = C
        H[j * b:(j + 1) * b, i * b:(i + 1) * b] = C.T
    vals, vecs = np.linalg.eigh(H)
    vals, vecs = vals[::-1], vecs[:, ::-1]  # descending
    if k * b > b and vals[b - 1] - vals[b] < 1e-10:
        warnings.warn(
            "ambiguous synchronisation: eigen-gap below 1e-10 at position b",
            RuntimeWarning,
        )
    top = vecs[:, :b]
    blocks = tuple(
        project_orthogonal(top[i * b:(i + 1) * b]).values for i in range(k)
    )
    return UniverseMaps(blocks=blocks)


def build_universe_embedding(bases, maps: UniverseMaps) -> np.ndarray:
    """Stack Phi_i C_i for all shapes into one (m, b_prime) matrix."""
    if len(bases) != maps.k:
        raise InputError(f"{len(bases)} bases for {maps.k} map blocks")
    rows = []
    for basis, C in zip(bases, maps.blocks):
        if basis.b < C.shape[0]:
            raise InputError(
                f"basis size {basis.b} smaller than map rows {C.shape[0]}"
            )
        rows.append(basis.phi[:, :C.shape[0]] @ C)
    return np.vstack(rows)


def perm_sync(psi: np.ndarray, block_sizes, d: int) -> UniverseMatching:
    """Constrained clustering of universe-embedded vertices into d points.

    Shape 1 seeds universe points 0..m_1-1. Every later shape solves a
    linear assignment between its rows and the running centroids (inner
    product similarity), then folds its rows into the centroids as running
    means. Sequential over shapes by design; the order dependence is part
    of the documented contract.
    """
    psi = np.asarray(psi, dtype=np.float64)
    if sum(block_sizes) != psi.shape[0]:
        raise InputError("block sizes do not sum to the embedding row count")
    if d < max(block_sizes):
        raise InputError(
            f"universe size {d} smaller than largest shape ({max(block_sizes)})"
        )
    bp = psi.shape[1]
    centroids = np.zeros((d, bp))
    counts = np.zeros(d)

    first = block_sizes[0]
    blocks = [np.arange(first)]
    centroids[:first] = psi[:first]
    counts[:first] = 1.0

    offset = first
    for mi in block_sizes[1:]:
        rows = psi[offset:offset + mi]
        similarity = rows @ centroids.T
        perm = solve_lap_max(similarity)
        blocks.append(perm.assign)
        # running-mean centroid update for the assigned universe points
        c = counts[perm.assign][:, None]
        centroids[perm.assign] = (centroids[perm.assign] * c + rows) / (c + 1.0)
        counts[perm.assign] += 1.0
        offset += mi
    return UniverseMatching(indices=tuple(blocks), d=d)
