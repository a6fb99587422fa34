"""Pairwise functional maps: least-squares estimation from descriptors,
pointwise-map extraction, and spectral upsampling.

Coefficient convention used throughout: descriptor coefficients are rows
(one row per descriptor dimension), and a map C acts on the right, so that
row_i @ C ~ row_j. Pointwise extraction transports the spectral embedding
of shape i by C and searches nearest neighbours among the rows of Phi_j;
upsampling recomputes C from the current pointwise map with mass-weighted
pseudoinverses. The three operations share one convention so that exact
isometries round-trip exactly, whatever gauge the per-shape eigenbases
were computed in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .spectral import SpectralBasis

__all__ = [
    "PairwiseFmap",
    "PairwiseMap",
    "solve_fmap",
    "extract_pointwise",
    "spectral_upsample",
    "nearest_rows",
]

UNMATCHED = -1


@dataclass(frozen=True)
class PairwiseFmap:
    source: int
    target: int
    C: np.ndarray  # (b_cur, b_cur)

    @property
    def b_cur(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class PairwiseMap:
    """Per-vertex match from source into target; UNMATCHED (-1) where none."""

    source: int
    target: int
    match: np.ndarray  # (m_source,) int64

    def n_matched(self) -> int:
        return int((self.match >= 0).sum())


def solve_fmap(Fi, Gj, source: int = 0, target: int = 1) -> PairwiseFmap:
    """Least-squares functional map: argmin_C ||Fi C - Gj||_F^2.

    Fi and Gj are (q, b) descriptor-coefficient matrices on the source and
    target shape, q >= b.
    """
    Fi = np.asarray(Fi, dtype=np.float64)
    Gj = np.asarray(Gj, dtype=np.float64)
    q, b = Fi.shape
    if q < b:
        raise NumericalError(
            f"underdetermined fit: {q} descriptor rows for basis size {b}"
        )
    C, _, rank, _ = np.linalg.lstsq(Fi, Gj, rcond=None)
    if rank < b:
        raise NumericalError(
            f"descriptor coefficient matrix is rank-deficient ({rank} < {b}); "
            "add more descriptor samples"
        )
    return PairwiseFmap(source=source, target=target, C=C)


def nearest_rows(queries: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Index of the closest candidate row per query row; ties -> lowest index."""
    # brute force is exact and deterministic; fine at desk scale
    d2 = (
        np.sum(queries ** 2, axis=1)[:, None]
        - 2.0 * queries @ candidates.T
        + np.sum(candidates ** 2, axis=1)[None, :]
    )
    return np.argmin(d2, axis=1).astype(np.int64)


def extract_pointwise(
    basis_i: SpectralBasis, basis_j: SpectralBasis, fmap: PairwiseFmap
) -> PairwiseMap:
    """Nearest-neighbour pointwise map in spectral coefficient space."""
    b = fmap.b_cur
    emb_i = basis_i.phi[:, :b] @ fmap.C
    emb_j = basis_j.phi[:, :b]
    match = nearest_rows(emb_i, emb_j)
    return PairwiseMap(source=fmap.source, target=fmap.target, match=match)


def fmap_from_pointwise(
    basis_i: SpectralBasis, basis_j: SpectralBasis, match: np.ndarray, b: int,
    source: int = 0, target: int = 1,
) -> PairwiseFmap:
    """Functional map induced by a pointwise map, via the mass-weighted
    pseudoinverse of the target basis."""
    phi_i = basis_i.phi[:, :b]
    phi_j = basis_j.phi[:, :b]
    w = basis_j.mass_diag[match]
    C = phi_i.T @ (w[:, None] * phi_j[match])
    return PairwiseFmap(source=source, target=target, C=C)


def spectral_upsample(
    basis_i: SpectralBasis,
    basis_j: SpectralBasis,
    fmap0: PairwiseFmap,
    b_target: int,
    step: int = 5,
) -> PairwiseFmap:
    """Grow a functional map from b0 to b_target by alternating pointwise
    extraction and re-estimation at a larger spectral size."""
    if b_target > min(basis_i.b, basis_j.b):
        raise NumericalError(
            f"b_target={b_target} exceeds available basis size "
            f"{min(basis_i.b, basis_j.b)}"
        )
    fmap = fmap0
    while True:
        pmap = extract_pointwise(basis_i, basis_j, fmap)
        if fmap.b_cur >= b_target:
            # final re-estimate at the target size keeps C consistent with
            # the last extracted pointwise map
            return fmap_from_pointwise(
                basis_i, basis_j, pmap.match, b_target,
                source=fmap.source, target=fmap.target,
            )
        b_next = min(fmap.b_cur + step, b_target)
        fmap = fmap_from_pointwise(
            basis_i, basis_j, pmap.match, b_next,
            source=fmap.source, target=fmap.target,
        )
