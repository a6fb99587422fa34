"""Euclidean projection onto (semi-)orthogonal matrix sets.

For a b x b' matrix A with thin SVD A = U S V^T, the closest semi-orthogonal
matrix (and the maximiser of <A, Y> over Y Y^T = I_b) is U V^T. Determinants
are deliberately not constrained to +1: reflections are valid functional-map
gauges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .universe import UniverseMaps

__all__ = ["OrthoBlock", "project_orthogonal", "project_blockwise_Q"]

_RANK_DEFICIENCY_RATIO = 1e-12


@dataclass(frozen=True)
class OrthoBlock:
    values: np.ndarray        # (b, b_prime), values @ values.T = I_b
    singular_values: np.ndarray
    gauge_ambiguous: bool     # rank-deficient input: projection is non-unique


def project_orthogonal(A) -> OrthoBlock:
    """Project a b x b' matrix (b <= b') onto the semi-orthogonal set."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise InputError(f"expected a matrix, got shape {A.shape}")
    b, bp = A.shape
    if b > bp:
        raise InputError(f"matrix must be square or wide, got {b}x{bp}")
    if not np.isfinite(A).all():
        raise InputError("matrix contains non-finite entries")
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    ambiguous = bool(s[-1] < _RANK_DEFICIENCY_RATIO * max(s[0], 1e-300))
    return OrthoBlock(values=u @ vt, singular_values=s, gauge_ambiguous=ambiguous)


def project_blockwise_Q(score, k: int) -> UniverseMaps:
    """Project k stacked b x b' blocks independently, preserving stack order."""
    score = np.asarray(score, dtype=np.float64)
    if score.shape[0] % k != 0:
        raise InputError(f"{score.shape[0]} rows do not split into {k} blocks")
    b = score.shape[0] // k
    blocks = [
        project_orthogonal(score[i * b:(i + 1) * b]).values for i in range(k)
    ]
    return UniverseMaps(blocks=tuple(blocks))
