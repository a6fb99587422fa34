from __future__ import annotations

import numpy as np
import pytest

from isomatch.core import StackedBasis
from isomatch.mesh import Shape
from isomatch.ortho import project_orthogonal
from isomatch.synthetic import bumpy_grid_mesh
from isomatch.universe import UniverseMaps, UniverseMatching


@pytest.fixture(scope="session")
def grid_shape() -> Shape:
    """Small generic open mesh (~90 vertices), shared across tests."""
    return bumpy_grid_mesh(10, 9, seed=0)


@pytest.fixture(scope="session")
def tiny_shape() -> Shape:
    """Two triangles sharing an edge: the smallest valid mesh here."""
    verts = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
    ])
    faces = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int64)
    return Shape(verts, faces)


def random_semi_orthogonal(rng, b, bp):
    """Random b x bp matrix with orthonormal rows, built via QR (not via the
    projection code under test)."""
    q, r = np.linalg.qr(rng.standard_normal((bp, bp)))
    q *= np.sign(np.diag(r))
    return q[:, :b].T


def random_feasible(rng, k, m_range, b, bp=None, d=None):
    """Random feasible (U, Q, StackedBasis) instance.

    U blocks are injective index lists into the universe, Q blocks are exact
    semi-orthogonal matrices, and the basis blocks are plain Gaussian
    matrices (the solver contracts do not require true eigenbases).
    """
    if bp is None:
        bp = b
    sizes = [int(rng.integers(m_range[0], m_range[1] + 1)) for _ in range(k)]
    if d is None:
        d = max(sizes)
    U = UniverseMatching(
        indices=tuple(rng.permutation(d)[:mi] for mi in sizes), d=d
    )
    Q = UniverseMaps(blocks=tuple(
        project_orthogonal(rng.standard_normal((b, bp))).values
        for _ in range(k)
    ))
    basis = StackedBasis(blocks=tuple(
        rng.standard_normal((mi, b)) for mi in sizes
    ))
    return U, Q, basis
