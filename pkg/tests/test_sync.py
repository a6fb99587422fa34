from __future__ import annotations

import numpy as np
import pytest

from conftest import random_semi_orthogonal
from isomatch.errors import InputError
from isomatch.ortho import project_orthogonal
from isomatch.sync import (band_filter, build_universe_embedding, ortho_sync,
                           perm_sync)
from isomatch.universe import UniverseMaps


def test_band_filter_hand_case():
    C = np.arange(25, dtype=float).reshape(5, 5)
    out = band_filter(C, 1)
    assert out[0, 0] == 0.0 and out[0, 1] == 1.0
    assert out[0, 2] == 0.0 and out[2, 0] == 0.0
    assert out[3, 4] == C[3, 4] and out[4, 3] == C[4, 3]
    # r large enough is the identity operation
    assert np.array_equal(band_filter(C, 4), C)
    with pytest.raises(InputError):
        band_filter(C, -1)


def test_ortho_sync_recovers_consistent_input():
    rng = np.random.default_rng(0)
    k, b = 4, 6
    C_true = [random_semi_orthogonal(rng, b, b) for _ in range(k)]
    pairwise = {
        (i, j): C_true[i] @ C_true[j].T
        for i in range(k) for j in range(i + 1, k)
    }
    Q = ortho_sync(pairwise, k, b)
    assert Q.k == k and Q.b == b and Q.b_prime == b
    assert Q.orthogonality_defect() < 1e-10
    # absolute blocks are defined up to a global gauge, which cancels in
    # every product Q_i Q_j^T
    for (i, j), C in pairwise.items():
        assert np.abs(Q.blocks[i] @ Q.blocks[j].T - C).max() < 1e-8


def test_ortho_sync_tolerates_noise():
    rng = np.random.default_rng(1)
    k, b = 3, 5
    C_true = [random_semi_orthogonal(rng, b, b) for _ in range(k)]
    pairwise = {
        (i, j): project_orthogonal(
            C_true[i] @ C_true[j].T + 0.05 * rng.standard_normal((b, b))
        ).values
        for i in range(k) for j in range(i + 1, k)
    }
    Q = ortho_sync(pairwise, k, b)
    for (i, j), C in pairwise.items():
        assert np.abs(Q.blocks[i] @ Q.blocks[j].T - C).max() < 0.2


def test_ortho_sync_warns_on_ambiguous_spectrum():
    k, b = 3, 4
    pairwise = {(i, j): np.zeros((b, b))
                for i in range(k) for j in range(i + 1, k)}
    with pytest.warns(RuntimeWarning, match="ambiguous"):
        ortho_sync(pairwise, k, b)


def test_ortho_sync_shape_check():
    with pytest.raises(InputError, match="shape"):
        ortho_sync({(0, 1): np.eye(3)}, 2, 4)


def test_build_universe_embedding(grid_shape):
    from isomatch.spectral import cotangent_laplacian, eigenbasis

    stiffness, mass = cotangent_laplacian(grid_shape)
    basis = eigenbasis(stiffness, mass, 6)
    C = np.eye(5)
    psi = build_universe_embedding([basis, basis], UniverseMaps(blocks=(C, C)))
    m = grid_shape.n_vertices
    assert psi.shape == (2 * m, 5)
    assert np.array_equal(psi[:m], basis.phi[:, :5])
    with pytest.raises(InputError):
        build_universe_embedding([basis], UniverseMaps(blocks=(C, C)))
    with pytest.raises(InputError, match="smaller"):
        build_universe_embedding([basis], UniverseMaps(blocks=(np.eye(7),)))


def test_perm_sync_recovers_permuted_rows():
    rng = np.random.default_rng(2)
    m, bp = 25, 6
    rows = rng.standard_normal((m, bp))
    perm = rng.permutation(m)
    psi = np.vstack([rows, rows[perm]])
    U = perm_sync(psi, [m, m], d=m)
    assert U.k == 2 and U.d == m
    # first shape seeds the universe in order
    assert np.array_equal(U.indices[0], np.arange(m))
    # the permuted copy lands on the seeded points of its twins
    assert np.array_equal(U.indices[1], perm)


def test_perm_sync_handles_unequal_sizes():
    rng = np.random.default_rng(3)
    rows = rng.standard_normal((10, 4))
    psi = np.vstack([rows, rows[:7]])
    U = perm_sync(psi, [10, 7], d=12)
    assert np.array_equal(U.indices[1], np.arange(7))
    assert U.block_sizes == [10, 7]


def test_perm_sync_input_checks():
    psi = np.zeros((5, 3))
    with pytest.raises(InputError, match="sum"):
        perm_sync(psi, [2, 2], d=5)
    with pytest.raises(InputError, match="universe size"):
        perm_sync(psi, [3, 2], d=2)
