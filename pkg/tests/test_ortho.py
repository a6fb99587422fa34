from __future__ import annotations

import numpy as np
import pytest

from conftest import random_semi_orthogonal
from isomatch.errors import InputError
from isomatch.ortho import project_blockwise_Q, project_orthogonal


def test_projection_is_semi_orthogonal_and_optimal():
    rng = np.random.default_rng(0)
    for b, bp in [(4, 4), (4, 6), (7, 9)]:
        A = rng.standard_normal((b, bp))
        block = project_orthogonal(A)
        Y = block.values
        assert np.abs(Y @ Y.T - np.eye(b)).max() < 1e-12
        # inner product with the projection equals the nuclear norm
        sigma_sum = np.linalg.svd(A, compute_uv=False).sum()
        assert float((A * Y).sum()) == pytest.approx(sigma_sum, abs=1e-10)
        # and beats random feasible points
        for _ in range(50):
            R = random_semi_orthogonal(rng, b, bp)
            assert (A * Y).sum() >= (A * R).sum() - 1e-10


def test_projection_is_idempotent():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((5, 7))
    once = project_orthogonal(A).values
    twice = project_orthogonal(once).values
    assert np.abs(once - twice).max() < 1e-12


def test_projection_is_frobenius_closest():
    # minimising ||Y - A||_F^2 over Y Y^T = I is the same as maximising
    # <A, Y>; spot-check against many random feasible points
    rng = np.random.default_rng(2)
    A = rng.standard_normal((3, 5))
    Y = project_orthogonal(A).values
    d_proj = ((Y - A) ** 2).sum()
    for _ in range(200):
        R = random_semi_orthogonal(rng, 3, 5)
        assert d_proj <= ((R - A) ** 2).sum() + 1e-10


def test_reflections_are_allowed():
    A = np.diag([1.0, 1.0, -1.0])
    Y = project_orthogonal(A).values
    assert np.abs(Y - A).max() < 1e-12
    assert np.linalg.det(Y) == pytest.approx(-1.0)


def test_rank_deficiency_flag():
    rng = np.random.default_rng(3)
    full = project_orthogonal(rng.standard_normal((4, 5)))
    assert not full.gauge_ambiguous
    low = np.outer(np.ones(4), rng.standard_normal(5))
    assert project_orthogonal(low).gauge_ambiguous


def test_input_validation():
    with pytest.raises(InputError, match="square or wide"):
        project_orthogonal(np.ones((5, 3)))
    with pytest.raises(InputError, match="non-finite"):
        project_orthogonal(np.array([[1.0, np.inf]]))
    with pytest.raises(InputError, match="matrix"):
        project_orthogonal(np.ones(4))


def test_project_blockwise_Q():
    rng = np.random.default_rng(4)
    k, b, bp = 3, 4, 5
    score = rng.standard_normal((k * b, bp))
    Q = project_blockwise_Q(score, k)
    assert Q.k == k and Q.b == b and Q.b_prime == bp
    assert Q.orthogonality_defect() < 1e-12
    for i in range(k):
        expected = project_orthogonal(score[i * b:(i + 1) * b]).values
        assert np.array_equal(Q.blocks[i], expected)
    with pytest.raises(InputError):
        project_blockwise_Q(score[:-1], k)
