"""Alternating projection solver for joint shape-to-universe matchings and
functional maps.

The objective <U^T Phi Q, U^T Phi Q> is maximised by alternating a blockwise
linear-assignment projection of the matching stack and a blockwise SVD
projection of the map stack. Both half-steps are monotone, so the objective
trace never decreases and the loop terminates either by the relative
improvement rule or by the iteration cap.

All products with U use gather/scatter on the per-vertex universe indices;
the m x m and kb x kb intermediate operators are never materialised.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .assignment import project_blockwise_P, solve_lap_max
from .errors import InputError
from .fmaps import PairwiseMap, UNMATCHED
from .ortho import project_orthogonal
from .universe import UniverseMaps, UniverseMatching

__all__ = [
    "StackedBasis",
    "SolverState",
    "objective",
    "u_update",
    "q_update",
    "run",
    "pairwise_from_universe",
    "DEFAULT_EPSILON",
    "DEFAULT_MAX_ITERS",
]

# Relative objective improvement at machine precision terminates the loop.
DEFAULT_EPSILON = 2.2e-16
DEFAULT_MAX_ITERS = 200


@dataclass(frozen=True)
class StackedBasis:
    """Block-diagonal stack of per-shape eigenfunction matrices.

    Stored as the list of (m_i, b) blocks; the dense (m, kb) matrix is never
    formed.
    """

    blocks: tuple  # k arrays (m_i, b)

    def __post_init__(self):
        blocks = tuple(np.asarray(p, dtype=np.float64) for p in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        widths = {p.shape[1] for p in blocks}
        if len(widths) > 1:
            raise InputError(f"inconsistent basis widths: {sorted(widths)}")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def b(self) -> int:
        return self.blocks[0].shape[1]

    @property
    def block_sizes(self):
        return [p.shape[0] for p in self.blocks]


@dataclass
class SolverState:
    U: UniverseMatching
    Q: UniverseMaps
    iteration: int = 0
    trace: list = field(default_factory=list)  # objective value per iteration
    status: str = "running"  # running | converged | max_iters | degenerate


def _universe_sum(U: UniverseMatching, basis: StackedBasis, Q: UniverseMaps):
    """S = sum_i P_i^T Phi_i C_i, the (d, b_prime) universe accumulator."""
    S = np.zeros((U.d, Q.b_prime))
    for ix, phi, C in zip(U.indices, basis.blocks, Q.blocks):
        S[ix] += phi @ C
    return S


def objective(U: UniverseMatching, Q: UniverseMaps, basis: StackedBasis) -> float:
    """f(U, Q) = ||sum_i P_i^T Phi_i C_i||_F^2 (matrix form of the pairwise sum)."""
    if U.k != basis.k or Q.k != basis.k:
        raise InputError(
            f"block counts differ: U has {U.k}, Q has {Q.k}, basis has {basis.k}"
        )
    S = _universe_sum(U, basis, Q)
    return float(np.sum(S * S))


def u_update(state: SolverState, basis: StackedBasis,
             solver=solve_lap_max) -> UniverseMatching:
    """Blockwise LAP projection of (Phi Q Q^T Phi^T) U, factored as A (A^T U)."""
    U, Q = state.U, state.Q
    B = _universe_sum(U, basis, Q).T  # (b_prime, d) = (Phi Q)^T U
    blocks = []
    for phi, C in zip(basis.blocks, Q.blocks):
        score = (phi @ C) @ B  # (m_i, d)
        blocks.append(solver(score).assign)
    return UniverseMatching(indices=tuple(blocks), d=U.d)


def q_update(state: SolverState, basis: StackedBasis) -> UniverseMaps:
    """Blockwise SVD projection of (Phi^T U U^T Phi) Q, factored via the
    universe accumulator."""
    U, Q = state.U, state.Q
    S = _universe_sum(U, basis, Q)  # (d, b_prime) = (U^T Phi) Q
    blocks = []
    for ix, phi in zip(U.indices, basis.blocks):
        score = phi.T @ S[ix]  # (b, b_prime)
        blocks.append(project_orthogonal(score).values)
    return UniverseMaps(blocks=tuple(blocks))


def run(
    U0: UniverseMatching,
    Q0: UniverseMaps,
    basis: StackedBasis,
    epsilon: float = DEFAULT_EPSILON,
    max_iters: int = DEFAULT_MAX_ITERS,
    solver=solve_lap_max,
    on_iteration=None,
) -> SolverState:
    """Alternate U- and Q-updates until the relative-improvement stopping
    rule f_t / f_{t+1} >= 1 - epsilon, or max_iters.

    Returns the final state with the full objective trace (the trace starts
    with f(U0, Q0)).
    """
    state = SolverState(U=U0, Q=Q0)
    f_prev = objective(U0, Q0, basis)
    state.trace.append(f_prev)
    if f_prev == 0.0:
        state.status = "degenerate"
        return state
    for _ in range(max_iters):
        t0 = time.perf_counter()
        state.U = u_update(state, basis, solver=solver)
        state.Q = q_update(state, basis)
        state.iteration += 1
        f_cur = objective(state.U, state.Q, basis)
        state.trace.append(f_cur)
        if on_iteration is not None:
            on_iteration(state.iteration, f_cur, time.perf_counter() - t0)
        if f_cur == 0.0:
            state.status = "degenerate"
            return state
        # floating point can push the ratio slightly above 1; any ratio
        # >= 1 - epsilon counts as converged
        if f_prev / f_cur >= 1.0 - epsilon:
            state.status = "converged"
            return state
        f_prev = f_cur
    state.status = "max_iters"
    return state


def pairwise_from_universe(U: UniverseMatching, i: int, j: int) -> PairwiseMap:
    """P_ij = P_i P_j^T: vertices match iff they share a universe index."""
    ix_i, ix_j = U.indices[i], U.indices[j]
    universe_to_j = np.full(U.d, UNMATCHED, dtype=np.int64)
    universe_to_j[ix_j] = np.arange(ix_j.size)
    return PairwiseMap(source=i, target=j, match=universe_to_j[ix_i])
