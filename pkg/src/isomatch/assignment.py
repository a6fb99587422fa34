"""Linear assignment maximisation over partial permutations.

The production solver is an epsilon-scaling auction on integer-rescaled
profits; a Hungarian-style exact solver is kept alongside as a verification
oracle. Profits are snapped to an integer grid first, which makes the
auction's termination and exactness guarantees crisp: with the final
epsilon below 1/(n+1) the result is optimal for the rescaled problem.
"""
from __future__ import annotations

import numpy as np
from numba import njit
from scipy.optimize import linear_sum_assignment

from .errors import InputError
from .universe import PartialPermutation, UniverseMatching

__all__ = [
    "solve_lap_max",
    "hungarian_oracle",
    "project_blockwise_P",
    "DEFAULT_GRID_RESOLUTION",
]

# Integer grid: profits are rounded to steps of resolution * (profit range).
DEFAULT_GRID_RESOLUTION = 1e-9

_EPS_START_FRACTION = 0.25  # first epsilon = range / 4
_EPS_DIVISOR = 5.0


def _check_profit(profit) -> np.ndarray:
    profit = np.asarray(profit, dtype=np.float64)
    if profit.ndim != 2:
        raise InputError(f"profit must be 2-D, got shape {profit.shape}")
    n, d = profit.shape
    if n > d:
        raise InputError(f"universe too small: {n} rows but only {d} columns")
    if not np.isfinite(profit).all():
        raise InputError("profit matrix contains non-finite entries")
    return profit


def _to_integer_grid(profit: np.ndarray, resolution: float) -> np.ndarray:
    lo, hi = profit.min(), profit.max()
    if hi == lo:
        return np.zeros_like(profit)
    step = (hi - lo) * resolution
    return np.round((profit - lo) / step)


@njit(cache=True)
def _auction_phase(profit, price, eps):
    """One Gauss-Seidel auction round at fixed eps; prices persist across
    phases, assignments do not."""
    n, d = profit.shape
    owner = np.full(d, -1, dtype=np.int64)
    assigned = np.full(n, -1, dtype=np.int64)
    n_unassigned = n
    while n_unassigned > 0:
        for r in range(n):
            if assigned[r] >= 0:
                continue
            # best and second-best value; strict > keeps the lowest column
            # index on ties
            best = 0
            v1 = -np.inf
            v2 = -np.inf
            for c in range(d):
                v = profit[r, c] - price[c]
                if v > v1:
                    v2 = v1
                    v1 = v
                    best = c
                elif v > v2:
                    v2 = v
            if d == 1:
                v2 = v1
            prev = owner[best]
            if prev >= 0:
                assigned[prev] = -1
                n_unassigned += 1
            owner[best] = r
            assigned[r] = best
            price[best] += (v1 - v2) + eps
            n_unassigned -= 1
    return assigned


def solve_lap_max(
    profit,
    grid_resolution: float = DEFAULT_GRID_RESOLUTION,
) -> PartialPermutation:
    """Maximise <profit, P> over total-row partial permutations.

    Runs a forward auction with epsilon scaling: epsilon starts at a quarter
    of the (integer-scaled) profit range and is divided by 5 per phase until
    it drops below 1/(n+1), at which point the integer problem is solved
    exactly. Equal-profit ties resolve to the lowest column index.
    """
    profit = _check_profit(profit)
    n, d = profit.shape
    scaled = _to_integer_grid(profit, grid_resolution)
    rng = scaled.max() - scaled.min()
    if rng == 0:
        return PartialPermutation(n, d, np.arange(n))
    if n < d:
        # pad to a square problem with zero-profit dummy rows: persistent
        # prices across epsilon phases are only sound when every column is
        # contested, and the dummies leave the real-row optimum unchanged
        scaled = np.vstack([scaled, np.zeros((d - n, d))])

    price = np.zeros(d)
    eps = rng * _EPS_START_FRACTION
    eps_final = 1.0 / (d + 1)
    while True:
        assigned = _auction_phase(scaled, price, eps)
        if eps < eps_final:
            break
        eps /= _EPS_DIVISOR
    return PartialPermutation(n, d, assigned[:n])


def hungarian_oracle(profit) -> PartialPermutation:
    """Exact optimal assignment (verification oracle for the auction)."""
    profit = _check_profit(profit)
    n, d = profit.shape
    rows, cols = linear_sum_assignment(profit, maximize=True)
    assign = np.empty(n, dtype=np.int64)
    assign[rows] = cols
    return PartialPermutation(n, d, assign)


def project_blockwise_P(score, block_sizes, d=None, solver=solve_lap_max):
    """Project a stacked (m, d) score onto blockwise partial permutations.

    Each of the k blocks is an independent linear assignment problem; the
    results are stacked into a UniverseMatching.
    """
    score = np.asarray(score, dtype=np.float64)
    if d is None:
        d = score.shape[1]
    if sum(block_sizes) != score.shape[0]:
        raise InputError(
            f"block sizes sum to {sum(block_sizes)} but score has "
            f"{score.shape[0]} rows"
        )
    blocks = []
    offset = 0
    for mi in block_sizes:
        perm = solver(score[offset:offset + mi])
        blocks.append(perm.assign)
        offset += mi
    return UniverseMatching(indices=tuple(blocks), d=d)
