"""Shape-to-universe containers shared by the assignment, sync and solver code.

A UniverseMatching stores the stacked block matrix of shape-to-universe
partial permutations as per-vertex universe indices (never as dense 0/1
matrices). A UniverseMaps stores the stacked shape-to-universe functional
map blocks, square for full shapes and rectangular for partial ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PartialPermutation", "UniverseMatching", "UniverseMaps"]


@dataclass(frozen=True)
class PartialPermutation:
    """Total row assignment into n_cols >= n_rows distinct columns."""

    n_rows: int
    n_cols: int
    assign: np.ndarray  # (n_rows,) column index per row, all distinct

    def __post_init__(self):
        assign = np.asarray(self.assign, dtype=np.int64)
        object.__setattr__(self, "assign", assign)
        if assign.shape != (self.n_rows,):
            raise ValueError(f"assign must have shape ({self.n_rows},)")
        if self.n_rows > self.n_cols:
            raise ValueError(
                f"{self.n_rows} rows cannot be injectively assigned "
                f"to {self.n_cols} columns"
            )
        if assign.size and (assign.min() < 0 or assign.max() >= self.n_cols):
            raise ValueError("assignment index out of range")
        if np.unique(assign).size != assign.size:
            raise ValueError("assignment columns are not distinct")

    def objective(self, profit: np.ndarray) -> float:
        return float(profit[np.arange(self.n_rows), self.assign].sum())


@dataclass(frozen=True)
class UniverseMatching:
    """Blockwise partial permutations, one block per shape, as index lists."""

    indices: tuple  # k arrays, indices[i] has length m_i, values in [0, d)
    d: int

    def __post_init__(self):
        blocks = tuple(np.asarray(ix, dtype=np.int64) for ix in self.indices)
        object.__setattr__(self, "indices", blocks)
        for i, ix in enumerate(blocks):
            if ix.size > self.d:
                raise ValueError(f"block {i} has {ix.size} rows but d={self.d}")
            if ix.size and (ix.min() < 0 or ix.max() >= self.d):
                raise ValueError(f"block {i} has universe index out of [0, {self.d})")
            if np.unique(ix).size != ix.size:
                raise ValueError(f"block {i} assigns a universe point twice")

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def block_sizes(self):
        return [ix.size for ix in self.indices]

    @property
    def m(self) -> int:
        return sum(self.block_sizes)

    def block(self, i: int) -> PartialPermutation:
        ix = self.indices[i]
        return PartialPermutation(n_rows=ix.size, n_cols=self.d, assign=ix)

    def dense_block(self, i: int) -> np.ndarray:
        """Dense 0/1 matrix P_i; for oracles and small tests only."""
        ix = self.indices[i]
        P = np.zeros((ix.size, self.d))
        P[np.arange(ix.size), ix] = 1.0
        return P


@dataclass(frozen=True)
class UniverseMaps:
    """Per-shape functional map blocks, each (b, b_prime) semi-orthogonal."""

    blocks: tuple  # k arrays of shape (b, b_prime)

    def __post_init__(self):
        blocks = tuple(np.asarray(c, dtype=np.float64) for c in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        shapes = {c.shape for c in blocks}
        if len(shapes) > 1:
            raise ValueError(f"inconsistent block shapes: {sorted(shapes)}")
        b, bp = blocks[0].shape
        if b > bp:
            raise ValueError(f"blocks must be wide or square, got {b}x{bp}")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def b(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def b_prime(self) -> int:
        return self.blocks[0].shape[1]

    def stacked(self) -> np.ndarray:
        return np.vstack(self.blocks)

    def orthogonality_defect(self) -> float:
        """max over blocks of max|C C^T - I|."""
        eye = np.eye(self.b)
        return max(
            float(np.abs(c @ c.T - eye).max()) for c in self.blocks
        )
