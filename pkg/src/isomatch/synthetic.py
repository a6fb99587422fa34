"""Deterministic synthetic meshes for tests and demos.

The bumpy grid is a jittered, height-perturbed triangulated rectangle: it is
connected, free of degenerate faces, and has no intrinsic symmetries, which
makes it a convenient generic test surface. Collections of exact isometries
are built by permuting vertices and applying rigid motions.
"""
from __future__ import annotations

import numpy as np

from .mesh import Shape

__all__ = [
    "bumpy_grid_mesh",
    "random_rigid_motion",
    "permuted_isometric_copy",
    "isometric_collection",
]


def bumpy_grid_mesh(nx: int = 18, ny: int = 17, seed: int = 0) -> Shape:
    """Open triangulated grid with seeded jitter and smooth random heights."""
    rng = np.random.default_rng(seed)
    xs, ys = np.meshgrid(np.arange(nx, dtype=float), np.arange(ny, dtype=float),
                         indexing="ij")
    x = xs + rng.uniform(-0.25, 0.25, xs.shape)
    y = ys + rng.uniform(-0.25, 0.25, ys.shape)
    # smooth height field from a few random low-frequency waves
    z = np.zeros_like(x)
    for _ in range(4):
        fx, fy = rng.uniform(0.2, 0.9, 2)
        px, py = rng.uniform(0, 2 * np.pi, 2)
        z += rng.uniform(0.5, 1.5) * np.sin(fx * x + px) * np.cos(fy * y + py)
    verts = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    def vid(i, j):
        return i * ny + j

    faces = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a, b_, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b_, c))
            faces.append((a, c, d))
    return Shape(verts, np.asarray(faces, dtype=np.int64))


def random_rigid_motion(rng) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly random rotation (via QR of a Gaussian) and translation."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q, rng.uniform(-10.0, 10.0, 3)


def permuted_isometric_copy(shape: Shape, rng):
    """Vertex-permuted, rigidly moved copy of a shape.

    Returns (copy, to_copy) where to_copy[u] is the copy's index of the
    original vertex u.
    """
    m = shape.n_vertices
    perm = rng.permutation(m)      # copy index -> original index
    to_copy = np.empty(m, dtype=np.int64)
    to_copy[perm] = np.arange(m)   # original index -> copy index
    rot, trans = random_rigid_motion(rng)
    verts = shape.vertices[perm] @ rot.T + trans
    faces = to_copy[shape.faces]
    return Shape(verts, faces), to_copy


def isometric_collection(base: Shape, k: int, seed: int = 0):
    """k exact-isometry copies of a base shape (the first copy is identity).

    Returns (shapes, gt_to_copy) where gt_to_copy[i][u] maps vertex u of the
    base shape to its twin in shapes[i].
    """
    rng = np.random.default_rng(seed)
    shapes = [base]
    gt = [np.arange(base.n_vertices)]
    for _ in range(k - 1):
        copy, to_copy = permuted_isometric_copy(base, rng)
        shapes.append(copy)
        gt.append(to_copy)
    return shapes, gt
