"""Cotangent Laplace-Beltrami discretisation and truncated eigenbasis.

The stiffness matrix follows the classic cotangent scheme: off-diagonal
weight (cot a + cot b) / 2 over the two angles opposite each edge, rows
summing to zero. The eigenproblem is solved for the positive-semidefinite
operator, so eigenvalues come out nonnegative and ascending. Open meshes
get natural (Neumann-like) weights: boundary edges simply have a single
opposite angle.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh, ArpackNoConvergence

from .errors import MeshError, NumericalError
from .mesh import Shape

__all__ = ["SpectralBasis", "cotangent_laplacian", "eigenbasis", "cached_eigenbasis"]

DEFAULT_BASIS_SIZE = 30

# Below this many vertices a dense generalized eigensolve is both faster
# and more robust than shift-invert ARPACK.
_DENSE_CUTOFF = 1200


@dataclass(frozen=True)
class SpectralBasis:
    """Truncated LBO eigenbasis of one shape.

    phi is (m, b) with M-orthonormal columns (phi.T @ diag(mass) @ phi = I),
    eigenvalues ascending with the first ~0 on a connected mesh.
    """

    eigenvalues: np.ndarray  # (b,)
    phi: np.ndarray          # (m, b)
    mass_diag: np.ndarray    # (m,)

    @property
    def b(self) -> int:
        return self.phi.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.phi.shape[0]

    def truncated(self, b: int) -> "SpectralBasis":
        if b > self.b:
            raise ValueError(f"cannot truncate basis of size {self.b} to {b}")
        return SpectralBasis(self.eigenvalues[:b], self.phi[:, :b], self.mass_diag)

    def project(self, functions: np.ndarray) -> np.ndarray:
        """Mass-weighted coefficients phi^T M f; functions is (m, q)."""
        return self.phi.T @ (self.mass_diag[:, None] * functions)


def cotangent_laplacian(shape: Shape):
    """Return (stiffness, mass) for a shape.

    stiffness: sparse symmetric (m, m), zero row sums, off-diagonal
    w_uv = (cot a + cot b) / 2. mass: sparse diagonal of barycentric areas.
    """
    verts, faces = shape.vertices, shape.faces
    m = shape.n_vertices

    p = [verts[faces[:, c]] for c in range(3)]
    # cot of the angle at corner c, opposite edge (c+1, c+2)
    cots = []
    for c in range(3):
        u = p[(c + 1) % 3] - p[c]
        v = p[(c + 2) % 3] - p[c]
        cross = np.linalg.norm(np.cross(u, v), axis=1)
        zero_area = np.flatnonzero(cross <= 0.0)
        if zero_area.size:
            raise MeshError(f"zero-area face {int(zero_area[0])}")
        cots.append(np.einsum("ij,ij->i", u, v) / cross)

    rows, cols, vals = [], [], []
    for c in range(3):
        i, j = faces[:, (c + 1) % 3], faces[:, (c + 2) % 3]
        w = 0.5 * cots[c]
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [w, w, -w, -w]
    stiffness = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m, m),
    ).tocsr()
    mass = sparse.diags(shape.vertex_areas)
    return stiffness, mass


def _fix_signs(phi: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry positive (deterministic)."""
    idx = np.argmax(np.abs(phi), axis=0)
    signs = np.sign(phi[idx, np.arange(phi.shape[1])])
    signs[signs == 0] = 1.0
    return phi * signs


def eigenbasis(stiffness, mass, b: int) -> SpectralBasis:
    """Smallest b eigenpairs of the generalized problem L phi = lambda M phi.

    L is the positive-semidefinite operator -stiffness (the cotangent
    stiffness here has zero row sums and positive off-diagonals, so its
    negation is PSD). Eigenvectors are M-orthonormal with a deterministic
    sign convention.
    """
    m = stiffness.shape[0]
    if b > m:
        raise ValueError(f"basis size {b} exceeds vertex count {m}")
    L = -stiffness
    mass_diag = mass.diagonal()
    if m <= _DENSE_CUTOFF or b > m // 2:
        vals, vecs = eigh(L.toarray(), np.diag(mass_diag))
        vals, vecs = vals[:b], vecs[:, :b]
    else:
        try:
            vals, vecs = eigsh(L.tocsc(), k=b, M=mass.tocsc(), sigma=-1e-6, which="LM")
        except ArpackNoConvergence as exc:
            raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]

    resid = np.linalg.norm(L @ vecs - mass_diag[:, None] * vecs * vals, axis=0)
    scale = np.maximum(np.abs(vals), 1.0) * np.linalg.norm(vecs, axis=0)
    if np.any(resid > 1e-6 * scale):
        raise NumericalError(
            f"eigenpair residuals too large: max {float((resid / scale).max()):.2e}"
        )
    return SpectralBasis(
        eigenvalues=vals, phi=_fix_signs(vecs), mass_diag=mass_diag
    )


def _mesh_digest(shape: Shape) -> str:
    h = hashlib.sha256()
    h.update(shape.vertices.tobytes())
    h.update(shape.faces.tobytes())
    return h.hexdigest()[:16]


def cached_eigenbasis(shape: Shape, b: int, cache_dir=None) -> SpectralBasis:
    """Eigenbasis with an optional on-disk cache keyed by mesh hash and b."""
    if cache_dir is None:
        stiffness, mass = cotangent_laplacian(shape)
        return eigenbasis(stiffness, mass, b)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = cache_dir / f"basis_{_mesh_digest(shape)}_b{b}.npz"
    if key.is_file():
        data = np.load(key)
        return SpectralBasis(data["eigenvalues"], data["phi"], data["mass_diag"])
    stiffness, mass = cotangent_laplacian(shape)
    basis = eigenbasis(stiffness, mass, b)
    np.savez(key, eigenvalues=basis.eigenvalues, phi=basis.phi,
             mass_diag=basis.mass_diag)
    return basis
