"""Heat and wave kernel signatures from a truncated LBO eigenbasis.

Pure functions of (eigenvalues, phi): identical bases give bit-identical
descriptors, and rigid motions of the underlying mesh leave them unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .spectral import SpectralBasis

__all__ = [
    "DescriptorField",
    "hks",
    "wks",
    "normalize_descriptors",
    "default_hks_times",
    "default_wks_energies",
]

EIGENVALUE_FLOOR = 1e-8  # eigenvalues below this are treated as the kernel


@dataclass(frozen=True)
class DescriptorField:
    values: np.ndarray  # (m, q)
    kind: str           # "hks" | "wks"
    params: np.ndarray  # time / energy samples, one per column


def default_hks_times(basis: SpectralBasis, n: int = 16) -> np.ndarray:
    """16 log-spaced times in [4 ln10 / lambda_b, 4 ln10 / lambda_2]."""
    lam = basis.eigenvalues
    lam2 = lam[lam > EIGENVALUE_FLOOR]
    if lam2.size == 0:
        raise InputError("all eigenvalues are numerically zero; cannot scale HKS")
    t_min = 4.0 * np.log(10.0) / lam2[-1]
    t_max = 4.0 * np.log(10.0) / lam2[0]
    return np.geomspace(t_min, t_max, n)


def hks(basis: SpectralBasis, times) -> DescriptorField:
    """Heat kernel signature: hks(x, t) = sum_j exp(-lambda_j t) phi_j(x)^2."""
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise InputError("empty HKS time list")
    if np.any(times <= 0):
        raise InputError("HKS times must be strictly positive")
    if np.any(np.diff(times) < 0):
        raise InputError("HKS times must be ascending")
    # (m, q) = (m, b) @ (b, q)
    weights = np.exp(-np.outer(basis.eigenvalues, times))
    values = (basis.phi ** 2) @ weights
    return DescriptorField(values=values, kind="hks", params=times)


def default_wks_energies(basis: SpectralBasis, n: int = 32):
    """32 energies with sigma = 7 * step, trimmed 2 sigma inside the log-spectrum."""
    lam = basis.eigenvalues[basis.eigenvalues > EIGENVALUE_FLOOR]
    if lam.size < 2:
        raise InputError("need at least two positive eigenvalues for WKS energies")
    e_min, e_max = np.log(lam[0]), np.log(lam[-1])
    sigma = 7.0 * (e_max - e_min) / n
    return np.linspace(e_min + 2.0 * sigma, e_max - 2.0 * sigma, n), sigma


def wks(basis: SpectralBasis, energies, sigma: float) -> DescriptorField:
    """Wave kernel signature: Gaussian-in-log-energy weighting of phi_j^2.

    Each column is a convex combination of the phi_j(x)^2 over eigenvalues
    above the numerical kernel floor.
    """
    energies = np.asarray(energies, dtype=np.float64)
    keep = basis.eigenvalues > EIGENVALUE_FLOOR
    if not keep.any():
        raise InputError("all eigenvalues below threshold; WKS undefined")
    log_lam = np.log(basis.eigenvalues[keep])
    phi2 = basis.phi[:, keep] ** 2
    # (q, j) Gaussian weights, normalised per energy
    w = np.exp(-((energies[:, None] - log_lam[None, :]) ** 2) / (2.0 * sigma ** 2))
    values = phi2 @ w.T / w.sum(axis=1)[None, :]
    return DescriptorField(values=values, kind="wks", params=energies)


def normalize_descriptors(field: DescriptorField, mass_diag) -> DescriptorField:
    """Scale each column to unit M-weighted norm: sum_x mass(x) v(x)^2 = 1."""
    mass_diag = np.asarray(mass_diag, dtype=np.float64)
    norms = np.sqrt(mass_diag @ (field.values ** 2))
    if np.any(norms == 0):
        raise InputError(f"descriptor column {int(np.argmin(norms))} is zero")
    return DescriptorField(
        values=field.values / norms, kind=field.kind, params=field.params
    )
