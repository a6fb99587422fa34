"""End-to-end orchestration: descriptors -> pairwise functional maps ->
synchronisation -> alternating optimisation.

Stages are exposed separately so the CLI can run initialisation or
synchronisation on their own; per-shape and per-pair work runs on a thread
pool (numpy releases the GIL in the heavy kernels).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import core, descriptors, fmaps, spectral, sync
from .errors import InputError
from .mesh import Shape
from .universe import UniverseMaps, UniverseMatching

__all__ = ["RunConfig", "PipelineResult", "compute_bases", "pairwise_init",
           "synchronize", "match_collection"]


@dataclass
class RunConfig:
    basis_size: int = spectral.DEFAULT_BASIS_SIZE
    universe_size: int | None = None     # None = max vertex count ("auto")
    epsilon: float = core.DEFAULT_EPSILON
    max_iters: int = core.DEFAULT_MAX_ITERS
    band_radius: int = sync.DEFAULT_BAND_RADIUS
    hks_samples: int = 16
    wks_samples: int = 32
    upsample_start: int = 10
    upsample_step: int = 5
    threads: int = 0                     # 0 = auto-detect
    seed: int = 0

    def n_workers(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class PipelineResult:
    bases: list
    pairwise_maps: dict                  # ordered pair (i, j) -> PairwiseMap
    U0: UniverseMatching | None = None
    Q0: UniverseMaps | None = None
    state: core.SolverState | None = None
    iteration_times: list = field(default_factory=list)


def compute_bases(shapes: list[Shape], config: RunConfig):
    """Truncated LBO eigenbasis per shape, in parallel."""
    for i, s in enumerate(shapes):
        if config.basis_size > s.n_vertices:
            raise InputError(
                f"basis size {config.basis_size} exceeds vertex count "
                f"{s.n_vertices} of shape {i}"
            )
    with ThreadPoolExecutor(max_workers=config.n_workers()) as pool:
        return list(pool.map(
            lambda s: spectral.cached_eigenbasis(s, config.basis_size), shapes
        ))


def _descriptor_coefficients(basis, config: RunConfig) -> np.ndarray:
    """Stacked, normalised HKS+WKS, projected to spectral coefficients (q, b)."""
    h = descriptors.hks(basis, descriptors.default_hks_times(basis,
                                                             config.hks_samples))
    energies, sigma = descriptors.default_wks_energies(basis, config.wks_samples)
    w = descriptors.wks(basis, energies, sigma)
    fields = [descriptors.normalize_descriptors(f, basis.mass_diag)
              for f in (h, w)]
    values = np.hstack([f.values for f in fields])
    return basis.project(values).T


def pairwise_init(bases, config: RunConfig):
    """Functional maps and pointwise maps for all unordered shape pairs.

    Maps are solved from descriptor coefficients at a small spectral size
    and grown to the full basis by spectral upsampling. Returns
    (pairwise_fmaps, pairwise_maps) keyed by (i, j), i < j, plus the reverse
    pointwise maps keyed (j, i).
    """
    k = len(bases)
    b = config.basis_size
    b0 = min(config.upsample_start, b)
    coeffs = [_descriptor_coefficients(basis, config) for basis in bases]

    def solve_pair(pair):
        i, j = pair
        fm0 = fmaps.solve_fmap(coeffs[i][:, :b0], coeffs[j][:, :b0],
                               source=i, target=j)
        fm = fmaps.spectral_upsample(bases[i], bases[j], fm0, b,
                                     step=config.upsample_step)
        fwd = fmaps.extract_pointwise(bases[i], bases[j], fm)
        rev_fm = fmaps.PairwiseFmap(source=j, target=i, C=fm.C.T)
        rev = fmaps.extract_pointwise(bases[j], bases[i], rev_fm)
        return (i, j), fm, fwd, rev

    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    with ThreadPoolExecutor(max_workers=config.n_workers()) as pool:
        solved = list(pool.map(solve_pair, pairs))

    pairwise_fmaps, pairwise_maps = {}, {}
    for (i, j), fm, fwd, rev in solved:
        pairwise_fmaps[(i, j)] = fm
        pairwise_maps[(i, j)] = fwd
        pairwise_maps[(j, i)] = rev
    return pairwise_fmaps, pairwise_maps


def synchronize(bases, pairwise_fmaps, config: RunConfig):
    """Band-filter and orthogonalise pairwise maps, then synchronise into
    shape-to-universe initial values (U0, Q0)."""
    k = len(bases)
    b = config.basis_size
    cleaned = {}
    for (i, j), fm in pairwise_fmaps.items():
        filtered = sync.band_filter(fm.C, config.band_radius)
        cleaned[(i, j)] = sync.project_orthogonal(filtered).values
    Q0 = sync.ortho_sync(cleaned, k, b)
    psi = sync.build_universe_embedding(bases, Q0)
    sizes = [basis.n_vertices for basis in bases]
    d = config.universe_size if config.universe_size else max(sizes)
    U0 = sync.perm_sync(psi, sizes, d)
    return U0, Q0


def match_collection(shapes: list[Shape], config: RunConfig) -> PipelineResult:
    """Full pipeline on a shape collection; final correspondences are the
    universe-factored pairwise maps of the optimised matching."""
    if len(shapes) < 2:
        raise InputError("need at least two shapes to match")
    bases = compute_bases(shapes, config)
    pairwise_fmaps, _ = pairwise_init(bases, config)
    U0, Q0 = synchronize(bases, pairwise_fmaps, config)

    stacked = core.StackedBasis(blocks=tuple(basis.phi for basis in bases))
    times = []
    state = core.run(
        U0, Q0, stacked,
        epsilon=config.epsilon, max_iters=config.max_iters,
        on_iteration=lambda t, f, dt: times.append(dt),
    )
    pairwise = {
        (i, j): core.pairwise_from_universe(state.U, i, j)
        for i in range(len(shapes)) for j in range(len(shapes)) if i != j
    }
    return PipelineResult(
        bases=bases, pairwise_maps=pairwise, U0=U0, Q0=Q0, state=state,
        iteration_times=times,
    )
