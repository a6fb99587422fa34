"""Correspondence quality metrics: normalised geodesic error, PCK curves,
AUC, and the cycle error of a set of pairwise maps.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import InputError
from .fmaps import PairwiseMap, UNMATCHED
from .mesh import Shape, geodesic_distances

__all__ = [
    "MatchReport",
    "geodesic_error",
    "pck_auc",
    "cycle_error",
    "DEFAULT_TAU_MAX",
    "DEFAULT_N_THRESHOLDS",
]

DEFAULT_TAU_MAX = 0.25
DEFAULT_N_THRESHOLDS = 100

# exhaustive triplet enumeration limits; beyond these we sample
_EXHAUSTIVE_MAX_K = 10
_EXHAUSTIVE_MAX_M = 2000
_N_CYCLE_SAMPLES = 100_000


@dataclass
class MatchReport:
    pair_errors: dict        # (i, j) -> list of per-vertex errors
    thresholds: np.ndarray
    pck: np.ndarray          # fraction of errors <= threshold
    auc: float
    cycle_err: float
    runtime_seconds: float = 0.0

    def metrics(self) -> dict:
        return {
            "auc": self.auc,
            "cycle_error": self.cycle_err,
            "mean_geodesic_error": float(
                np.mean(np.concatenate([np.asarray(e) for e in
                                        self.pair_errors.values()]))
            ),
            "runtime_seconds": self.runtime_seconds,
        }


def geodesic_error(
    pred: PairwiseMap, gt: PairwiseMap, shape_j: Shape, diam_j: float
) -> np.ndarray:
    """Normalised geodesic distance between predicted and true matches.

    Evaluated on vertices where the ground truth is defined; a predicted
    non-match on such a vertex scores the maximal error 1 (documented
    convention).
    """
    if diam_j <= 0:
        raise InputError("shape diameter must be positive")
    defined = gt.match >= 0
    if not defined.any():
        raise InputError("ground-truth map has no matched vertices")
    errors = np.ones(int(defined.sum()))
    pred_v = pred.match[defined]
    gt_v = gt.match[defined]
    matched = pred_v >= 0
    # one Dijkstra per distinct ground-truth target vertex
    for target in np.unique(gt_v[matched]):
        dist = geodesic_distances(shape_j, int(target)).dist
        sel = matched & (gt_v == target)
        errors[sel] = dist[pred_v[sel]] / diam_j
    return errors


def pck_auc(errors, thresholds=None):
    """Cumulative error curve and its normalised trapezoidal area.

    curve(tau) = fraction of errors <= tau; auc integrates the curve over
    [0, tau_max] and divides by tau_max, so a perfect solution scores 1.
    """
    errors = np.asarray(errors, dtype=np.float64)
    if errors.size == 0:
        raise InputError("empty error list")
    if thresholds is None:
        thresholds = np.linspace(0.0, DEFAULT_TAU_MAX, DEFAULT_N_THRESHOLDS)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    curve = (errors[None, :] <= thresholds[:, None]).mean(axis=1)
    tau_max = thresholds[-1]
    auc = float(np.trapezoid(curve, thresholds) / tau_max)
    return curve, auc


def cycle_error(pairwise: dict, block_sizes, seed: int = 0) -> float:
    """Fraction of violated transitivity cycles among the pairwise maps.

    pairwise maps ordered pairs (i, j) -> PairwiseMap. For every sampled
    (i, j, l, u), following u through (i->j) then (j->l) must agree with the
    direct map (i->l); an unmatched hop where the direct edge is matched
    counts as a violation. Exhaustive for small collections, else sampled
    with a fixed seed. k < 3 returns 0 by convention.
    """
    k = len(block_sizes)
    if k < 3:
        return 0.0
    m = sum(block_sizes)
    triples = [
        (i, j, l)
        for i in range(k) for j in range(k) for l in range(k)
        if len({i, j, l}) == 3
    ]
    violations = 0
    total = 0
    if k <= _EXHAUSTIVE_MAX_K and m <= _EXHAUSTIVE_MAX_M:
        for i, j, l in triples:
            v, t = _count_violations(
                pairwise[(i, j)], pairwise[(j, l)], pairwise[(i, l)],
                np.arange(block_sizes[i]),
            )
            violations += v
            total += t
    else:
        rng = np.random.default_rng(seed)
        per_triple = max(1, _N_CYCLE_SAMPLES // len(triples))
        for i, j, l in triples:
            u = rng.integers(block_sizes[i], size=per_triple)
            v, t = _count_violations(
                pairwise[(i, j)], pairwise[(j, l)], pairwise[(i, l)], u
            )
            violations += v
            total += t
    return violations / total if total else 0.0


def _count_violations(map_ij, map_jl, map_il, u):
    via_j = map_ij.match[u]
    direct = map_il.match[u]
    # a cycle is testable once the path enters shape j; from there an
    # unmatched second hop with a matched direct edge is a violation, as is
    # any disagreement between the two routes
    tested = via_j >= 0
    hop = np.where(tested, map_jl.match[np.maximum(via_j, 0)], UNMATCHED)
    bad = tested & (hop != direct)
    return int(bad.sum()), int(tested.sum())
