"""On-disk formats for run artifacts.

- matching bundle: per-shape universe index lists (text)
- maps bundle: per-shape functional map blocks (text matrix dump)
- pairwise correspondence files: two columns of 0-based vertex indices,
  one row per matched source vertex
- objective trace: CSV of (iteration, objective, wall seconds)
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import InputError
from .fmaps import PairwiseMap
from .universe import UniverseMaps, UniverseMatching

__all__ = [
    "save_matching", "load_matching",
    "save_maps", "load_maps",
    "save_pairwise_map", "load_pairwise_map",
    "save_trace",
]


def save_matching(U: UniverseMatching, path):
    lines = [f"universe {U.d} shapes {U.k}"]
    for i, ix in enumerate(U.indices):
        lines.append(f"shape {i} {ix.size}")
        lines.append(" ".join(str(v) for v in ix))
    Path(path).write_text("\n".join(lines) + "\n")


def load_matching(path) -> UniverseMatching:
    lines = [l for l in Path(path).read_text().splitlines() if l.strip()]
    head = lines[0].split()
    if head[0] != "universe":
        raise InputError(f"{path}: not a matching bundle")
    d, k = int(head[1]), int(head[3])
    blocks = []
    pos = 1
    for i in range(k):
        meta = lines[pos].split()
        if meta[0] != "shape" or int(meta[1]) != i:
            raise InputError(f"{path}: malformed block header {lines[pos]!r}")
        mi = int(meta[2])
        ix = np.fromstring(lines[pos + 1], dtype=np.int64, sep=" ")
        if ix.size != mi:
            raise InputError(f"{path}: block {i} expected {mi} indices, got {ix.size}")
        blocks.append(ix)
        pos += 2
    return UniverseMatching(indices=tuple(blocks), d=d)


def save_maps(Q: UniverseMaps, path):
    lines = [f"maps {Q.k} {Q.b} {Q.b_prime}"]
    for i, block in enumerate(Q.blocks):
        lines.append(f"block {i}")
        for row in block:
            lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_maps(path) -> UniverseMaps:
    lines = [l for l in Path(path).read_text().splitlines() if l.strip()]
    head = lines[0].split()
    if head[0] != "maps":
        raise InputError(f"{path}: not a maps bundle")
    k, b, bp = int(head[1]), int(head[2]), int(head[3])
    blocks = []
    pos = 1
    for i in range(k):
        if lines[pos].split() != ["block", str(i)]:
            raise InputError(f"{path}: malformed block header {lines[pos]!r}")
        rows = [np.fromstring(lines[pos + 1 + r], dtype=np.float64, sep=" ")
                for r in range(b)]
        block = np.vstack(rows)
        if block.shape != (b, bp):
            raise InputError(f"{path}: block {i} has shape {block.shape}")
        blocks.append(block)
        pos += 1 + b
    return UniverseMaps(blocks=tuple(blocks))


def save_pairwise_map(pmap: PairwiseMap, path):
    """Two-column text: source vertex, target vertex; unmatched rows omitted."""
    matched = np.flatnonzero(pmap.match >= 0)
    pairs = np.column_stack([matched, pmap.match[matched]])
    np.savetxt(path, pairs, fmt="%d")


def load_pairwise_map(path, n_source: int, source: int = 0,
                      target: int = 1) -> PairwiseMap:
    pairs = np.loadtxt(path, dtype=np.int64, ndmin=2)
    match = np.full(n_source, -1, dtype=np.int64)
    if pairs.size:
        if pairs[:, 0].max() >= n_source:
            raise InputError(
                f"{path}: source index {pairs[:, 0].max()} out of range"
            )
        match[pairs[:, 0]] = pairs[:, 1]
    return PairwiseMap(source=source, target=target, match=match)


def save_trace(trace, times, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "objective", "wall_seconds"])
        for t, (f, dt) in enumerate(zip(trace, times)):
            writer.writerow([t, repr(f), f"{dt:.6f}"])
