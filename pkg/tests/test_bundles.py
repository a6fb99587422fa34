from __future__ import annotations

import numpy as np
import pytest

from isomatch.bundles import (load_maps, load_matching, load_pairwise_map,
                              save_maps, save_matching, save_pairwise_map,
                              save_trace)
from isomatch.errors import InputError
from isomatch.fmaps import PairwiseMap
from isomatch.ortho import project_orthogonal
from isomatch.universe import UniverseMaps, UniverseMatching


def test_matching_roundtrip(tmp_path):
    U = UniverseMatching(indices=(np.array([4, 0, 2]), np.array([1, 3, 2, 0])),
                         d=5)
    path = tmp_path / "matching.txt"
    save_matching(U, path)
    loaded = load_matching(path)
    assert loaded.d == 5 and loaded.k == 2
    for a, b in zip(loaded.indices, U.indices):
        assert np.array_equal(a, b)


def test_matching_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("bogus 5 shapes 2\n")
    with pytest.raises(InputError, match="not a matching bundle"):
        load_matching(path)
    path.write_text("universe 5 shapes 1\nshape 0 3\n1 2\n")
    with pytest.raises(InputError, match="expected 3"):
        load_matching(path)


def test_maps_roundtrip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    Q = UniverseMaps(blocks=tuple(
        project_orthogonal(rng.standard_normal((4, 6))).values
        for _ in range(3)
    ))
    path = tmp_path / "maps.txt"
    save_maps(Q, path)
    loaded = load_maps(path)
    assert loaded.k == 3 and loaded.b == 4 and loaded.b_prime == 6
    for a, b in zip(loaded.blocks, Q.blocks):
        assert np.array_equal(a, b)


def test_maps_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("nope 1 2 2\n")
    with pytest.raises(InputError, match="not a maps bundle"):
        load_maps(path)


def test_pairwise_map_roundtrip_with_unmatched(tmp_path):
    pmap = PairwiseMap(source=1, target=2,
                       match=np.array([3, -1, 0, -1, 2], dtype=np.int64))
    path = tmp_path / "pair_1_2.txt"
    save_pairwise_map(pmap, path)
    loaded = load_pairwise_map(path, 5, source=1, target=2)
    assert np.array_equal(loaded.match, pmap.match)
    assert loaded.source == 1 and loaded.target == 2
    # unmatched rows are omitted from the file
    assert len(path.read_text().splitlines()) == 3


def test_pairwise_map_range_check(tmp_path):
    path = tmp_path / "pair.txt"
    path.write_text("7 0\n")
    with pytest.raises(InputError, match="out of range"):
        load_pairwise_map(path, 5)


def test_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    save_trace([1.5, 2.25, 2.5], [0.0, 0.1, 0.2], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,objective,wall_seconds"
    assert lines[1].startswith("0,1.5,")
    assert len(lines) == 4
