from __future__ import annotations

import numpy as np
import pytest
from scipy.sparse import csgraph

from isomatch.errors import InputError, MeshError
from isomatch.mesh import (Shape, diameter, farthest_point_samples,
                           geodesic_distances, load_mesh, save_mesh)
from isomatch.synthetic import bumpy_grid_mesh


def test_shape_derives_unique_sorted_edges(tiny_shape):
    expected = np.array([[0, 1], [0, 2], [0, 3], [1, 2], [2, 3]])
    assert np.array_equal(tiny_shape.edges, expected)
    assert np.allclose(
        tiny_shape.edge_lengths,
        np.linalg.norm(
            tiny_shape.vertices[expected[:, 0]] - tiny_shape.vertices[expected[:, 1]],
            axis=1,
        ),
    )


def test_vertex_areas_sum_to_total_face_area(grid_shape):
    p0 = grid_shape.vertices[grid_shape.faces[:, 0]]
    p1 = grid_shape.vertices[grid_shape.faces[:, 1]]
    p2 = grid_shape.vertices[grid_shape.faces[:, 2]]
    total = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1).sum()
    assert grid_shape.vertex_areas.sum() == pytest.approx(total, rel=1e-12)
    assert (grid_shape.vertex_areas > 0).all()


def test_shape_rejects_bad_inputs():
    verts = np.zeros((3, 3))
    verts[1, 0] = 1.0
    verts[2, 1] = 1.0
    with pytest.raises(MeshError, match="outside"):
        Shape(verts, np.array([[0, 1, 3]]))
    with pytest.raises(MeshError, match="degenerate"):
        Shape(verts, np.array([[0, 1, 1]]))
    with pytest.raises(MeshError, match="no faces"):
        Shape(verts, np.zeros((0, 3), dtype=np.int64))
    with pytest.raises(MeshError, match="vertices must be"):
        Shape(np.zeros((3, 2)), np.array([[0, 1, 2]]))


def test_shape_rejects_zero_length_edge():
    verts = np.array([[0.0, 0, 0], [0.0, 0, 0], [0, 1, 0]])
    with pytest.raises(MeshError, match="zero-length edge"):
        Shape(verts, np.array([[0, 1, 2]]))


def test_shape_rejects_disconnected_mesh():
    verts = np.array([
        [0.0, 0, 0], [1, 0, 0], [0, 1, 0],
        [5.0, 5, 0], [6, 5, 0], [5, 6, 0],
    ])
    faces = np.array([[0, 1, 2], [3, 4, 5]])
    with pytest.raises(MeshError, match="disconnected"):
        Shape(verts, faces)


def test_off_roundtrip_is_bit_exact(grid_shape, tmp_path):
    path = tmp_path / "mesh.off"
    save_mesh(grid_shape, path)
    loaded = load_mesh(path)
    assert np.array_equal(loaded.vertices, grid_shape.vertices)
    assert np.array_equal(loaded.faces, grid_shape.faces)


def test_ply_roundtrip_with_colors(tiny_shape, tmp_path):
    path = tmp_path / "mesh.ply"
    colors = np.array([[255, 0, 0], [0, 255, 0], [0, 0, 255], [7, 7, 7]],
                      dtype=np.uint8)
    save_mesh(tiny_shape, path, vertex_colors=colors)
    loaded = load_mesh(path)
    assert np.array_equal(loaded.vertices, tiny_shape.vertices)
    assert np.array_equal(loaded.faces, tiny_shape.faces)
    # colour columns are present in the file
    text = path.read_text()
    assert "property uchar red" in text
    assert "255 0 0" in text


def test_off_colors_rejected(tiny_shape, tmp_path):
    with pytest.raises(InputError, match="PLY"):
        save_mesh(tiny_shape, tmp_path / "mesh.off",
                  vertex_colors=np.zeros((4, 3), dtype=np.uint8))


def test_load_mesh_errors(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_mesh(tmp_path / "missing.off")
    bad = tmp_path / "bad.off"
    bad.write_text("NOT_OFF\n1 1 0\n")
    with pytest.raises(InputError, match="header"):
        load_mesh(bad)
    quad = tmp_path / "quad.off"
    quad.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(InputError, match="triangular"):
        load_mesh(quad)
    with pytest.raises(InputError, match="format"):
        load_mesh(quad, fmt="stl")


def test_geodesic_distances_match_independent_shortest_paths(grid_shape):
    # independent route: dense all-pairs Floyd-Warshall on the same graph
    dense = csgraph.floyd_warshall(grid_shape.edge_graph(), directed=False)
    for src in (0, 13, grid_shape.n_vertices - 1):
        field = geodesic_distances(grid_shape, src)
        assert field.source == src
        assert np.allclose(field.dist, dense[src], atol=1e-12)
    assert geodesic_distances(grid_shape, 0).dist[0] == 0.0


def test_geodesic_distances_source_range(grid_shape):
    with pytest.raises(InputError):
        geodesic_distances(grid_shape, -1)
    with pytest.raises(InputError):
        geodesic_distances(grid_shape, grid_shape.n_vertices)


def test_diameter_exact_and_monotone(grid_shape):
    dense = csgraph.floyd_warshall(grid_shape.edge_graph(), directed=False)
    exact = dense.max()
    full = diameter(grid_shape, n_sources=grid_shape.n_vertices)
    assert full == pytest.approx(exact, rel=1e-12)
    prev = 0.0
    for n in (1, 3, 8, 20):
        est = diameter(grid_shape, n_sources=n, seed=0)
        assert est >= prev - 1e-12
        assert est <= exact + 1e-12
        prev = est
    with pytest.raises(InputError):
        diameter(grid_shape, n_sources=0)


def test_farthest_point_samples_deterministic(grid_shape):
    a = farthest_point_samples(grid_shape, 6, seed=3)
    b = farthest_point_samples(grid_shape, 6, seed=3)
    assert np.array_equal(a, b)
    assert np.unique(a).size == 6


def test_bumpy_grid_is_deterministic():
    a = bumpy_grid_mesh(6, 5, seed=9)
    b = bumpy_grid_mesh(6, 5, seed=9)
    assert np.array_equal(a.vertices, b.vertices)
    assert a.n_vertices == 30
    assert a.n_faces == 2 * 5 * 4
