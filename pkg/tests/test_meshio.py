"""Mesh file round-trips and format validation for OBJ and binary PLY."""

from __future__ import annotations

import numpy as np
import pytest

from udfmesh.fields.meshfield import MeshDistance
from udfmesh.meshio import (
    MeshFormatError,
    load_mesh,
    read_obj,
    read_ply,
    save_mesh,
    triangle_areas,
    write_obj,
    write_ply,
)
from udfmesh.primitives import make_sphere_mesh


def random_mesh(rng, n_verts=64, n_faces=100):
    verts = rng.uniform(-1.0, 1.0, size=(n_verts, 3))
    faces = rng.integers(0, n_verts, size=(n_faces, 3)).astype(np.int64)
    return verts, faces


def test_obj_round_trip_is_exact(tmp_path, rng):
    verts, faces = random_mesh(rng)
    path = tmp_path / "m.obj"
    write_obj(path, verts, faces)
    rv, rf = read_obj(path)
    np.testing.assert_array_equal(rv, verts)  # 17 significant digits: bitwise
    np.testing.assert_array_equal(rf, faces)


def test_ply_round_trip_is_exact(tmp_path, rng):
    verts, faces = random_mesh(rng)
    path = tmp_path / "m.ply"
    write_ply(path, verts, faces)
    rv, rf = read_ply(path)
    np.testing.assert_array_equal(rv, verts)
    np.testing.assert_array_equal(rf, faces)


def test_obj_writer_layout(tmp_path):
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    faces = np.array([[0, 1, 2]])
    path = tmp_path / "tri.obj"
    write_obj(path, verts, faces)
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert sum(1 for l in lines if l.startswith("v ")) == 3
    assert lines[-1] == "f 1 2 3"  # 1-based indices


def test_obj_writer_deterministic(tmp_path, rng):
    verts, faces = random_mesh(rng)
    p1, p2 = tmp_path / "a.obj", tmp_path / "b.obj"
    write_obj(p1, verts, faces)
    write_obj(p2, verts, faces)
    assert p1.read_bytes() == p2.read_bytes()


def test_obj_reader_fan_triangulates_polygons(tmp_path):
    path = tmp_path / "quad.obj"
    path.write_text(
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"
    )
    verts, faces = read_obj(path)
    assert verts.shape == (4, 3)
    np.testing.assert_array_equal(faces, [[0, 1, 2], [0, 2, 3]])


def test_obj_reader_handles_slashes_and_negatives(tmp_path):
    path = tmp_path / "rich.obj"
    path.write_text(
        "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2/2/1 -1/3/1\n"
    )
    _, faces = read_obj(path)
    np.testing.assert_array_equal(faces, [[0, 1, 2]])


@pytest.mark.parametrize(
    "content, message",
    [
        ("v 0 0\n", "malformed vertex"),
        ("v 0 0 0\nf 1 2\n", "fewer than 3"),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", "index out of range"),
        ("f 1 2 3\n", "no vertices"),
    ],
)
def test_obj_reader_rejects_malformed(tmp_path, content, message):
    path = tmp_path / "bad.obj"
    path.write_text(content)
    with pytest.raises(MeshFormatError, match=message):
        read_obj(path)


def test_ply_reader_rejects_non_ply(tmp_path):
    path = tmp_path / "bad.ply"
    path.write_bytes(b"not a ply\n")
    with pytest.raises(MeshFormatError, match="not a PLY"):
        read_ply(path)


def test_ply_reader_rejects_ascii_format(tmp_path):
    path = tmp_path / "ascii.ply"
    path.write_bytes(
        b"ply\nformat ascii 1.0\nelement vertex 0\n"
        b"property double x\nproperty double y\nproperty double z\n"
        b"element face 0\nproperty list uchar int vertex_indices\nend_header\n"
    )
    with pytest.raises(MeshFormatError, match="unsupported PLY format"):
        read_ply(path)


def test_ply_reader_rejects_truncated_body(tmp_path, rng):
    verts, faces = random_mesh(rng, n_verts=16, n_faces=8)
    path = tmp_path / "trunc.ply"
    write_ply(path, verts, faces)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(MeshFormatError):
        read_ply(path)


def test_ply_reads_float32_vertices(tmp_path):
    # interoperability: other writers commonly store float32 coordinates
    verts32 = np.array([[0.5, 0.25, -1.0], [1.0, 2.0, 3.0], [0, 0, 0]], dtype="<f4")
    header = (
        b"ply\nformat binary_little_endian 1.0\n"
        b"element vertex 3\n"
        b"property float x\nproperty float y\nproperty float z\n"
        b"element face 1\nproperty list uchar int vertex_indices\nend_header\n"
    )
    body = verts32.tobytes() + bytes([3]) + np.array([0, 1, 2], "<i4").tobytes()
    path = tmp_path / "f32.ply"
    path.write_bytes(header + body)
    rv, rf = read_ply(path)
    np.testing.assert_allclose(rv, verts32.astype(np.float64))
    np.testing.assert_array_equal(rf, [[0, 1, 2]])


def test_load_save_dispatch_by_extension(tmp_path, rng):
    verts, faces = random_mesh(rng)
    obj, ply = tmp_path / "m.obj", tmp_path / "m.ply"
    save_mesh(obj, verts, faces)
    save_mesh(ply, verts, faces)
    np.testing.assert_array_equal(load_mesh(obj)[0], verts)
    np.testing.assert_array_equal(load_mesh(ply)[0], verts)


def test_save_mesh_format_override(tmp_path, rng):
    verts, faces = random_mesh(rng)
    path = tmp_path / "weird.bin"
    save_mesh(path, verts, faces, fmt="ply")
    rv, _ = read_ply(path)
    np.testing.assert_array_equal(rv, verts)


def test_unknown_extension_rejected(tmp_path):
    with pytest.raises(MeshFormatError, match="unknown mesh extension"):
        load_mesh(tmp_path / "m.stl")
    with pytest.raises(MeshFormatError, match="unknown mesh extension"):
        save_mesh(tmp_path / "m.stl", np.zeros((1, 3)), np.zeros((0, 3), np.int64))


def test_triangle_areas():
    verts = np.array([[0.0, 0, 0], [2.0, 0, 0], [0.0, 2, 0], [0.0, 0, 3]])
    faces = np.array([[0, 1, 2], [0, 1, 3]])
    np.testing.assert_allclose(triangle_areas(verts, faces), [2.0, 3.0])


def test_large_mesh_survives_ply_round_trip(tmp_path):
    verts, faces = make_sphere_mesh(radius=0.5, n_lat=64, n_lon=128)
    path = tmp_path / "big.ply"
    write_ply(path, verts, faces)
    rv, rf = read_ply(path)
    # the re-read mesh is geometrically identical: zero distance between
    # original vertices and the re-read surface
    d, _, _ = MeshDistance(rv, rf).query(verts)
    assert d.max() == 0.0
    assert len(rf) == len(faces)
