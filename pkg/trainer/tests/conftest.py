"""Shared fixtures: a self-contained sphere tessellation written as OBJ.

The tests build their own reference geometry so the suite has no data
dependencies outside the repository.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest


def sphere_mesh(radius: float = 0.5, n_lat: int = 48, n_lon: int = 96):
    """Latitude/longitude tessellation: two pole fans plus quad rings."""
    verts = [(0.0, 0.0, radius)]
    for i in range(1, n_lat):
        theta = math.pi * i / n_lat
        st, ct = math.sin(theta), math.cos(theta)
        for j in range(n_lon):
            phi = 2.0 * math.pi * j / n_lon
            verts.append((radius * st * math.cos(phi),
                          radius * st * math.sin(phi),
                          radius * ct))
    verts.append((0.0, 0.0, -radius))
    south = len(verts) - 1

    def ring(i: int, j: int) -> int:
        return 1 + (i - 1) * n_lon + (j % n_lon)

    faces = []
    for j in range(n_lon):
        faces.append((0, ring(1, j), ring(1, j + 1)))
    for i in range(1, n_lat - 1):
        for j in range(n_lon):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j + 1), ring(i + 1, j)
            faces.append((a, b, c))
            faces.append((a, c, d))
    for j in range(n_lon):
        faces.append((south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)))
    return np.asarray(verts, dtype=np.float64), np.asarray(faces, dtype=np.int64)


def write_obj(path: Path, vertices: np.ndarray, faces: np.ndarray) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for v in vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for f in faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
    return path


@pytest.fixture(scope="session")
def sphere_obj(tmp_path_factory) -> Path:
    v, f = sphere_mesh()
    return write_obj(tmp_path_factory.mktemp("meshes") / "sphere.obj", v, f)


@pytest.fixture(scope="session")
def coarse_sphere_obj(tmp_path_factory) -> Path:
    v, f = sphere_mesh(n_lat=12, n_lon=24)
    return write_obj(tmp_path_factory.mktemp("meshes") / "sphere_coarse.obj", v, f)
