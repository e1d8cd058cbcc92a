"""Parametric reference meshes used for ground truth and evaluation."""

from __future__ import annotations

import numpy as np

Array = np.ndarray


def make_box_mesh(half_extents=(0.5, 0.5, 0.5), center=(0.0, 0.0, 0.0)):
    """Axis-aligned box as 12 triangles with outward winding."""
    h = np.broadcast_to(np.asarray(half_extents, dtype=np.float64), (3,))
    c = np.asarray(center, dtype=np.float64)
    corners = np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=np.float64,
    )
    verts = c + corners * h
    # quads per face, outward right-handed winding (corner bit order: x, y, z)
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    faces = []
    for a, b, cc, d in quads:
        faces.append((a, b, cc))
        faces.append((a, cc, d))
    return verts, np.asarray(faces, dtype=np.int64)


def make_sphere_mesh(radius: float = 0.5, center=(0.0, 0.0, 0.0),
                     n_lat: int = 96, n_lon: int = 192):
    """Latitude/longitude sphere triangulation."""
    c = np.asarray(center, dtype=np.float64)
    verts = [c + np.array([0.0, 0.0, radius]), c + np.array([0.0, 0.0, -radius])]
    rows = []
    for i in range(1, n_lat):
        theta = np.pi * i / n_lat
        row = []
        for j in range(n_lon):
            phi = 2 * np.pi * j / n_lon
            p = c + radius * np.array(
                [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
            )
            row.append(len(verts))
            verts.append(p)
        rows.append(row)
    faces = []
    for j in range(n_lon):
        jn = (j + 1) % n_lon
        faces.append((0, rows[0][j], rows[0][jn]))
        faces.append((1, rows[-1][jn], rows[-1][j]))
    for i in range(len(rows) - 1):
        for j in range(n_lon):
            jn = (j + 1) % n_lon
            a, b = rows[i][j], rows[i][jn]
            d, e = rows[i + 1][j], rows[i + 1][jn]
            faces.append((a, d, e))
            faces.append((a, e, b))
    return np.asarray(verts), np.asarray(faces, dtype=np.int64)


def make_disk_mesh(radius: float = 1.0, z0: float = 0.0,
                   n_r: int = 48, n_theta: int = 192):
    """Flat disk in the plane z = z0, triangulated as rings around a center fan."""
    verts = [np.array([0.0, 0.0, z0])]
    rings = []
    for i in range(1, n_r + 1):
        r = radius * i / n_r
        ring = []
        for j in range(n_theta):
            a = 2 * np.pi * j / n_theta
            ring.append(len(verts))
            verts.append(np.array([r * np.cos(a), r * np.sin(a), z0]))
        rings.append(ring)
    faces = []
    for j in range(n_theta):
        jn = (j + 1) % n_theta
        faces.append((0, rings[0][j], rings[0][jn]))
    for i in range(n_r - 1):
        for j in range(n_theta):
            jn = (j + 1) % n_theta
            a, b = rings[i][j], rings[i][jn]
            d, e = rings[i + 1][j], rings[i + 1][jn]
            faces.append((a, d, e))
            faces.append((a, e, b))
    return np.asarray(verts), np.asarray(faces, dtype=np.int64)


def make_square_mesh(half: float = 1.0, z0: float = 0.0, n: int = 32):
    """Planar square patch [-half, half]^2 at z = z0, as an n x n grid."""
    xs = np.linspace(-half, half, n + 1)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    verts = np.stack([gx.ravel(), gy.ravel(), np.full(gx.size, z0)], axis=1)
    faces = []
    for i in range(n):
        for j in range(n):
            a = i * (n + 1) + j
            b = a + (n + 1)
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return verts, np.asarray(faces, dtype=np.int64)


def make_mobius_mesh(major: float = 0.65, half_width: float = 0.3,
                     n_u: int = 384, n_v: int = 32):
    """One-half-twist strip: an open, non-orientable surface.

    Parametrized as center circle radius ``major`` with a strip of total
    width ``2 * half_width`` twisting by pi over one revolution. The seam
    at u = 2*pi is stitched to u = 0 with the v direction reversed.
    """
    verts = np.empty((n_u * (n_v + 1), 3))
    for i in range(n_u):
        u = 2 * np.pi * i / n_u
        for j in range(n_v + 1):
            v = half_width * (2.0 * j / n_v - 1.0)
            w = major + v * np.cos(u / 2)
            verts[i * (n_v + 1) + j] = (w * np.cos(u), w * np.sin(u), v * np.sin(u / 2))

    def vid(i: int, j: int) -> int:
        if i == n_u:  # seam: same ring as u=0 but with v reversed
            return n_v - j
        return i * (n_v + 1) + j

    faces = []
    for i in range(n_u):
        for j in range(n_v):
            a, b = vid(i, j), vid(i, j + 1)
            d, e = vid(i + 1, j), vid(i + 1, j + 1)
            faces.append((a, d, e))
            faces.append((a, e, b))
    return verts, np.asarray(faces, dtype=np.int64)
