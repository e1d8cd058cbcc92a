"""Exact point-to-mesh distance field backed by a bounding-volume hierarchy.

The BVH is an implicit balanced binary tree over triangles sorted by the
Morton code of their centroid: node ``i`` at level ``d`` covers the
sorted range [j*n >> d, (j+1)*n >> d). Queries descend nearer children
first and prune on exact point-to-box lower bounds, so the returned
distance equals the exact minimum point-to-triangle distance over the
whole mesh (ties resolve to the first triangle in traversal order,
which is schedule-independent and therefore deterministic).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .. import meshio
from .base import Array, ScalarField

_LEAF_SIZE = 8


@njit(cache=True, inline="always")
def _closest_on_triangle(px, py, pz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Closest point on triangle abc to p (Ericson, Real-Time Collision Detection)."""
    abx, aby, abz = bx - ax, by - ay, bz - az
    acx, acy, acz = cx - ax, cy - ay, cz - az
    apx, apy, apz = px - ax, py - ay, pz - az
    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return ax, ay, az
    bpx, bpy, bpz = px - bx, py - by, pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return bx, by, bz
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return ax + v * abx, ay + v * aby, az + v * abz
    cpx, cpy, cpz = px - cx, py - cy, pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return cx, cy, cz
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return ax + w * acx, ay + w * acy, az + w * acz
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return bx + w * (cx - bx), by + w * (cy - by), bz + w * (cz - bz)
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return (ax + abx * v + acx * w, ay + aby * v + acy * w, az + abz * v + acz * w)


@njit(cache=True, inline="always")
def _box_dist_sq(px, py, pz, lox, loy, loz, hix, hiy, hiz):
    dx = max(lox - px, 0.0, px - hix)
    dy = max(loy - py, 0.0, py - hiy)
    dz = max(loz - pz, 0.0, pz - hiz)
    return dx * dx + dy * dy + dz * dz


@njit(cache=True, parallel=True)
def _bvh_query(points, node_lo, node_hi, node_start, node_end, leaf_base,
               tri_a, tri_b, tri_c, out_d, out_q, out_t):
    n_pts = points.shape[0]
    for i in prange(n_pts):
        px, py, pz = points[i, 0], points[i, 1], points[i, 2]
        best = np.inf
        bqx = bqy = bqz = 0.0
        btri = -1
        stack = np.empty(128, dtype=np.int64)
        top = 0
        stack[0] = 1
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            lb = _box_dist_sq(px, py, pz,
                              node_lo[node, 0], node_lo[node, 1], node_lo[node, 2],
                              node_hi[node, 0], node_hi[node, 1], node_hi[node, 2])
            if lb >= best:
                continue
            if node >= leaf_base:
                for t in range(node_start[node], node_end[node]):
                    qx, qy, qz = _closest_on_triangle(
                        px, py, pz,
                        tri_a[t, 0], tri_a[t, 1], tri_a[t, 2],
                        tri_b[t, 0], tri_b[t, 1], tri_b[t, 2],
                        tri_c[t, 0], tri_c[t, 1], tri_c[t, 2])
                    dx, dy, dz = px - qx, py - qy, pz - qz
                    dsq = dx * dx + dy * dy + dz * dz
                    if dsq < best:
                        best = dsq
                        bqx, bqy, bqz = qx, qy, qz
                        btri = t
            else:
                l, r = 2 * node, 2 * node + 1
                if node_start[r] >= node_end[r]:
                    stack[top] = l
                    top += 1
                else:
                    dl = _box_dist_sq(px, py, pz,
                                      node_lo[l, 0], node_lo[l, 1], node_lo[l, 2],
                                      node_hi[l, 0], node_hi[l, 1], node_hi[l, 2])
                    dr = _box_dist_sq(px, py, pz,
                                      node_lo[r, 0], node_lo[r, 1], node_lo[r, 2],
                                      node_hi[r, 0], node_hi[r, 1], node_hi[r, 2])
                    # push the farther child first so the nearer one is visited next
                    if dl <= dr:
                        stack[top] = r
                        stack[top + 1] = l
                    else:
                        stack[top] = l
                        stack[top + 1] = r
                    top += 2
        out_d[i] = np.sqrt(best)
        out_q[i, 0], out_q[i, 1], out_q[i, 2] = bqx, bqy, bqz
        out_t[i] = btri


def _morton3(q: Array) -> Array:
    """Interleave 10-bit integer coordinates (n, 3) into 30-bit Morton codes."""
    def part(x):
        x = x.astype(np.uint64)
        x = (x | (x << np.uint64(16))) & np.uint64(0x030000FF)
        x = (x | (x << np.uint64(8))) & np.uint64(0x0300F00F)
        x = (x | (x << np.uint64(4))) & np.uint64(0x030C30C3)
        x = (x | (x << np.uint64(2))) & np.uint64(0x09249249)
        return x
    return part(q[:, 0]) | (part(q[:, 1]) << np.uint64(1)) | (part(q[:, 2]) << np.uint64(2))


class MeshDistance:
    """BVH over a triangle soup answering exact nearest-point queries."""

    def __init__(self, vertices: Array, faces: Array):
        vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        faces = np.ascontiguousarray(faces, dtype=np.int64)
        if len(faces) == 0:
            raise ValueError("mesh has no triangles")
        a = vertices[faces[:, 0]]
        b = vertices[faces[:, 1]]
        c = vertices[faces[:, 2]]
        area2 = np.linalg.norm(np.cross(b - a, c - a), axis=1)
        keep = area2 > 0.0
        if not keep.any():
            raise ValueError("mesh has only degenerate triangles")
        a, b, c = a[keep], b[keep], c[keep]
        self.face_ids = np.nonzero(keep)[0]

        centroid = (a + b + c) / 3.0
        lo = centroid.min(axis=0)
        span = centroid.max(axis=0) - lo
        span[span == 0] = 1.0
        q = np.clip((centroid - lo) / span * 1023.0, 0, 1023).astype(np.uint64)
        order = np.argsort(_morton3(q), kind="stable")
        self.tri_a = np.ascontiguousarray(a[order])
        self.tri_b = np.ascontiguousarray(b[order])
        self.tri_c = np.ascontiguousarray(c[order])
        self.face_ids = self.face_ids[order]
        self._build_tree()

    def _build_tree(self) -> None:
        n = len(self.tri_a)
        depth = max(0, int(np.ceil(np.log2(max(n / _LEAF_SIZE, 1.0)))))
        self.leaf_base = 1 << depth
        n_nodes = 1 << (depth + 1)
        start = np.zeros(n_nodes, dtype=np.int64)
        end = np.zeros(n_nodes, dtype=np.int64)
        for d in range(depth + 1):
            j = np.arange(1 << d, dtype=np.int64)
            start[(1 << d) + j] = (j * n) >> d
            end[(1 << d) + j] = ((j + 1) * n) >> d
        self.node_start, self.node_end = start, end

        tri_lo = np.minimum(np.minimum(self.tri_a, self.tri_b), self.tri_c)
        tri_hi = np.maximum(np.maximum(self.tri_a, self.tri_b), self.tri_c)
        node_lo = np.full((n_nodes, 3), np.inf)
        node_hi = np.full((n_nodes, 3), -np.inf)
        base = self.leaf_base
        leaf_s = start[base:]
        nonempty = end[base:] > leaf_s
        if nonempty.any():
            red_lo = np.minimum.reduceat(tri_lo, leaf_s[nonempty], axis=0)
            red_hi = np.maximum.reduceat(tri_hi, leaf_s[nonempty], axis=0)
            node_lo[base:][nonempty] = red_lo
            node_hi[base:][nonempty] = red_hi
        for d in range(depth - 1, -1, -1):
            lvl = np.arange(1 << d) + (1 << d)
            node_lo[lvl] = np.minimum(node_lo[2 * lvl], node_lo[2 * lvl + 1])
            node_hi[lvl] = np.maximum(node_hi[2 * lvl], node_hi[2 * lvl + 1])
        self.node_lo, self.node_hi = node_lo, node_hi

    def query(self, points: Array) -> tuple[Array, Array, Array]:
        """Return (distance, closest point, original face index) per query point."""
        points = np.ascontiguousarray(points, dtype=np.float64)
        out_d = np.empty(len(points))
        out_q = np.empty((len(points), 3))
        out_t = np.empty(len(points), dtype=np.int64)
        _bvh_query(points, self.node_lo, self.node_hi, self.node_start, self.node_end,
                   self.leaf_base, self.tri_a, self.tri_b, self.tri_c,
                   out_d, out_q, out_t)
        return out_d, out_q, self.face_ids[out_t]


def brute_force_distance(points: Array, vertices: Array, faces: Array) -> Array:
    """Reference nearest distance: scan every (point, triangle) pair.

    Quadratic; exists to validate the BVH path in tests.
    """
    points = np.asarray(points, dtype=np.float64)
    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    out = np.empty(len(points))
    for i, p in enumerate(points):
        best = np.inf
        for t in range(len(faces)):
            qx, qy, qz = _closest_on_triangle(
                p[0], p[1], p[2],
                a[t, 0], a[t, 1], a[t, 2],
                b[t, 0], b[t, 1], b[t, 2],
                c[t, 0], c[t, 1], c[t, 2])
            d = (p[0] - qx) ** 2 + (p[1] - qy) ** 2 + (p[2] - qz) ** 2
            if d < best:
                best = d
        out[i] = np.sqrt(best)
    return out


class MeshField(ScalarField):
    """Unsigned distance to a triangle mesh; the ground-truth field generator.

    The gradient is the unit vector from the closest surface point to the
    query, which is exact wherever the closest point is unique. On the
    surface itself the gradient is zero-flagged (returned as zeros).
    """

    def __init__(self, vertices: Array, faces: Array):
        self.distance = MeshDistance(vertices, faces)
        self.vertices = np.asarray(vertices, dtype=np.float64)
        self.faces = np.asarray(faces, dtype=np.int64)

    @classmethod
    def from_file(cls, path) -> "MeshField":
        vertices, faces = meshio.load_mesh(path)
        return cls(vertices, faces)

    def _evaluate(self, points: Array, need_grad: bool = True):
        dist, closest, _ = self.distance.query(points)
        grad = points - closest
        ok = dist > 1e-12
        grad[ok] /= dist[ok, None]
        grad[~ok] = 0.0
        return dist, grad
