"""Dual-grid mesh assembly from per-cell vertices.

A quad is emitted for every interior grid edge whose four surrounding
cells all carry a vertex; each quad is split along the diagonal giving
the better worst-triangle aspect ratio. Triangles inconsistent with
the local surface orientation stored on their vertices are rejected.
A repair pass over the blocky cell-complex then removes walls buried
inside the solid and trims fan configurations so every edge ends up
with at most two incident triangles, tiny boundary loops left by
demoted cells are closed with triangle fans, and a final breadth-first
flip pass makes winding consistent per component where orientable.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque

import numpy as np
from numba import njit

from .vertexer import VertexClass, VertexTable

_AREA_MIN = 1e-18


@dataclass(frozen=True)
class MesherConfig:
    normal_tol_deg: float = 25.0
    repair: bool = True
    hole_fill_max_edges: int = 12   # close boundary loops up to this size (0 = off)


@dataclass
class MeshStats:
    n_quads: int = 0
    n_split_triangles: int = 0
    n_rejected_normal: int = 0
    n_removed_interior: int = 0
    n_removed_fan: int = 0
    n_hole_loops_filled: int = 0
    n_hole_fill_triangles: int = 0
    n_vertices: int = 0
    n_triangles: int = 0
    boundary_edges: int = 0
    boundary_loops: int = 0
    nonmanifold_edges: int = 0
    euler_characteristic: int = 0
    components: int = 0


@dataclass
class MeshResult:
    vertices: np.ndarray
    triangles: np.ndarray
    stats: MeshStats


# ---------------------------------------------------------------------------
# Quad stencils
# ---------------------------------------------------------------------------

def _cyclic_offsets(axis: int) -> np.ndarray:
    """Cell offsets of the four cells around a grid edge, right-handed
    about +axis: 0, +e_b, +e_b+e_c, +e_c with (axis, b, c) cyclic."""
    b, c = (axis + 1) % 3, (axis + 2) % 3
    offs = np.zeros((4, 3), dtype=np.int64)
    offs[1, b] = 1
    offs[2, b] = 1
    offs[2, c] = 1
    offs[3, c] = 1
    return offs


def build_quads(table: VertexTable):
    """Quads dual to interior grid edges with four occupied cells.

    Returns (quads (q, 4) vertex rows in cyclic order, axes (q,),
    edge_nodes (q, 3) lower corner-node of the dual grid edge).
    """
    r = table.resolution
    keys = table.linear_keys()
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]

    def find(cells: np.ndarray) -> np.ndarray:
        qk = (cells[:, 0] * r + cells[:, 1]) * r + cells[:, 2]
        pos = np.searchsorted(skeys, qk)
        posc = np.minimum(pos, max(len(skeys) - 1, 0))
        ok = skeys[posc] == qk if len(skeys) else np.zeros(len(qk), bool)
        return np.where(ok, order[posc], -1)

    quads, axes, nodes = [], [], []
    for axis in range(3):
        b, c = (axis + 1) % 3, (axis + 2) % 3
        offs = _cyclic_offsets(axis)
        base_ok = (table.ijk[:, b] + 1 < r) & (table.ijk[:, c] + 1 < r)
        base_rows = np.flatnonzero(base_ok)
        if len(base_rows) == 0:
            continue
        base = table.ijk[base_rows]
        rows = np.empty((len(base), 4), dtype=np.int64)
        rows[:, 0] = base_rows
        good = np.ones(len(base), dtype=bool)
        for k in (1, 2, 3):
            rk = find(base + offs[k])
            rows[:, k] = rk
            good &= rk >= 0
        rows = rows[good]
        quads.append(rows)
        axes.append(np.full(len(rows), axis, dtype=np.int8))
        node = base[good] + offs[2]
        node[:, axis] = base[good][:, axis]
        nodes.append(node)
    if not quads:
        return (np.zeros((0, 4), np.int64), np.zeros(0, np.int8),
                np.zeros((0, 3), np.int64))
    return np.concatenate(quads), np.concatenate(axes), np.concatenate(nodes)


# ---------------------------------------------------------------------------
# Quad splitting and normal-consistency rejection
# ---------------------------------------------------------------------------

def _aspect_and_area(p0, p1, p2):
    e0 = p1 - p0
    e1 = p2 - p1
    e2 = p0 - p2
    lmax = np.maximum(np.einsum("ij,ij->i", e0, e0),
                      np.maximum(np.einsum("ij,ij->i", e1, e1),
                                 np.einsum("ij,ij->i", e2, e2)))
    area = 0.5 * np.linalg.norm(np.cross(e0, -e2), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        aspect = np.where(area > _AREA_MIN, lmax / (2.0 * np.maximum(area, _AREA_MIN)),
                          np.inf)
    return aspect, area


def split_quads(quads: np.ndarray, positions: np.ndarray):
    """Split each quad along the diagonal minimizing the worst triangle
    aspect ratio; degenerate (zero-area) triangles are dropped.

    Returns (triangles (t, 3), tri_quad (t,) source quad row).
    """
    if len(quads) == 0:
        return np.zeros((0, 3), np.int64), np.zeros(0, np.int64)
    p = positions[quads]                                    # (q, 4, 3)
    opt_a = np.stack([quads[:, [0, 1, 2]], quads[:, [0, 2, 3]]], axis=1)
    opt_b = np.stack([quads[:, [0, 1, 3]], quads[:, [1, 2, 3]]], axis=1)
    asp_a1, ar_a1 = _aspect_and_area(p[:, 0], p[:, 1], p[:, 2])
    asp_a2, ar_a2 = _aspect_and_area(p[:, 0], p[:, 2], p[:, 3])
    asp_b1, ar_b1 = _aspect_and_area(p[:, 0], p[:, 1], p[:, 3])
    asp_b2, ar_b2 = _aspect_and_area(p[:, 1], p[:, 2], p[:, 3])
    cost_a = np.maximum(asp_a1, asp_a2)
    cost_b = np.maximum(asp_b1, asp_b2)
    use_a = cost_a <= cost_b
    both_degenerate = ~np.isfinite(cost_a) & ~np.isfinite(cost_b)
    use_a |= both_degenerate
    tris = np.where(use_a[:, None, None], opt_a, opt_b).reshape(-1, 3)
    areas = np.where(use_a[:, None],
                     np.stack([ar_a1, ar_a2], axis=1),
                     np.stack([ar_b1, ar_b2], axis=1)).reshape(-1)
    keep = areas > _AREA_MIN
    tri_quad = np.repeat(np.arange(len(quads), dtype=np.int64), 2)[keep]
    return tris[keep], tri_quad


def triangle_normals(tris: np.ndarray, positions: np.ndarray) -> np.ndarray:
    p = positions[tris]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    norm = np.linalg.norm(n, axis=1)
    return n / np.maximum(norm, 1e-300)[:, None]


def normal_consistency_mask(tris: np.ndarray, positions: np.ndarray,
                            classes: np.ndarray, directions: np.ndarray,
                            tol_deg: float = 25.0) -> np.ndarray:
    """Keep a triangle only if its normal agrees with every incident
    vertex: within tol of the plane normal for plane cells, within tol
    of perpendicular to the line direction for edge cells. Corner cells
    impose no constraint."""
    if len(tris) == 0:
        return np.zeros(0, dtype=bool)
    tn = triangle_normals(tris, positions)
    cos_tol = np.cos(np.radians(tol_deg))
    sin_tol = np.sin(np.radians(tol_deg))
    bad = np.zeros(len(tris), dtype=bool)
    for corner in range(3):
        vid = tris[:, corner]
        cls = classes[vid]
        align = np.abs(np.einsum("ij,ij->i", tn, directions[vid]))
        bad |= (cls == VertexClass.PLANE) & (align < cos_tol)
        bad |= (cls == VertexClass.EDGE) & (align > sin_tol)
    return ~bad


# ---------------------------------------------------------------------------
# Manifold repair on the blocky cell-complex
# ---------------------------------------------------------------------------

@njit(cache=True)
def _flood_outside(blocked: np.ndarray, visited: np.ndarray) -> None:
    """BFS over corner-node cubes from the window shell; a move between
    adjacent nodes is blocked when the grid edge between them carries a
    complete quad (both triangles present)."""
    nx, ny, nz = visited.shape
    queue = np.empty(nx * ny * nz, dtype=np.int64)
    tail = 0
    for x in range(nx):
        for y in range(ny):
            for z in range(nz):
                if x == 0 or y == 0 or z == 0 or x == nx - 1 or y == ny - 1 or z == nz - 1:
                    visited[x, y, z] = True
                    queue[tail] = (x * ny + y) * nz + z
                    tail += 1
    head = 0
    while head < tail:
        idx = queue[head]
        head += 1
        z = idx % nz
        rest = idx // nz
        y = rest % ny
        x = rest // ny
        if x + 1 < nx and not visited[x + 1, y, z] and not blocked[0, x, y, z]:
            visited[x + 1, y, z] = True
            queue[tail] = ((x + 1) * ny + y) * nz + z
            tail += 1
        if x > 0 and not visited[x - 1, y, z] and not blocked[0, x - 1, y, z]:
            visited[x - 1, y, z] = True
            queue[tail] = ((x - 1) * ny + y) * nz + z
            tail += 1
        if y + 1 < ny and not visited[x, y + 1, z] and not blocked[1, x, y, z]:
            visited[x, y + 1, z] = True
            queue[tail] = (x * ny + y + 1) * nz + z
            tail += 1
        if y > 0 and not visited[x, y - 1, z] and not blocked[1, x, y - 1, z]:
            visited[x, y - 1, z] = True
            queue[tail] = (x * ny + y - 1) * nz + z
            tail += 1
        if z + 1 < nz and not visited[x, y, z + 1] and not blocked[2, x, y, z]:
            visited[x, y, z + 1] = True
            queue[tail] = (x * ny + y) * nz + z + 1
            tail += 1
        if z > 0 and not visited[x, y, z - 1] and not blocked[2, x, y, z - 1]:
            visited[x, y, z - 1] = True
            queue[tail] = (x * ny + y) * nz + z - 1
            tail += 1


def _triangle_dual_edges(cell_ijk: np.ndarray, tris: np.ndarray):
    """Recover each triangle's dual grid edge from its three cells.

    The triangle's cells are three of the four cells around one grid
    edge: they agree on exactly one coordinate (the edge axis) and the
    edge's lower corner-node is their coordinate-wise maximum.
    """
    cells = cell_ijk[tris]                                  # (t, 3, 3)
    eq = ((cells[:, 0] == cells[:, 1]) & (cells[:, 1] == cells[:, 2]))
    if not np.all(eq.sum(axis=1) == 1):
        raise ValueError("triangle vertices are not three cells around one grid edge")
    axes = np.argmax(eq, axis=1).astype(np.int64)
    nodes = cells.max(axis=1)
    return axes, nodes


def _edge_keys(axes: np.ndarray, nodes: np.ndarray, resolution: int) -> np.ndarray:
    base = resolution + 2
    return ((axes * base + nodes[:, 0]) * base + nodes[:, 1]) * base + nodes[:, 2]


def manifold_repair(cell_ijk: np.ndarray, tris: np.ndarray, resolution: int):
    """Two-phase repair. Phase one floods the outside of the blocky
    solid (cubes around corner nodes, walls = complete quads) and drops
    triangles whose wall has both sides unreachable. Phase two trims
    remaining fan edges (three or four walls sharing a mesh edge) down
    to two, preferring to drop walls not adjacent to an existing gap.

    Returns (kept_row_indices, n_interior_removed, n_fan_removed).
    """
    if len(tris) == 0:
        return np.zeros(0, np.int64), 0, 0
    axes, nodes = _triangle_dual_edges(cell_ijk, tris)
    ekeys = _edge_keys(axes, nodes, resolution)
    uq, inv, counts = np.unique(ekeys, return_inverse=True, return_counts=True)
    full = counts[inv] == 2

    lo = cell_ijk.min(axis=0) - 1
    hi = cell_ijk.max(axis=0) + 2
    dims = hi - lo + 1
    blocked = np.zeros((3, dims[0], dims[1], dims[2]), dtype=bool)
    wn = nodes - lo[None, :]
    fa = axes[full]
    fw = wn[full]
    blocked[fa, fw[:, 0], fw[:, 1], fw[:, 2]] = True
    visited = np.zeros((dims[0], dims[1], dims[2]), dtype=bool)
    _flood_outside(blocked, visited)

    step = np.zeros((3, 3), dtype=np.int64)
    step[0, 0] = step[1, 1] = step[2, 2] = 1
    wv = wn + step[axes]
    reach_u = visited[wn[:, 0], wn[:, 1], wn[:, 2]]
    reach_v = visited[wv[:, 0], wv[:, 1], wv[:, 2]]
    keep = reach_u | reach_v
    n_interior = int(np.count_nonzero(~keep))
    kept = np.flatnonzero(keep)

    # Phase two: trim fans so every mesh edge has at most two triangles.
    n_fan = 0
    nv = len(cell_ijk)
    while True:
        t = tris[kept]
        if len(t) == 0:
            break
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e = np.sort(e, axis=1)
        pair_keys = e[:, 0].astype(np.int64) * nv + e[:, 1]
        uqe, cnts = np.unique(pair_keys, return_counts=True)
        offending = uqe[cnts > 2]
        if len(offending) == 0:
            break
        drop_keys: set[int] = set()
        drop_rows: set[int] = set()
        for ek in offending:
            va, vb = int(ek // nv), int(ek % nv)
            inc = kept[np.flatnonzero(np.any(t == va, axis=1) & np.any(t == vb, axis=1))]
            a_cell, b_cell = cell_ijk[va], cell_ijk[vb]
            diff = b_cell - a_cell
            nzd = np.flatnonzero(diff != 0)
            if len(nzd) != 1 or abs(int(diff[nzd[0]])) != 1:
                # Not a face-crossing edge; fall back to dropping the
                # highest-index triangles until two remain.
                for row in sorted(inc.tolist())[2:]:
                    drop_rows.add(int(row))
                continue
            face_axis = int(nzd[0])
            amin = np.minimum(a_cell, b_cell)
            b_ax, c_ax = (face_axis + 1) % 3, (face_axis + 2) % 3
            n0 = amin.copy()
            n0[face_axis] += 1
            slot_axes = np.array([b_ax, c_ax, b_ax, c_ax], dtype=np.int64)
            slot_nodes = np.stack([n0, n0 + step[b_ax], n0 + step[c_ax], n0], axis=0)
            slot_keys = _edge_keys(slot_axes, slot_nodes, resolution)
            tri_slot = {}
            ok = True
            for row in inc:
                k = int(ekeys[row])
                hitslot = np.flatnonzero(slot_keys == k)
                if len(hitslot) != 1:
                    ok = False
                    break
                tri_slot.setdefault(int(hitslot[0]), []).append(int(row))
            if not ok:
                for row in sorted(inc.tolist())[2:]:
                    drop_rows.add(int(row))
                continue
            present = sorted(tri_slot)
            scored = []
            for s in present:
                gap = ((s + 1) % 4 not in tri_slot) or ((s - 1) % 4 not in tri_slot)
                scored.append((int(gap), s))
            scored.sort()
            drop_keys.add(int(slot_keys[scored[0][1]]))
        if drop_keys:
            key_mask = np.isin(ekeys[kept], np.fromiter(drop_keys, dtype=np.int64))
            n_fan += int(np.count_nonzero(key_mask))
            kept = kept[~key_mask]
        if drop_rows:
            row_mask = np.isin(kept, np.fromiter(drop_rows, dtype=np.int64))
            n_fan += int(np.count_nonzero(row_mask))
            kept = kept[~row_mask]
        if not drop_keys and not drop_rows:
            break
    return kept, n_interior, n_fan


# ---------------------------------------------------------------------------
# Orientation, compaction, diagnostics
# ---------------------------------------------------------------------------

def orient_consistently(tris: np.ndarray) -> np.ndarray:
    """Flip windings breadth-first so neighbors across each two-manifold
    edge traverse it in opposite directions. Unorientable loops are
    tolerated: the contradicting constraint is ignored."""
    t = np.array(tris, dtype=np.int64, copy=True)
    if len(t) == 0:
        return t
    nv = int(t.max()) + 1
    ea = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
    eb = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    tri_id = np.concatenate([np.arange(len(t))] * 3)
    lo = np.minimum(ea, eb)
    hi = np.maximum(ea, eb)
    forward = ea < eb
    keys = lo * nv + hi
    order = np.argsort(keys, kind="stable")
    keys_s = keys[order]
    adj: list[list[tuple[int, bool]]] = [[] for _ in range(len(t))]
    i = 0
    while i < len(keys_s):
        j = i
        while j < len(keys_s) and keys_s[j] == keys_s[i]:
            j += 1
        if j - i == 2:
            r0, r1 = order[i], order[j - 1]
            t0, t1 = int(tri_id[r0]), int(tri_id[r1])
            same = bool(forward[r0] == forward[r1])
            adj[t0].append((t1, same))
            adj[t1].append((t0, same))
        i = j
    flip = np.zeros(len(t), dtype=bool)
    seen = np.zeros(len(t), dtype=bool)
    for root in range(len(t)):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            for nbr, same in adj[cur]:
                want = flip[cur] ^ same
                if not seen[nbr]:
                    seen[nbr] = True
                    flip[nbr] = want
                    queue.append(nbr)
    t[flip] = t[flip][:, ::-1]
    return t


def compact_mesh(positions: np.ndarray, tris: np.ndarray):
    """Drop unreferenced vertices, remapping triangle indices."""
    used, new = np.unique(tris, return_inverse=True)
    return positions[used], new.reshape(-1, 3).astype(np.int64), used


def edge_statistics(tris: np.ndarray):
    """(boundary_edge_count, nonmanifold_edge_count, unique_edge_count)."""
    if len(tris) == 0:
        return 0, 0, 0
    nv = int(tris.max()) + 1
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    keys = e[:, 0].astype(np.int64) * nv + e[:, 1]
    _, cnts = np.unique(keys, return_counts=True)
    return (int(np.count_nonzero(cnts == 1)),
            int(np.count_nonzero(cnts > 2)), len(cnts))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def boundary_loop_count(tris: np.ndarray) -> int:
    """Number of connected components of the boundary-edge graph."""
    if len(tris) == 0:
        return 0
    nv = int(tris.max()) + 1
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    keys = e[:, 0].astype(np.int64) * nv + e[:, 1]
    uq, cnts = np.unique(keys, return_counts=True)
    bkeys = uq[cnts == 1]
    if len(bkeys) == 0:
        return 0
    va = (bkeys // nv).astype(np.int64)
    vb = (bkeys % nv).astype(np.int64)
    uf = _UnionFind(nv)
    for a, b in zip(va.tolist(), vb.tolist()):
        uf.union(a, b)
    roots = {uf.find(int(v)) for v in np.unique(np.concatenate([va, vb]))}
    return len(roots)


def fill_small_boundary_loops(positions: np.ndarray, tris: np.ndarray,
                              max_edges: int):
    """Close tiny boundary loops with triangle fans.

    A demoted cell on a stair-stepped sheet can interrupt an otherwise
    continuous surface, leaving a small hole whose rim cannot be patched
    by stencil triangles (the surrounding pair edges already carry two
    triangles each). Boundary edges are grouped into connected loops and
    every simple cycle of at most ``max_edges`` edges is fanned from the
    first vertex whose chords are unused by any triangle, which keeps
    every edge at two incident triangles or fewer. Genuine open rims are
    orders of magnitude longer than ``max_edges`` and are never touched.

    Returns (fan triangles (t, 3), number of loops closed).
    """
    none = np.zeros((0, 3), np.int64)
    if len(tris) == 0 or max_edges < 3:
        return none, 0
    inc: dict[tuple[int, int], int] = {}
    for t in tris:
        a, b, c = int(t[0]), int(t[1]), int(t[2])
        for u, v in ((a, b), (b, c), (c, a)):
            k = (u, v) if u < v else (v, u)
            inc[k] = inc.get(k, 0) + 1
    nbrs: dict[int, list[int]] = {}
    for (u, v), cnt in inc.items():
        if cnt == 1:
            nbrs.setdefault(u, []).append(v)
            nbrs.setdefault(v, []).append(u)
    if not nbrs:
        return none, 0

    fans: list[tuple[int, int, int]] = []
    n_loops = 0
    seen: set[int] = set()
    for start in sorted(nbrs):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        if len(comp) < 3 or len(comp) > max_edges:
            continue
        if any(len(nbrs[u]) != 2 for u in comp):
            continue                      # branching: not a simple cycle
        v0 = min(comp)
        cycle = [v0]
        prev, cur = v0, min(nbrs[v0])
        while cur != v0:
            cycle.append(cur)
            a, b = nbrs[cur]
            prev, cur = cur, (b if a == prev else a)
        if len(cycle) != len(comp):
            continue
        m = len(cycle)
        for s in range(m):
            ring = cycle[s:] + cycle[:s]
            apex = ring[0]
            chords = []
            ok = True
            for i in range(2, m - 1):
                u, v = apex, ring[i]
                k = (u, v) if u < v else (v, u)
                if inc.get(k, 0):
                    ok = False
                    break
                chords.append(k)
            if not ok:
                continue
            cand = [(apex, ring[i], ring[i + 1]) for i in range(1, m - 1)]
            pa = positions[[t[0] for t in cand]]
            pb = positions[[t[1] for t in cand]]
            pc = positions[[t[2] for t in cand]]
            if np.any(_aspect_and_area(pa, pb, pc)[1] <= _AREA_MIN):
                continue
            fans.extend(cand)
            n_loops += 1
            for a, b, c in cand:
                for u, v in ((a, b), (b, c), (c, a)):
                    k = (u, v) if u < v else (v, u)
                    inc[k] = inc.get(k, 0) + 1
            break
    if not fans:
        return none, 0
    return np.array(fans, dtype=np.int64), n_loops


def triangle_component_count(tris: np.ndarray) -> int:
    """Connected components of triangles under shared-edge adjacency."""
    if len(tris) == 0:
        return 0
    nv = int(tris.max()) + 1
    tri_id = np.concatenate([np.arange(len(tris))] * 3)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    keys = e[:, 0].astype(np.int64) * nv + e[:, 1]
    order = np.argsort(keys, kind="stable")
    keys_s = keys[order]
    ids_s = tri_id[order]
    uf = _UnionFind(len(tris))
    i = 0
    while i < len(keys_s):
        j = i
        while j < len(keys_s) and keys_s[j] == keys_s[i]:
            j += 1
        for k in range(i + 1, j):
            uf.union(int(ids_s[i]), int(ids_s[k]))
        i = j
    roots = {uf.find(i) for i in range(len(tris))}
    return len(roots)


def assemble_mesh(table: VertexTable, config: MesherConfig | None = None) -> MeshResult:
    """Full assembly: quads, split, normal rejection, repair, orientation,
    vertex compaction, and topology statistics."""
    config = config or MesherConfig()
    stats = MeshStats()
    quads, _axes, _nodes = build_quads(table)
    stats.n_quads = len(quads)
    tris, _tri_quad = split_quads(quads, table.positions)
    stats.n_split_triangles = len(tris)
    keep = normal_consistency_mask(tris, table.positions, table.classes,
                                   table.directions, config.normal_tol_deg)
    stats.n_rejected_normal = int(np.count_nonzero(~keep))
    tris = tris[keep]
    if config.repair and len(tris):
        kept, n_int, n_fan = manifold_repair(table.ijk, tris, table.resolution)
        stats.n_removed_interior = n_int
        stats.n_removed_fan = n_fan
        tris = tris[kept]
    if config.hole_fill_max_edges >= 3 and len(tris):
        fans, n_loops = fill_small_boundary_loops(table.positions, tris,
                                                  config.hole_fill_max_edges)
        stats.n_hole_loops_filled = n_loops
        stats.n_hole_fill_triangles = len(fans)
        if len(fans):
            tris = np.concatenate([tris, fans])
    tris = orient_consistently(tris)
    if len(tris):
        verts, tris, _used = compact_mesh(table.positions, tris)
    else:
        verts = np.zeros((0, 3), dtype=np.float64)
        tris = np.zeros((0, 3), dtype=np.int64)
    stats.n_vertices = len(verts)
    stats.n_triangles = len(tris)
    nb, nm, ne = edge_statistics(tris)
    stats.boundary_edges = nb
    stats.nonmanifold_edges = nm
    stats.boundary_loops = boundary_loop_count(tris)
    stats.euler_characteristic = len(verts) - ne + len(tris)
    stats.components = triangle_component_count(tris)
    return MeshResult(vertices=verts, triangles=tris, stats=stats)
