"""Per-cell sampling, sample filtering, and quadric vertex placement.

Each non-empty leaf is sampled on a lattice shared with its neighbors
(cell corners land on the same global lattice nodes, so the field is
queried once per node). Each sample is projected one Newton step along
the gradient toward the surface; samples too close to the surface to
have a reliable gradient, or whose projection fails to land near the
surface, are discarded. The surviving (projection, normal) pairs form
an overdetermined plane system whose normal matrix is classified by
singular-value ratios into corner / edge / plane cells, and the vertex
is placed with the truncated pseudoinverse solution appropriate to
that class.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .fields.base import DOMAIN_LO, GRAD_EPS, Array, ScalarField, eval_batch
from .octree import LeafSet

_CUBE = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)],
                 dtype=np.float64)
# The 12 cell edges as index pairs into _CUBE (corner bit order x, y, z).
_CELL_EDGES = np.array([
    [0, 4], [1, 5], [2, 6], [3, 7],   # along x
    [0, 2], [1, 3], [4, 6], [5, 7],   # along y
    [0, 1], [2, 3], [4, 5], [6, 7],   # along z
], dtype=np.int64)
_EDGE_TOL = 1e-9
_PARALLEL_TOL = 1e-14


class VertexClass(IntEnum):
    CORNER = 0
    EDGE = 1
    PLANE = 2


@dataclass(frozen=True)
class VertexerConfig:
    delta1: float = 2e-3           # keep samples at least this far from the surface
    delta2: float = 2e-3           # projection must land at most this far from it
    fallback_delta1: float = 1e-3  # relaxed near-surface cutoff for sparse cells
    sigma_ratio: float = 0.1       # singular-value ratio separating the classes
    grad_min: float = GRAD_EPS
    dense_sampling: bool = False   # 5x5x5 lattice instead of 3x3x3
    min_valid_samples: int = 3
    filter_enabled: bool = True    # disable -> keep every sample with a usable gradient

    def __post_init__(self):
        if self.delta1 <= 0 or self.delta2 <= 0 or self.fallback_delta1 <= 0:
            raise ValueError("filter thresholds must be positive")
        if not 0 < self.sigma_ratio < 1:
            raise ValueError("sigma_ratio must be in (0, 1)")

    @property
    def samples_per_axis(self) -> int:
        return 5 if self.dense_sampling else 3


@dataclass(frozen=True)
class DualVertex:
    cell_ijk: tuple[int, int, int]
    position: Array
    vclass: VertexClass
    direction: Array   # edge: line direction; plane: normal; corner: zeros
    clamped: bool


@dataclass
class SolveStats:
    cells_in: int = 0
    cells_out: int = 0
    demoted_filter: int = 0
    demoted_placement: int = 0
    fallback_cells: int = 0
    n_corner: int = 0
    n_edge: int = 0
    n_plane: int = 0
    n_clamped: int = 0
    sample_points: int = 0        # cell-local samples before dedup
    unique_samples: int = 0       # distinct lattice nodes queried
    field_queries: int = 0        # total field evaluations (nodes + projections)


class VertexTable:
    """Solved vertices keyed by leaf grid coords, plus solve statistics."""

    def __init__(self, ijk: Array, positions: Array, classes: Array,
                 directions: Array, clamped: Array, resolution: int,
                 stats: SolveStats):
        self.ijk = np.ascontiguousarray(ijk, dtype=np.int64)
        self.positions = np.ascontiguousarray(positions, dtype=np.float64)
        self.classes = np.ascontiguousarray(classes, dtype=np.int8)
        self.directions = np.ascontiguousarray(directions, dtype=np.float64)
        self.clamped = np.ascontiguousarray(clamped, dtype=bool)
        self.resolution = int(resolution)
        self.stats = stats

    def __len__(self) -> int:
        return len(self.ijk)

    def __getitem__(self, i: int) -> DualVertex:
        return DualVertex(cell_ijk=tuple(int(v) for v in self.ijk[i]),
                          position=self.positions[i],
                          vclass=VertexClass(int(self.classes[i])),
                          direction=self.directions[i],
                          clamped=bool(self.clamped[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def linear_keys(self) -> Array:
        r = self.resolution
        return (self.ijk[:, 0] * r + self.ijk[:, 1]) * r + self.ijk[:, 2]


# ---------------------------------------------------------------------------
# Reference single-cell pieces (the batched solver must agree with these).
# ---------------------------------------------------------------------------

def lattice_points(ijk, resolution: int, samples_per_axis: int = 3) -> Array:
    """Sample lattice of one cell: corners, edge/face midpoints, interior.

    Node coordinates are defined on a single global lattice of pitch
    ``cell_size / (samples_per_axis - 1)``, so neighboring cells share
    their boundary nodes exactly.
    """
    s = samples_per_axis
    f = s - 1
    h = 2.0 / resolution
    base = np.asarray(ijk, dtype=np.int64) * f
    axis = np.arange(s, dtype=np.int64)
    offs = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    return DOMAIN_LO + (base[None, :] + offs).astype(np.float64) * (h / f)


def sample_validity(distances, grad_norms, proj_distances,
                    delta1: float, delta2: float, grad_min: float = GRAD_EPS):
    """Pointwise filter: far enough from the surface, with a usable gradient,
    and whose one-step projection lands on (or within ``delta2`` of) it."""
    distances = np.asarray(distances)
    return ((distances >= delta1)
            & (np.asarray(grad_norms) >= grad_min)
            & (np.asarray(proj_distances) <= delta2))


@dataclass(frozen=True)
class CellSolution:
    vclass: VertexClass
    position: Array | None      # None when the cell is demoted
    direction: Array
    clamped: bool
    sigmas: Array               # descending singular values of the normal system


def solve_cell(normals: Array, points: Array, cell_min: Array, cell_size: float,
               sigma_ratio: float = 0.1) -> CellSolution:
    """Solve one cell's plane system n_i . x = n_i . q_i (readable reference).

    Classification and the truncated solution both run in the eigenbasis
    of M = sum n n^T, solved about the centroid of the constraint points
    for conditioning. Edge and plane cells whose fitted feature misses
    the cell entirely demote the cell (no vertex); corner solutions
    outside the cell are clamped onto it and flagged.
    """
    normals = np.asarray(normals, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    lo = np.asarray(cell_min, dtype=np.float64)
    hi = lo + cell_size
    c = points.mean(axis=0)
    m = normals.T @ normals
    m = (m + m.T) / 2.0
    y = normals.T @ np.einsum("ij,ij->i", normals, points - c)
    w, v = np.linalg.eigh(m)                      # ascending eigenvalues
    sig = np.sqrt(np.clip(w, 0.0, None))
    s0 = sig[2]
    if sig[0] / s0 >= sigma_ratio:
        vclass = VertexClass.CORNER
    elif sig[1] / s0 >= sigma_ratio:
        vclass = VertexClass.EDGE
    else:
        vclass = VertexClass.PLANE
    include = sig >= sigma_ratio * s0
    coeff = np.where(include, (v.T @ y) / np.where(include, w, 1.0), 0.0)
    x = c + v @ coeff
    sigmas = sig[::-1].copy()

    if vclass == VertexClass.CORNER:
        pos = np.clip(x, lo, hi)
        clamped = bool(np.any(np.abs(pos - x) > 1e-12))
        return CellSolution(vclass, pos, np.zeros(3), clamped, sigmas)

    # Offset of the dominant-plane solution. Components of x along the
    # other eigenvectors are orthogonal to the plane normal, so n . x
    # depends only on the kept largest-sigma component.
    plane_normal = v[:, 2]
    plane_off = float(plane_normal @ x)

    if vclass == VertexClass.EDGE:
        d = v[:, 0]
        tmin, tmax = -np.inf, np.inf
        hit = True
        for a in range(3):
            if abs(d[a]) < _PARALLEL_TOL:
                if not (lo[a] - _EDGE_TOL <= x[a] <= hi[a] + _EDGE_TOL):
                    hit = False
            else:
                t1, t2 = (lo[a] - x[a]) / d[a], (hi[a] - x[a]) / d[a]
                tmin, tmax = max(tmin, min(t1, t2)), min(tmax, max(t1, t2))
        if hit and tmax >= tmin - 1e-12:
            pos = np.clip(x + d * ((tmin + tmax) / 2.0), lo, hi)
            return CellSolution(vclass, pos, d, False, sigmas)
        pos = _plane_cell_centroid(plane_normal, plane_off, lo, cell_size)
        return CellSolution(vclass, pos, d, False, sigmas)

    pos = _plane_cell_centroid(plane_normal, plane_off, lo, cell_size)
    return CellSolution(vclass, pos, plane_normal, False, sigmas)


def _plane_cell_centroid(n: Array, off: float, lo: Array, cell_size: float) -> Array | None:
    """Centroid of the plane's intersections with the 12 cell edges, or
    None when the plane misses the cell entirely."""
    corners = lo + cell_size * _CUBE
    acc = np.zeros(3)
    cnt = 0
    for e0, e1 in _CELL_EDGES:
        p0, p1 = corners[e0], corners[e1]
        denom = float(n @ (p1 - p0))
        if abs(denom) < _PARALLEL_TOL:
            continue
        s = (off - float(n @ p0)) / denom
        if -_EDGE_TOL <= s <= 1.0 + _EDGE_TOL:
            acc += p0 + s * (p1 - p0)
            cnt += 1
    if cnt == 0:
        return None
    return np.clip(acc / cnt, lo, lo + cell_size)


# ---------------------------------------------------------------------------
# Batched solver over all leaves.
# ---------------------------------------------------------------------------

def _bincount3(ids: Array, values: Array, n: int) -> Array:
    out = np.empty((n, values.shape[1]), dtype=np.float64)
    for a in range(values.shape[1]):
        out[:, a] = np.bincount(ids, weights=values[:, a], minlength=n)
    return out


def _plane_centroids_batch(nn: Array, off: Array, lo: Array, h: float):
    """Batched plane/cell-edge intersection centroids.

    Returns (positions clipped into the cells, hit mask); cells whose
    plane touches no cell edge get a False mask entry.
    """
    corners = lo[:, None, :] + h * _CUBE[None, :, :]
    acc = np.zeros((len(nn), 3))
    hits = np.zeros(len(nn))
    for e0, e1 in _CELL_EDGES:
        p0, p1 = corners[:, e0], corners[:, e1]
        seg = p1 - p0
        denom = np.einsum("ij,ij->i", nn, seg)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (off - np.einsum("ij,ij->i", nn, p0)) / denom
            good = ((np.abs(denom) >= _PARALLEL_TOL)
                    & (t >= -_EDGE_TOL) & (t <= 1.0 + _EDGE_TOL))
        t_safe = np.where(good, t, 0.0)
        acc += np.where(good[:, None], p0 + t_safe[:, None] * seg, 0.0)
        hits += good
    ok = hits > 0
    pos = acc / np.where(ok, hits, 1.0)[:, None]
    return np.clip(pos, lo, lo + h), ok


def solve_all(field: ScalarField, leaves: LeafSet,
              config: VertexerConfig | None = None) -> VertexTable:
    """Sample, filter, classify, and place one vertex per surviving leaf."""
    config = config or VertexerConfig()
    res = leaves.config.resolution
    h = leaves.config.cell_size
    n = len(leaves)
    s = config.samples_per_axis
    f = s - 1
    s3 = s ** 3
    stats = SolveStats(cells_in=n, sample_points=n * s3)
    if n == 0:
        return VertexTable(np.zeros((0, 3), np.int64), np.zeros((0, 3)),
                           np.zeros(0, np.int8), np.zeros((0, 3)),
                           np.zeros(0, bool), res, stats)

    # --- deduplicated lattice evaluation -----------------------------------
    axis = np.arange(s, dtype=np.int64)
    offs = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    gcoords = (leaves.ijk[:, None, :] * f + offs[None, :, :]).reshape(-1, 3)
    span = f * res + 1
    keys = (gcoords[:, 0] * span + gcoords[:, 1]) * span + gcoords[:, 2]
    ukeys, inv = np.unique(keys, return_inverse=True)
    ucoords = np.empty((len(ukeys), 3), dtype=np.int64)
    ucoords[:, 2] = ukeys % span
    rest = ukeys // span
    ucoords[:, 1] = rest % span
    ucoords[:, 0] = rest // span
    upts = DOMAIN_LO + ucoords.astype(np.float64) * (h / f)
    stats.unique_samples = len(ukeys)

    resp = eval_batch(field, upts, need_grad=True)
    dist = resp.distances
    grad = resp.gradients
    gnorm = np.linalg.norm(grad, axis=1)
    ok_grad = gnorm >= config.grad_min
    safe = np.where(gnorm > 0.0, gnorm, 1.0)
    ndir = grad / safe[:, None]
    qpts = upts - dist[:, None] * ndir
    proj_dist = eval_batch(field, qpts, need_grad=False).distances
    stats.field_queries = 2 * len(ukeys)

    if config.filter_enabled:
        valid_main = sample_validity(dist, gnorm, proj_dist,
                                     config.delta1, config.delta2, config.grad_min)
        valid_fb = sample_validity(dist, gnorm, proj_dist,
                                   config.fallback_delta1, config.delta2,
                                   config.grad_min)
    else:
        valid_main = ok_grad.copy()
        valid_fb = ok_grad.copy()

    # --- per-cell validity with fallback retry ------------------------------
    inv2 = inv.reshape(n, s3)
    cell_main = valid_main[inv2]
    count_main = cell_main.sum(axis=1)
    need_fb = count_main < config.min_valid_samples
    cell_valid = np.where(need_fb[:, None], valid_fb[inv2], cell_main)
    counts = cell_valid.sum(axis=1)
    alive = counts >= config.min_valid_samples
    stats.fallback_cells = int(np.count_nonzero(need_fb & alive))
    stats.demoted_filter = int(np.count_nonzero(~alive))

    ai = np.flatnonzero(alive)
    na = len(ai)
    if na == 0:
        stats.cells_out = 0
        return VertexTable(np.zeros((0, 3), np.int64), np.zeros((0, 3)),
                           np.zeros(0, np.int8), np.zeros((0, 3)),
                           np.zeros(0, bool), res, stats)

    rows = cell_valid[ai]                                   # (na, s3) bool
    comp = np.repeat(np.arange(na), s3)[rows.ravel()]       # row -> alive cell
    u = inv2[ai][rows]                                      # row -> unique node
    nr = ndir[u]
    qr = qpts[u]

    cnt = np.bincount(comp, minlength=na).astype(np.float64)
    cen = _bincount3(comp, qr, na) / cnt[:, None]
    qc = qr - cen[comp]
    proj = np.einsum("ij,ij->i", nr, qc)
    y = _bincount3(comp, nr * proj[:, None], na)
    m = np.empty((na, 3, 3), dtype=np.float64)
    for a in range(3):
        for b in range(a, 3):
            mab = np.bincount(comp, weights=nr[:, a] * nr[:, b], minlength=na)
            m[:, a, b] = mab
            m[:, b, a] = mab

    w, v = np.linalg.eigh(m)                                # ascending, (na,3),(na,3,3)
    sig = np.sqrt(np.clip(w, 0.0, None))
    s0 = sig[:, 2]
    ratio_small = sig[:, 0] / s0
    ratio_mid = sig[:, 1] / s0
    is_corner = ratio_small >= config.sigma_ratio
    is_edge = ~is_corner & (ratio_mid >= config.sigma_ratio)
    is_plane = ~is_corner & ~is_edge

    include = sig >= config.sigma_ratio * s0[:, None]
    vy = np.einsum("nci,nc->ni", v, y)
    coeff = np.where(include, vy / np.where(include, w, 1.0), 0.0)
    x = cen + np.einsum("nci,ni->nc", v, coeff)

    lo = DOMAIN_LO + leaves.ijk[ai].astype(np.float64) * h
    hi = lo + h
    positions = np.empty((na, 3), dtype=np.float64)
    directions = np.zeros((na, 3), dtype=np.float64)
    clamped = np.zeros(na, dtype=bool)
    placed = np.ones(na, dtype=bool)

    ci = np.flatnonzero(is_corner)
    if len(ci):
        px = np.clip(x[ci], lo[ci], hi[ci])
        positions[ci] = px
        clamped[ci] = np.any(np.abs(px - x[ci]) > 1e-12, axis=1)

    # Dominant-plane offset n . x is class-independent because the
    # eigenvectors are orthonormal, so components along the other
    # eigenvectors do not contribute.
    ei = np.flatnonzero(is_edge)
    if len(ei):
        a_pt, d = x[ei], v[ei][:, :, 0]
        elo, ehi = lo[ei], hi[ei]
        par = np.abs(d) < _PARALLEL_TOL
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (elo - a_pt) / d
            t2 = (ehi - a_pt) / d
        tlo = np.where(par, -np.inf, np.minimum(t1, t2))
        thi = np.where(par, np.inf, np.maximum(t1, t2))
        tmin = tlo.max(axis=1)
        tmax = thi.min(axis=1)
        par_ok = np.all(~par | ((a_pt >= elo - _EDGE_TOL) & (a_pt <= ehi + _EDGE_TOL)),
                        axis=1)
        hit = par_ok & (tmax >= tmin - 1e-12)
        mid = a_pt + d * ((tmin + tmax) / 2.0)[:, None]
        positions[ei] = np.clip(mid, elo, ehi)
        directions[ei] = d
        placed[ei] = True
        miss = np.flatnonzero(~hit)
        if len(miss):
            # The fitted line (the local curvature axis) lies outside the
            # cell; fall back to the dominant-plane placement and demote
            # only if that misses as well.
            rows = ei[miss]
            nn = v[rows][:, :, 2]
            off = np.einsum("ij,ij->i", nn, x[rows])
            pos2, ok2 = _plane_centroids_batch(nn, off, lo[rows], h)
            positions[rows] = pos2
            placed[rows] = ok2

    pi = np.flatnonzero(is_plane)
    if len(pi):
        nn = v[pi][:, :, 2]
        off = np.einsum("ij,ij->i", nn, x[pi])
        pos, ok = _plane_centroids_batch(nn, off, lo[pi], h)
        positions[pi] = pos
        directions[pi] = nn
        placed[pi] = ok

    stats.demoted_placement = int(np.count_nonzero(~placed))
    keep = np.flatnonzero(placed)
    classes = np.where(is_corner, VertexClass.CORNER,
                       np.where(is_edge, VertexClass.EDGE, VertexClass.PLANE))
    stats.n_corner = int(np.count_nonzero(is_corner[keep]))
    stats.n_edge = int(np.count_nonzero(is_edge[keep]))
    stats.n_plane = int(np.count_nonzero(is_plane[keep]))
    stats.n_clamped = int(np.count_nonzero(clamped[keep]))
    stats.cells_out = len(keep)
    return VertexTable(leaves.ijk[ai[keep]], positions[keep],
                       classes[keep].astype(np.int8), directions[keep],
                       clamped[keep], res, stats)
