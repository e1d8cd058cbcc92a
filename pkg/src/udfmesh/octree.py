"""Adaptive octree partitioning of the extraction domain.

A cell is provably empty when the field value at its center exceeds
half its diagonal plus a safety margin: no zero of a 1-Lipschitz
distance field can then lie inside the cell. Subdivision recurses
breadth-first so each level is evaluated in one field batch, and only
cells at ``max_depth`` become candidate leaves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .fields.base import DOMAIN_HI, DOMAIN_LO, Array, ScalarField, eval_batch

_SQRT3 = float(np.sqrt(3.0))
MAX_DEPTH_LIMIT = 10


class CellState(IntEnum):
    EMPTY = 0
    INTERIOR = 1
    LEAF = 2


@dataclass(frozen=True)
class OctreeConfig:
    max_depth: int = 7
    epsilon: float = 2e-3

    def __post_init__(self):
        if not 1 <= self.max_depth <= MAX_DEPTH_LIMIT:
            raise ValueError(f"max_depth must be in [1, {MAX_DEPTH_LIMIT}]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    @property
    def resolution(self) -> int:
        return 1 << self.max_depth

    @property
    def cell_size(self) -> float:
        return (DOMAIN_HI - DOMAIN_LO) / self.resolution


@dataclass(frozen=True)
class OctreeCell:
    """One axis-aligned cell: integer grid coords at its depth plus center value."""

    ijk: tuple[int, int, int]
    depth: int
    d0: float
    state: CellState = CellState.LEAF

    @property
    def size(self) -> float:
        return (DOMAIN_HI - DOMAIN_LO) / (1 << self.depth)

    @property
    def min_corner(self) -> Array:
        return DOMAIN_LO + np.asarray(self.ijk, dtype=np.float64) * self.size

    @property
    def center(self) -> Array:
        return self.min_corner + 0.5 * self.size

    @property
    def morton_key(self) -> int:
        return int(morton_encode(np.asarray([self.ijk], dtype=np.int64))[0])


def is_provably_empty(d0, size, epsilon: float):
    """Pruning predicate: center value exceeds half the cell diagonal plus epsilon."""
    return np.asarray(d0) > _SQRT3 * np.asarray(size) / 2.0 + epsilon


def morton_encode(ijk: Array) -> Array:
    """Interleave integer cell coords (n, 3) into Morton keys (x lowest bits)."""
    def part(x: Array) -> Array:
        x = x.astype(np.uint64)
        x = (x | (x << np.uint64(16))) & np.uint64(0x030000FF)
        x = (x | (x << np.uint64(8))) & np.uint64(0x0300F00F)
        x = (x | (x << np.uint64(4))) & np.uint64(0x030C30C3)
        x = (x | (x << np.uint64(2))) & np.uint64(0x09249249)
        return x
    ijk = np.asarray(ijk)
    return (part(ijk[:, 0]) | (part(ijk[:, 1]) << np.uint64(1))
            | (part(ijk[:, 2]) << np.uint64(2))).astype(np.int64)


class LeafSet:
    """Non-empty leaves at max depth, sorted by Morton key.

    Behaves as a sequence of OctreeCell while exposing the underlying
    arrays (``ijk`` (n, 3), ``d0`` (n,), ``keys`` (n,)) for batched
    consumers.
    """

    def __init__(self, ijk: Array, d0: Array, config: OctreeConfig, field_evals: int):
        keys = morton_encode(ijk)
        order = np.argsort(keys, kind="stable")
        self.ijk = np.ascontiguousarray(ijk[order], dtype=np.int64)
        self.d0 = np.ascontiguousarray(d0[order], dtype=np.float64)
        self.keys = keys[order]
        self.config = config
        self.field_evals = int(field_evals)

    def __len__(self) -> int:
        return len(self.keys)

    def __getitem__(self, i: int) -> OctreeCell:
        return OctreeCell(ijk=tuple(int(v) for v in self.ijk[i]),
                          depth=self.config.max_depth, d0=float(self.d0[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def min_corners(self) -> Array:
        return DOMAIN_LO + self.ijk.astype(np.float64) * self.config.cell_size


def build(field: ScalarField, config: OctreeConfig | None = None) -> LeafSet:
    """Breadth-first octree build returning the non-empty max-depth leaves.

    Every level is evaluated in a single field batch (the eight children
    of each retained cell together), which amortizes network inference
    cost for learned fields.
    """
    config = config or OctreeConfig()
    child_offsets = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)],
                             dtype=np.int64)
    frontier = np.zeros((1, 3), dtype=np.int64)
    evals = 0
    for depth in range(config.max_depth + 1):
        size = (DOMAIN_HI - DOMAIN_LO) / (1 << depth)
        centers = DOMAIN_LO + (frontier.astype(np.float64) + 0.5) * size
        resp = eval_batch(field, centers, need_grad=False)
        evals += len(centers)
        keep = ~is_provably_empty(resp.distances, size, config.epsilon)
        if depth == config.max_depth:
            return LeafSet(frontier[keep], resp.distances[keep], config, evals)
        frontier = (frontier[keep, None, :] * 2 + child_offsets[None, :, :]).reshape(-1, 3)
        if len(frontier) == 0:
            return LeafSet(np.zeros((0, 3), dtype=np.int64), np.zeros(0), config, evals)
    raise AssertionError("unreachable")


def containing_cells(points: Array, config: OctreeConfig) -> list[Array]:
    """All max-depth cells whose closed extent contains each point.

    Points on cell boundaries belong to every adjacent cell; this is the
    containment notion under which center-value pruning is sound.
    """
    h = config.cell_size
    r = config.resolution
    frac = (np.asarray(points, dtype=np.float64) - DOMAIN_LO) / h
    base = np.floor(frac).astype(np.int64)
    out = []
    for p_frac, p_base in zip(frac, base):
        axes = []
        for a in range(3):
            cands = {int(np.clip(p_base[a], 0, r - 1))}
            if abs(p_frac[a] - p_base[a]) < 1e-9:
                cands.add(int(np.clip(p_base[a] - 1, 0, r - 1)))
            elif abs(p_frac[a] - (p_base[a] + 1)) < 1e-9:
                cands.add(int(np.clip(p_base[a] + 1, 0, r - 1)))
            axes.append(sorted(cands))
        cells = [(i, j, k) for i in axes[0] for j in axes[1] for k in axes[2]]
        out.append(np.asarray(cells, dtype=np.int64))
    return out


def dump_cells(leaves: LeafSet, path) -> None:
    """One JSON object per leaf: key, grid coords, geometry, center value."""
    h = leaves.config.cell_size
    with open(path, "w") as f:
        for i in range(len(leaves)):
            corner = DOMAIN_LO + leaves.ijk[i] * h
            f.write(json.dumps({
                "key": int(leaves.keys[i]),
                "ijk": [int(v) for v in leaves.ijk[i]],
                "min_corner": [float(v) for v in corner],
                "size": h,
                "d0": float(leaves.d0[i]),
            }) + "\n")
