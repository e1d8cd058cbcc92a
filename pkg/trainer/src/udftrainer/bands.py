"""Training-set construction: banded point sampling with exact labels.

Four bands per shape, all inside the [-1, 1]^3 domain:
  1. points exactly on the surface (area-weighted),
  2. points within ``near_radius`` of the surface,
  3. points within ``mid_radius``, Gaussian-distributed around surface points,
  4. points uniform over the whole domain.
Every label is an exact point-to-mesh distance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .meshdist import MeshDistanceQuery, triangle_areas

Array = np.ndarray

DOMAIN_LO = -1.0
DOMAIN_HI = 1.0


@dataclass(frozen=True)
class BandConfig:
    surface: int = 600_000
    near: int = 1_200_000
    mid: int = 800_000
    uniform: int = 400_000
    near_radius: float = 0.05
    mid_radius: float = 0.3
    mid_sigma: float = 0.3   # the band radius doubles as the Gaussian scale

    def __post_init__(self):
        if min(self.surface, self.near, self.mid, self.uniform) < 0:
            raise ValueError("band sizes must be non-negative")
        if self.near_radius <= 0 or self.mid_radius <= 0 or self.mid_sigma <= 0:
            raise ValueError("band radii must be positive")

    @property
    def total(self) -> int:
        return self.surface + self.near + self.mid + self.uniform


@dataclass
class TrainingSet:
    points: Array      # (n, 3) float32
    distances: Array   # (n,) float32
    band_sizes: tuple[int, int, int, int]


def normalize_mesh(vertices: Array) -> Array:
    """Center on the origin and shrink into the domain if needed (warns)."""
    lo, hi = vertices.min(axis=0), vertices.max(axis=0)
    center = 0.5 * (lo + hi)
    extent = np.abs(vertices - center).max()
    if np.abs(center).max() < 1e-12 and extent <= DOMAIN_HI:
        return vertices
    warnings.warn(
        f"mesh not normalized (center offset {np.abs(center).max():.3g}, "
        f"max extent {extent:.3g}); rescaling into [-1, 1]^3", stacklevel=2)
    scale = 0.9 / max(extent, 1e-12)   # small margin keeps bands in-domain
    return (vertices - center) * scale


def sample_on_surface(vertices: Array, faces: Array, n: int,
                      rng: np.random.Generator) -> Array:
    areas = triangle_areas(vertices, faces)
    total = areas.sum()
    if total <= 0:
        raise ValueError("mesh has no positive-area triangles")
    cdf = np.cumsum(areas) / total
    tri = vertices[faces[np.searchsorted(cdf, rng.random(n))]]
    s = np.sqrt(rng.random(n))[:, None]
    r = rng.random(n)[:, None]
    return tri[:, 0] * (1 - s) + tri[:, 1] * (s * (1 - r)) + tri[:, 2] * (s * r)


def _fill_offset_band(query: MeshDistanceQuery, vertices: Array, faces: Array,
                      n: int, radius: float, rng: np.random.Generator,
                      sigma: float | None = None) -> tuple[Array, Array]:
    """Surface points + offsets, resampled until within the band and domain."""
    pts = np.empty((n, 3))
    dist = np.empty(n)
    todo = np.arange(n)
    while len(todo):
        base = sample_on_surface(vertices, faces, len(todo), rng)
        if sigma is not None:
            offset = rng.normal(0.0, sigma, size=(len(todo), 3))
        else:
            # uniform in the ball of the band radius
            v = rng.normal(size=(len(todo), 3))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            offset = v * (radius * np.cbrt(rng.random(len(todo)))[:, None])
        cand = base + offset
        d = query.query(cand)
        good = ((d <= radius)
                & (cand >= DOMAIN_LO).all(axis=1)
                & (cand <= DOMAIN_HI).all(axis=1))
        keep = todo[good]
        pts[keep] = cand[good]
        dist[keep] = d[good]
        todo = todo[~good]
    return pts, dist


def sample_training_set(vertices: Array, faces: Array,
                        config: BandConfig | None = None,
                        seed: int = 0) -> TrainingSet:
    config = config or BandConfig()
    rng = np.random.default_rng(seed)
    vertices = normalize_mesh(np.asarray(vertices, dtype=np.float64))
    query = MeshDistanceQuery(vertices, faces)
    faces = query.faces   # zero-area triangles dropped

    surface = sample_on_surface(vertices, faces, config.surface, rng)
    surface_d = query.query(surface)
    near, near_d = _fill_offset_band(query, vertices, faces, config.near,
                                     config.near_radius, rng)
    mid, mid_d = _fill_offset_band(query, vertices, faces, config.mid,
                                   config.mid_radius, rng, sigma=config.mid_sigma)
    uniform = rng.uniform(DOMAIN_LO, DOMAIN_HI, size=(config.uniform, 3))
    uniform_d = query.query(uniform)

    points = np.concatenate([surface, near, mid, uniform]).astype(np.float32)
    dists = np.concatenate([surface_d, near_d, mid_d, uniform_d]).astype(np.float32)
    return TrainingSet(
        points=points, distances=dists,
        band_sizes=(config.surface, config.near, config.mid, config.uniform))
