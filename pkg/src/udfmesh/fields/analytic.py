"""Closed-form unsigned distance fields for primitive shapes.

These serve as exact ground-truth fields: distances are true Euclidean
distances to the shape's surface and gradients are exact away from the
surface and the medial axis. On measure-zero tie sets (e.g. the box's
interior diagonal) a deterministic subgradient is returned.
"""

from __future__ import annotations

import numpy as np

from .base import Array, ScalarField


class SphereField(ScalarField):
    """Distance to a sphere surface of radius ``radius``."""

    def __init__(self, radius: float, center=(0.0, 0.0, 0.0)):
        if radius <= 0:
            raise ValueError("sphere radius must be positive")
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=np.float64)

    def _evaluate(self, points: Array, need_grad: bool = True):
        rel = points - self.center
        r = np.linalg.norm(rel, axis=1)
        dist = np.abs(r - self.radius)
        grad = np.zeros_like(rel)
        ok = r > 1e-300
        # radial direction, flipped inside the sphere; zero at the center
        sign = np.where(r >= self.radius, 1.0, -1.0)
        grad[ok] = rel[ok] * (sign[ok] / r[ok])[:, None]
        return dist, grad


class PlaneField(ScalarField):
    """Distance to the infinite plane ``normal . x = offset``."""

    def __init__(self, normal=(0.0, 0.0, 1.0), offset: float = 0.0):
        n = np.asarray(normal, dtype=np.float64)
        nn = np.linalg.norm(n)
        if nn < 1e-12:
            raise ValueError("plane normal must be nonzero")
        self.normal = n / nn
        self.offset = float(offset)

    def _evaluate(self, points: Array, need_grad: bool = True):
        s = points @ self.normal - self.offset
        dist = np.abs(s)
        sign = np.where(s >= 0, 1.0, -1.0)
        grad = sign[:, None] * self.normal[None, :]
        return dist, grad


class TwoPlanesField(ScalarField):
    """Two parallel planes ``z = +-gap/2``; the midplane is the cut locus."""

    def __init__(self, gap: float):
        if gap <= 0:
            raise ValueError("plane gap must be positive")
        self.gap = float(gap)

    def _evaluate(self, points: Array, need_grad: bool = True):
        z = points[:, 2]
        half = self.gap / 2.0
        d_hi = np.abs(z - half)
        d_lo = np.abs(z + half)
        dist = np.minimum(d_hi, d_lo)
        # gradient of distance to the nearest plane; ties resolve to the upper one
        s = np.where(d_hi <= d_lo, np.sign(z - half), np.sign(z + half))
        s = np.where(s == 0, 1.0, s)
        grad = np.zeros_like(points)
        grad[:, 2] = s
        return dist, grad


class BoxField(ScalarField):
    """Distance to the surface of an axis-aligned box."""

    def __init__(self, half_extents=(0.5, 0.5, 0.5), center=(0.0, 0.0, 0.0)):
        h = np.asarray(half_extents, dtype=np.float64)
        if np.isscalar(half_extents) or h.ndim == 0:
            h = np.full(3, float(half_extents))
        if (h <= 0).any():
            raise ValueError("box half extents must be positive")
        self.half = h
        self.center = np.asarray(center, dtype=np.float64)

    def _evaluate(self, points: Array, need_grad: bool = True):
        rel = points - self.center
        q = np.abs(rel) - self.half
        outside = np.maximum(q, 0.0)
        out_norm = np.linalg.norm(outside, axis=1)
        inside = np.minimum(q.max(axis=1), 0.0)
        dist = out_norm - inside

        grad = np.zeros_like(rel)
        sign = np.where(rel >= 0, 1.0, -1.0)
        out_mask = out_norm > 0
        grad[out_mask] = sign[out_mask] * outside[out_mask] / out_norm[out_mask, None]
        in_mask = ~out_mask
        if in_mask.any():
            # nearest face axis; argmax breaks diagonal ties deterministically
            k = np.argmax(q[in_mask], axis=1)
            rows = np.nonzero(in_mask)[0]
            grad[rows, k] = -sign[rows, k]
        return dist, grad


class DiskField(ScalarField):
    """Distance to a closed planar disk of radius ``radius`` at height ``z0``.

    The disk is the open-surface primitive: it has a genuine boundary
    circle, so extracted meshes should carry one boundary loop.
    """

    def __init__(self, radius: float = 1.0, z0: float = 0.0):
        if radius <= 0:
            raise ValueError("disk radius must be positive")
        self.radius = float(radius)
        self.z0 = float(z0)

    def _evaluate(self, points: Array, need_grad: bool = True):
        x, y = points[:, 0], points[:, 1]
        dz = points[:, 2] - self.z0
        rho = np.hypot(x, y)
        grad = np.zeros_like(points)

        inside = rho <= self.radius
        dist = np.empty(points.shape[0])
        dist[inside] = np.abs(dz[inside])
        sz = np.where(dz >= 0, 1.0, -1.0)
        grad[inside, 2] = sz[inside]

        out = ~inside
        if out.any():
            dr = rho[out] - self.radius
            d = np.hypot(dr, dz[out])
            dist[out] = d
            ok = d > 1e-300
            # direction away from the nearest rim point
            ux = np.zeros_like(d)
            uy = np.zeros_like(d)
            rho_o = rho[out]
            ux = x[out] / rho_o * dr
            uy = y[out] / rho_o * dr
            g = np.stack([ux, uy, dz[out]], axis=1)
            g[ok] /= d[ok, None]
            grad[out] = g
        return dist, grad


class TorusField(ScalarField):
    """Distance to a torus with major radius ``major`` and tube radius ``minor``."""

    def __init__(self, major: float = 0.6, minor: float = 0.25):
        if major <= 0 or minor <= 0 or minor >= major:
            raise ValueError("torus needs 0 < minor < major")
        self.major = float(major)
        self.minor = float(minor)

    def _evaluate(self, points: Array, need_grad: bool = True):
        x, y, z = points[:, 0], points[:, 1], points[:, 2]
        rho = np.hypot(x, y)
        a = rho - self.major
        ring = np.hypot(a, z)
        dist = np.abs(ring - self.minor)

        grad = np.zeros_like(points)
        ok = (ring > 1e-300) & (rho > 1e-300)
        sign = np.where(ring >= self.minor, 1.0, -1.0)
        s = sign[ok] / ring[ok]
        grad[ok, 0] = s * a[ok] * x[ok] / rho[ok]
        grad[ok, 1] = s * a[ok] * y[ok] / rho[ok]
        grad[ok, 2] = s * z[ok]
        return dist, grad
