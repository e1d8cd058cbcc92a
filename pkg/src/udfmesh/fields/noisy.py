"""Deterministic corruption wrapper emulating learned-field artifacts.

Learned unsigned fields are smooth, never reach zero, and are least
reliable close to the surface and the cut locus. The wrapper reproduces
that profile on top of any exact field:

  * the base distance is averaged over six axis offsets of radius ``r``,
    which rounds off kinks at sharp features and the medial axis;
  * seeded position-hashed noise is subtracted before smoothing, with an
    amplitude that decays away from the surface, so near-surface values
    are the untrustworthy ones;
  * the result is floored at ``near_surface_bias`` so the field stays
    strictly positive at the surface.

Every output is a pure function of (point, seed): repeated evaluation
is bit-identical, which keeps extraction deterministic.
"""

from __future__ import annotations

import numpy as np

from .base import Array, ScalarField

_OFFSETS = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
    dtype=np.float64,
)


def _splitmix64(x: Array) -> Array:
    x = (x + np.uint64(0x9E3779B97F4A7C15)).astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def position_noise(points: Array, seed: int) -> Array:
    """White noise in [-1, 1) hashed from the bit patterns of the coordinates."""
    bits = np.ascontiguousarray(points, dtype=np.float64).view(np.uint64)
    h = np.full(bits.shape[0], np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    for axis in range(3):
        h = _splitmix64(h ^ bits[:, axis])
    return (h >> np.uint64(11)).astype(np.float64) * (2.0 ** -53) * 2.0 - 1.0


class NoisyFieldWrapper(ScalarField):
    """Wraps an exact field with seeded near-surface corruption."""

    def __init__(
        self,
        base: ScalarField,
        rng_seed: int = 0,
        near_surface_bias: float = 0.001,
        smoothing_radius: float = 0.004,
        noise_amplitude: float = 0.002,
        noise_band: float = 0.005,
    ):
        self.base = base
        self.rng_seed = int(rng_seed)
        self.near_surface_bias = float(near_surface_bias)
        self.smoothing_radius = float(smoothing_radius)
        self.noise_amplitude = float(noise_amplitude)
        self.noise_band = float(noise_band)

    def _corrupted(self, points: Array) -> tuple[Array, Array]:
        d, g = self.base.evaluate(points)
        amp = self.noise_amplitude * np.exp(-((d / self.noise_band) ** 2))
        noisy = d - amp * position_noise(points, self.rng_seed)
        return np.maximum(noisy, 0.0), g

    def _evaluate(self, points: Array, need_grad: bool = True):
        n = points.shape[0]
        acc_d = np.zeros(n)
        acc_g = np.zeros((n, 3))
        for off in _OFFSETS:
            d, g = self._corrupted(points + off * self.smoothing_radius)
            acc_d += d
            acc_g += g
        dist = np.maximum(acc_d / 6.0, self.near_surface_bias)
        return dist, acc_g / 6.0
