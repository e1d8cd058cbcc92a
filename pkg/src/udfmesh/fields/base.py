"""Scalar field protocol shared by every distance-field backend.

A field maps 3D points to unsigned distances and spatial gradients. All
backends are immutable after construction so concurrent read-only
evaluation is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Array = np.ndarray

# Extraction domain. Shapes are assumed normalized into this cube.
DOMAIN_LO = -1.0
DOMAIN_HI = 1.0

# Gradients with a norm below this are unusable for projection.
GRAD_EPS = 1e-8


@dataclass(frozen=True)
class FieldResponse:
    """Batched evaluation result: distances (n,) and raw gradients (n, 3)."""

    distances: Array
    gradients: Array

    def __len__(self) -> int:
        return self.distances.shape[0]


class ScalarField:
    """Base class for unsigned distance fields over [-1, 1]^3.

    Subclasses implement ``_evaluate`` returning (distances, gradients)
    for an (n, 3) float64 array. Gradients are raw field gradients, not
    normalized; callers that need surface normals must normalize and
    treat near-zero norms as invalid.
    """

    def _evaluate(self, points: Array, need_grad: bool = True) -> tuple[Array, Array]:
        raise NotImplementedError

    def evaluate(self, points: Array, need_grad: bool = True) -> tuple[Array, Array]:
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"expected (n, 3) points, got shape {points.shape}")
        if points.shape[0] == 0:
            return np.zeros(0), np.zeros((0, 3))
        if not np.isfinite(points).all():
            bad = int(np.argwhere(~np.isfinite(points).all(axis=1))[0, 0])
            raise ValueError(f"non-finite query point at index {bad}")
        dist, grad = self._evaluate(points, need_grad=need_grad)
        return dist, grad


def eval_batch(field: ScalarField, points: Array, need_grad: bool = True) -> FieldResponse:
    """Evaluate ``field`` on a batch, validating outputs.

    A non-finite output for a finite input is a hard error naming the
    offending point index. Zero-length batches are allowed.
    """
    dist, grad = field.evaluate(points, need_grad=need_grad)
    if dist.shape[0] and not np.isfinite(dist).all():
        bad = int(np.argwhere(~np.isfinite(dist))[0, 0])
        raise ValueError(f"field produced non-finite distance at point index {bad}")
    if need_grad and grad.shape[0] and not np.isfinite(grad).all():
        bad = int(np.argwhere(~np.isfinite(grad).all(axis=1))[0, 0])
        raise ValueError(f"field produced non-finite gradient at point index {bad}")
    return FieldResponse(distances=dist, gradients=grad)
