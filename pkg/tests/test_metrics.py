"""Sampled mesh metrics: hand-computable geometries pin the definitions.

Two parallel unit squares give exact expected values for every metric
(each surface point is exactly the offset away from the other square),
independent of sampling, which fixes conventions: squared chamfer,
unsquared Hausdorff and F-score threshold, percentages out of 100.
"""

from __future__ import annotations

import numpy as np
import pytest

from udfmesh.fields.meshfield import MeshDistance
from udfmesh.metrics import MetricConfig, evaluate, sample_surface
from udfmesh.primitives import make_sphere_mesh

SQUARE_V = np.array([[0.0, 0, 0], [1.0, 0, 0], [1.0, 1, 0], [0.0, 1, 0]])
SQUARE_F = np.array([[0, 1, 2], [0, 2, 3]])


def shifted(verts, dz):
    out = verts.copy()
    out[:, 2] += dz
    return out


def test_identity_metrics():
    cfg = MetricConfig(n_samples=20000)
    r = evaluate(SQUARE_V, SQUARE_F, SQUARE_V, SQUARE_F, cfg)
    assert r.chamfer < 1e-30
    assert r.hausdorff < 1e-15
    assert r.precision == 100.0
    assert r.recall == 100.0
    assert r.f_score == 100.0


def test_offset_squares_have_exact_metrics():
    t = 0.01
    cfg = MetricConfig(n_samples=20000)
    r = evaluate(shifted(SQUARE_V, t), SQUARE_F, SQUARE_V, SQUARE_F, cfg)
    # every sample of either square is exactly t from the other square,
    # so the values are independent of where the samples landed
    assert r.chamfer == pytest.approx(2.0 * t * t, rel=1e-12)
    assert r.hausdorff == pytest.approx(t, rel=1e-12)
    assert r.precision == 0.0 and r.recall == 0.0 and r.f_score == 0.0


def test_offset_below_threshold_scores_full():
    t = 5e-4  # below the 1e-3 hit threshold
    r = evaluate(shifted(SQUARE_V, t), SQUARE_F, SQUARE_V, SQUARE_F,
                 MetricConfig(n_samples=5000))
    assert r.f_score == 100.0
    assert r.chamfer == pytest.approx(2.0 * t * t, rel=1e-12)


def test_metrics_are_symmetric():
    a_v, a_f = make_sphere_mesh(radius=0.5, n_lat=16, n_lon=32)
    b_v, b_f = make_sphere_mesh(radius=0.5, n_lat=24, n_lon=48)
    cfg = MetricConfig(n_samples=20000)
    ab = evaluate(a_v, a_f, b_v, b_f, cfg)
    ba = evaluate(b_v, b_f, a_v, a_f, cfg)
    assert ab.chamfer == ba.chamfer
    assert ab.hausdorff == ba.hausdorff
    assert ab.precision == ba.recall
    assert ab.recall == ba.precision
    assert ab.f_score == ba.f_score


def test_metrics_rigid_motion_invariant():
    theta = 0.7
    rot = np.array(
        [
            [np.cos(theta), -np.sin(theta), 0.0],
            [np.sin(theta), np.cos(theta), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    shift = np.array([0.3, -0.2, 0.15])
    a_v, a_f = make_sphere_mesh(radius=0.5, n_lat=12, n_lon=24)
    b_v, b_f = make_sphere_mesh(radius=0.5, n_lat=20, n_lon=40)
    cfg = MetricConfig(n_samples=10000)
    base = evaluate(a_v, a_f, b_v, b_f, cfg)
    moved = evaluate(a_v @ rot.T + shift, a_f, b_v @ rot.T + shift, b_f, cfg)
    assert moved.chamfer == pytest.approx(base.chamfer, abs=1e-9)
    assert moved.hausdorff == pytest.approx(base.hausdorff, abs=1e-9)


def test_chamfer_converges_in_sample_count():
    a_v, a_f = make_sphere_mesh(radius=0.5, n_lat=16, n_lon=32)
    b_v, b_f = make_sphere_mesh(radius=0.5, n_lat=24, n_lon=48)
    small = evaluate(a_v, a_f, b_v, b_f, MetricConfig(n_samples=10000)).chamfer
    large = evaluate(a_v, a_f, b_v, b_f, MetricConfig(n_samples=100000)).chamfer
    assert abs(small - large) <= 0.1 * max(small, large)


def test_f_score_is_harmonic_mean():
    # candidate covers only half the reference surface: precision stays
    # perfect while recall drops to about half
    half_v = np.array([[0.0, 0, 0], [0.5, 0, 0], [0.5, 1, 0], [0.0, 1, 0]])
    r = evaluate(half_v, SQUARE_F, SQUARE_V, SQUARE_F, MetricConfig(n_samples=50000))
    assert r.precision == 100.0
    assert r.recall == pytest.approx(50.0, abs=1.0)
    assert r.f_score == pytest.approx(
        2.0 * r.precision * r.recall / (r.precision + r.recall), rel=1e-12
    )


def test_report_carries_run_parameters():
    cfg = MetricConfig(n_samples=1234, f_threshold=2e-3, seed=9)
    r = evaluate(SQUARE_V, SQUARE_F, SQUARE_V, SQUARE_F, cfg)
    assert r.sample_count == 1234
    assert r.threshold == 2e-3
    assert r.seed == 9
    d = r.as_dict()
    assert set(d) >= {"chamfer", "f_score", "hausdorff", "precision", "recall",
                      "sample_count", "threshold", "seed"}


def test_config_validation():
    with pytest.raises(ValueError, match="n_samples"):
        MetricConfig(n_samples=0)
    with pytest.raises(ValueError, match="f_threshold"):
        MetricConfig(f_threshold=0.0)


# ---------------------------------------------------------------------------
# surface sampling
# ---------------------------------------------------------------------------


def test_samples_lie_on_surface():
    verts, faces = make_sphere_mesh(radius=0.5, n_lat=12, n_lon=24)
    pts = sample_surface(verts, faces, 5000, seed=1)
    d, _, _ = MeshDistance(verts, faces).query(pts)
    assert d.max() < 1e-12


def test_sampling_is_area_weighted():
    # two triangles with area ratio 1:4 in distinct z-planes
    verts = np.array(
        [
            [0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0],          # area 1/2
            [0.0, 0, 1], [2.0, 0, 1], [0.0, 2, 1],          # area 2
        ]
    )
    faces = np.array([[0, 1, 2], [3, 4, 5]])
    pts = sample_surface(verts, faces, 100000, seed=0)
    frac_small = float(np.mean(pts[:, 2] < 0.5))
    assert frac_small == pytest.approx(0.2, abs=0.01)


def test_sampling_deterministic_per_seed():
    verts, faces = make_sphere_mesh(radius=0.5, n_lat=8, n_lon=16)
    a = sample_surface(verts, faces, 1000, seed=5)
    b = sample_surface(verts, faces, 1000, seed=5)
    c = sample_surface(verts, faces, 1000, seed=6)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_degenerate_mesh_rejected():
    verts = np.array([[0.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0]])
    faces = np.array([[0, 1, 2]])
    with pytest.raises(ValueError, match="no positive-area triangles"):
        sample_surface(verts, faces, 100)
    with pytest.raises(ValueError, match="no positive-area triangles"):
        evaluate(verts, faces, SQUARE_V, SQUARE_F)
