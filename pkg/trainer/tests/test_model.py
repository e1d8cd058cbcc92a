"""Network construction, weight export, and wire-format compatibility.

The exported files must be readable by any consumer of the UDFW format;
the compatibility tests here load them through the extraction library's
independent reader and compare raw predictions.
"""

import struct

import numpy as np
import pytest
import torch

from udftrainer.bands import BandConfig
from udftrainer.model import (
    ACT_SINE,
    ACT_SOFTPLUS,
    PositionalEncoding,
    SineLayer,
    UdfNet,
    load_weights,
    save_weights,
)
from udftrainer.train import TrainConfig, TrainReport, train


def small_net(**kw) -> UdfNet:
    torch.manual_seed(0)
    defaults = dict(hidden_dim=32, n_layers=3)
    defaults.update(kw)
    return UdfNet(**defaults)


def layer_dims(layers):
    return [(l.weights.shape[1], l.weights.shape[0]) for l in layers]


# ---------------------------------------------------------------------------
# Architecture


def test_default_dimension_chain(tmp_path):
    p = tmp_path / "default.udfw"
    save_weights(p, UdfNet())
    layers, encoding, _ = load_weights(p)
    dims = layer_dims(layers)
    assert dims[0] == (3, 512)
    assert dims[1:-1] == [(512, 512)] * 7
    assert dims[-1] == (512, 1)
    assert encoding is None
    assert all(l.activation == ACT_SINE for l in layers[:-1])
    assert layers[-1].activation == ACT_SOFTPLUS


def test_outputs_strictly_positive():
    net = small_net()
    x = torch.rand(1_000, 3) * 2 - 1
    with torch.no_grad():
        y = net(x)
    assert y.shape == (1_000,)
    assert torch.all(y > 0)


def test_sine_layer_init_ranges():
    torch.manual_seed(0)
    first = SineLayer(3, 64, omega=30.0, first=True)
    hidden = SineLayer(64, 64)
    assert first.linear.weight.abs().max() <= 1.0 / 3
    assert hidden.linear.weight.abs().max() <= np.sqrt(6.0 / 64) + 1e-12


def test_positional_encoding_feature_order():
    enc = PositionalEncoding(frequencies=2, include_input=True)
    x = torch.tensor([[0.25, -0.5, 1.0]])
    out = enc(x).numpy()[0]
    p = np.pi * np.array([0.25, -0.5, 1.0])
    want = np.concatenate([
        [0.25, -0.5, 1.0],
        np.sin(p), np.cos(p),
        np.sin(2 * p), np.cos(2 * p),
    ])
    np.testing.assert_allclose(out, want, atol=1e-6)
    assert enc.out_dim == 3 * (1 + 2 * 2)


# ---------------------------------------------------------------------------
# Wire format


def test_export_header_versions(tmp_path):
    p1 = tmp_path / "sine.udfw"
    save_weights(p1, small_net())
    magic, version = struct.unpack("<4sI", p1.read_bytes()[:8])
    assert magic == b"UDFW" and version == 1

    p2 = tmp_path / "encoded.udfw"
    save_weights(p2, small_net(encoding_frequencies=4))
    magic, version = struct.unpack("<4sI", p2.read_bytes()[:8])
    assert magic == b"UDFW" and version == 2
    layers, encoding, _ = load_weights(p2)
    assert encoding == (4, True)
    assert layer_dims(layers)[0] == (27, 32)   # 3 * (1 + 2*4) inputs


def test_round_trip_preserves_weights(tmp_path):
    net = small_net()
    p = tmp_path / "net.udfw"
    save_weights(p, net, bounds=((-0.5, -0.5, -0.25), (0.5, 0.5, 0.25)))
    layers, encoding, bounds = load_weights(p)
    assert encoding is None
    np.testing.assert_allclose(bounds[:3], [-0.5, -0.5, -0.25], atol=1e-7)
    np.testing.assert_allclose(bounds[3:], [0.5, 0.5, 0.25], atol=1e-7)
    assert len(layers) == 3
    assert layers[0].beta == pytest.approx(100.0)
    np.testing.assert_allclose(
        layers[-1].weights, net.head.weight.detach().numpy(), atol=1e-7)


def test_omega_folded_into_first_layer(tmp_path):
    net = small_net(first_omega=30.0)
    p = tmp_path / "net.udfw"
    save_weights(p, net)
    layers, _, _ = load_weights(p)
    module = net.hidden[0]
    assert isinstance(module, SineLayer) and module.omega == 30.0
    np.testing.assert_allclose(
        layers[0].weights, module.linear.weight.detach().numpy() * 30.0,
        rtol=1e-6)
    np.testing.assert_allclose(
        layers[0].biases, module.linear.bias.detach().numpy() * 30.0,
        rtol=1e-6)


def test_load_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.udfw"
    p.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ValueError, match="magic"):
        load_weights(p)
    p.write_bytes(struct.pack("<4sI", b"UDFW", 99))
    with pytest.raises(ValueError, match="version"):
        load_weights(p)
    good = tmp_path / "good.udfw"
    save_weights(good, small_net())
    p.write_bytes(good.read_bytes()[:40])
    with pytest.raises((ValueError, struct.error)):
        load_weights(p)


# ---------------------------------------------------------------------------
# Cross-component compatibility (exported files drive the extraction library)


def _parity(net, tmp_path, name):
    from udfmesh.fields import MlpField
    from udfmesh.fields.base import eval_batch

    p = tmp_path / name
    save_weights(p, net)
    field = MlpField.from_file(p)
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1.0, 1.0, size=(100, 3))
    with torch.no_grad():
        ours = net(torch.from_numpy(pts.astype(np.float32))).numpy()
    theirs = eval_batch(field, pts, need_grad=False).distances
    np.testing.assert_allclose(theirs, ours, atol=1e-5)


def test_extractor_reads_sine_export(tmp_path):
    _parity(small_net(), tmp_path, "sine.udfw")


def test_extractor_reads_encoded_export(tmp_path):
    _parity(small_net(encoding_frequencies=4), tmp_path, "encoded.udfw")


# ---------------------------------------------------------------------------
# Training loop plumbing


def _tiny_cfg(mesh, out, **kw):
    defaults = dict(
        mesh_path=str(mesh), out_path=str(out),
        iterations=0, batch_size=500, lr=1e-3, milestones=(),
        bands=BandConfig(surface=500, near=500, mid=300, uniform=200),
        seed=0, hidden_dim=16, n_layers=3)
    defaults.update(kw)
    return TrainConfig(**defaults)


def test_zero_iteration_training_exports_loadable_net(coarse_sphere_obj, tmp_path):
    out = tmp_path / "net.udfw"
    report = train(_tiny_cfg(coarse_sphere_obj, out))
    assert isinstance(report, TrainReport)
    assert out.exists() and report.n_samples == 1_500

    layers, encoding, _ = load_weights(out)
    assert layer_dims(layers) == [(3, 16), (16, 16), (16, 1)]

    from udfmesh.fields import MlpField
    from udfmesh.fields.base import eval_batch
    field = MlpField.from_file(out)
    d = eval_batch(field, np.zeros((1, 3)), need_grad=False).distances
    assert np.isfinite(d).all() and (d > 0).all()


def test_training_reduces_loss(coarse_sphere_obj, tmp_path):
    out = tmp_path / "net.udfw"
    messages = []
    cfg = _tiny_cfg(coarse_sphere_obj, out, iterations=200, lr=3e-3)
    report = train(cfg, log=messages.append)
    assert any("iter" in m for m in messages)
    assert len(report.loss_history) == 2          # means over iters 1-100, 101-200
    assert report.loss_history[-1][1] < report.loss_history[0][1]
    assert report.final_loss > 0 and np.isfinite(report.final_loss)


def test_divergence_raises(coarse_sphere_obj, tmp_path):
    # An absurd step size overflows float32 within a few iterations.
    cfg = _tiny_cfg(coarse_sphere_obj, tmp_path / "net.udfw",
                    iterations=50, lr=1e20, encoding_frequencies=2)
    with pytest.raises(RuntimeError, match="training diverged"):
        train(cfg)


def test_train_config_validation(coarse_sphere_obj, tmp_path):
    out = tmp_path / "net.udfw"
    with pytest.raises(ValueError):
        _tiny_cfg(coarse_sphere_obj, out, iterations=-1)
    with pytest.raises(ValueError):
        _tiny_cfg(coarse_sphere_obj, out, batch_size=0)
    with pytest.raises(ValueError):
        _tiny_cfg(coarse_sphere_obj, out, lr=0.0)
    with pytest.raises(ValueError):
        _tiny_cfg(coarse_sphere_obj, out, milestones=(100, 100))
    with pytest.raises(ValueError):
        _tiny_cfg(coarse_sphere_obj, out,
                  bands=BandConfig(surface=0, near=0, mid=0, uniform=0))
