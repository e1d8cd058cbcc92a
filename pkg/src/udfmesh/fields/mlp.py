"""MLP-encoded distance fields and the UDFW weight wire format.

UDFW is a little-endian binary container for fully connected networks:

    magic   4 bytes  b"UDFW"
    version u32      1 or 2
    (v2)    u32      positional-encoding frequency count (0 = none)
    (v2)    u8       1 if the raw point is prepended to the encoding
    layers  u32      layer count
    per layer:
        in_dim  u32
        out_dim u32
        act     u8   0 = sine, 1 = softplus
        beta    f32  softplus sharpness; ignored for sine
        weights f32[out_dim * in_dim]   row-major
        biases  f32[out_dim]
    bounds  f32[6]   axis-aligned domain (lo_xyz, hi_xyz)

Version 2 prefixes the layer table with a positional-encoding
descriptor; the first layer's ``in_dim`` must match the encoded input
width. Evaluation runs in float64 with analytic gradients obtained by
reverse-mode accumulation through the stored pre-activations.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .base import Array, ScalarField

MAGIC = b"UDFW"
ACT_SINE = 0
ACT_SOFTPLUS = 1
_EVAL_CHUNK = 16384
# torch.nn.functional.softplus switches to the identity above this
_SOFTPLUS_LINEAR_THRESHOLD = 20.0


@dataclass(frozen=True)
class MlpLayer:
    """One dense layer: weights (out, in) float32, biases (out,) float32."""

    weights: Array
    biases: Array
    activation: int
    beta: float = 100.0

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class PositionalEncoding:
    """NeRF-style encoding: per axis, (sin, cos) of 2^k * pi * x for k < frequencies."""

    frequencies: int = 0
    include_input: bool = True

    @property
    def out_dim(self) -> int:
        return 3 * (self.include_input + 2 * self.frequencies)

    @property
    def identity(self) -> bool:
        return self.frequencies == 0 and self.include_input


@dataclass(frozen=True)
class MlpWeights:
    layers: tuple[MlpLayer, ...]
    bounds: Array  # (2, 3) lo/hi
    encoding: PositionalEncoding = field(default_factory=PositionalEncoding)


class UdfwFormatError(ValueError):
    pass


def _read_exact(f, n: int, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise UdfwFormatError(f"unexpected EOF while reading {what}")
    return buf


def load_weights(path) -> MlpWeights:
    """Parse a UDFW file, validating the dimension chain at load time."""
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != MAGIC:
            raise UdfwFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (version,) = struct.unpack("<I", _read_exact(f, 4, "version"))
        if version not in (1, 2):
            raise UdfwFormatError(f"unsupported UDFW version {version}")
        encoding = PositionalEncoding()
        if version == 2:
            (freqs,) = struct.unpack("<I", _read_exact(f, 4, "encoding descriptor"))
            (incl,) = struct.unpack("<B", _read_exact(f, 1, "encoding descriptor"))
            encoding = PositionalEncoding(frequencies=freqs, include_input=bool(incl))
        (n_layers,) = struct.unpack("<I", _read_exact(f, 4, "layer count"))
        if n_layers == 0:
            raise UdfwFormatError("layer count is zero")

        layers = []
        expect_in = encoding.out_dim
        for k in range(n_layers):
            hdr = _read_exact(f, 13, f"layer {k} header")
            in_dim, out_dim, act, beta = struct.unpack("<IIBf", hdr)
            if act not in (ACT_SINE, ACT_SOFTPLUS):
                raise UdfwFormatError(f"unknown activation code {act} in layer {k}")
            if in_dim == 0 or out_dim == 0:
                raise UdfwFormatError(f"zero dimension in layer {k}")
            if in_dim != expect_in:
                raise UdfwFormatError(
                    f"dimension mismatch in layer {k}: in_dim {in_dim}, expected {expect_in}"
                )
            w = np.frombuffer(
                _read_exact(f, 4 * in_dim * out_dim, f"layer {k} weights"), dtype="<f4"
            ).reshape(out_dim, in_dim)
            b = np.frombuffer(_read_exact(f, 4 * out_dim, f"layer {k} biases"), dtype="<f4")
            layers.append(MlpLayer(weights=w, biases=b, activation=act, beta=float(beta)))
            expect_in = out_dim
        if layers[-1].out_dim != 1:
            raise UdfwFormatError(f"final layer must have out_dim 1, got {layers[-1].out_dim}")
        bounds = np.frombuffer(_read_exact(f, 24, "domain bounds"), dtype="<f4")
        trailing = f.read(1)
        if trailing:
            raise UdfwFormatError("trailing bytes after domain bounds")
    lo, hi = bounds[:3].astype(np.float64), bounds[3:].astype(np.float64)
    if (hi <= lo).any():
        raise UdfwFormatError("degenerate domain bounds")
    return MlpWeights(layers=tuple(layers), bounds=np.stack([lo, hi]), encoding=encoding)


def save_weights(weights: MlpWeights, path) -> None:
    """Write weights in UDFW form; version 2 is used only when encoding is active."""
    version = 1 if weights.encoding.identity else 2
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", version))
        if version == 2:
            f.write(struct.pack("<IB", weights.encoding.frequencies,
                                int(weights.encoding.include_input)))
        f.write(struct.pack("<I", len(weights.layers)))
        for layer in weights.layers:
            f.write(struct.pack("<IIBf", layer.in_dim, layer.out_dim,
                                layer.activation, layer.beta))
            f.write(np.ascontiguousarray(layer.weights, dtype="<f4").tobytes())
            f.write(np.ascontiguousarray(layer.biases, dtype="<f4").tobytes())
        f.write(np.asarray(weights.bounds, dtype="<f4").reshape(6).tobytes())


def _softplus(z: Array, beta: float) -> Array:
    bz = beta * z
    out = np.where(bz > _SOFTPLUS_LINEAR_THRESHOLD, z,
                   np.log1p(np.exp(np.minimum(bz, _SOFTPLUS_LINEAR_THRESHOLD))) / beta)
    return out


def _softplus_deriv(z: Array, beta: float) -> Array:
    bz = beta * z
    return np.where(bz > _SOFTPLUS_LINEAR_THRESHOLD, 1.0,
                    1.0 / (1.0 + np.exp(-np.minimum(bz, _SOFTPLUS_LINEAR_THRESHOLD))))


class MlpField(ScalarField):
    """Evaluates a loaded MLP in float64 with analytic reverse-mode gradients."""

    def __init__(self, weights: MlpWeights):
        self.weights = weights
        self._w64 = [np.asarray(l.weights, dtype=np.float64) for l in weights.layers]
        self._b64 = [np.asarray(l.biases, dtype=np.float64) for l in weights.layers]

    @classmethod
    def from_file(cls, path) -> "MlpField":
        return cls(load_weights(path))

    def _encode(self, points: Array) -> tuple[Array, Array]:
        """Return encoded features (n, d) and per-axis feature scales for backprop."""
        enc = self.weights.encoding
        if enc.identity:
            return points, None
        feats = []
        if enc.include_input:
            feats.append(points)
        for k in range(enc.frequencies):
            w = (2.0 ** k) * np.pi
            feats.append(np.sin(w * points))
            feats.append(np.cos(w * points))
        return np.concatenate(feats, axis=1), None

    def _encode_backprop(self, points: Array, grad_feat: Array) -> Array:
        """Chain feature gradients (n, d) back to point gradients (n, 3)."""
        enc = self.weights.encoding
        if enc.identity:
            return grad_feat
        out = np.zeros((points.shape[0], 3))
        col = 0
        if enc.include_input:
            out += grad_feat[:, col:col + 3]
            col += 3
        for k in range(enc.frequencies):
            w = (2.0 ** k) * np.pi
            out += grad_feat[:, col:col + 3] * (w * np.cos(w * points))
            col += 3
            out += grad_feat[:, col:col + 3] * (-w * np.sin(w * points))
            col += 3
        return out

    def _forward_chunk(self, points: Array, need_grad: bool):
        x, _ = self._encode(points)
        layers = self.weights.layers
        pre = []
        for w, b, layer in zip(self._w64, self._b64, layers):
            z = x @ w.T + b
            pre.append(z)
            if layer.activation == ACT_SINE:
                x = np.sin(z)
            else:
                x = _softplus(z, layer.beta)
        dist = x[:, 0]
        if not need_grad:
            return dist, np.zeros((points.shape[0], 3))
        # reverse-mode: the output is scalar, so one backward pass suffices
        delta = np.ones((points.shape[0], 1))
        for w, layer, z in zip(reversed(self._w64), reversed(layers), reversed(pre)):
            if layer.activation == ACT_SINE:
                dact = np.cos(z)
            else:
                dact = _softplus_deriv(z, layer.beta)
            delta = (delta * dact) @ w
        grad = self._encode_backprop(points, delta)
        return dist, grad

    def _evaluate(self, points: Array, need_grad: bool = True):
        n = points.shape[0]
        if n <= _EVAL_CHUNK:
            return self._forward_chunk(points, need_grad)
        dist = np.empty(n)
        grad = np.empty((n, 3))
        for s in range(0, n, _EVAL_CHUNK):
            e = min(s + _EVAL_CHUNK, n)
            dist[s:e], grad[s:e] = self._forward_chunk(points[s:e], need_grad)
        return dist, grad
