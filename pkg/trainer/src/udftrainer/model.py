"""Sine-activated overfitting network and the UDFW weight container.

Two settings share one exporter:
  * default: sine hidden layers (the first scaled by omega), SoftPlus output;
  * encoded: NeRF-style positional encoding with SoftPlus throughout.

The UDFW byte layout (shared contract with any consumer):

    magic   4 bytes  b"UDFW"
    version u32      1, or 2 when an encoding descriptor is present
    (v2)    u32      encoding frequency count
    (v2)    u8       1 if the raw point is prepended to the encoding
    layers  u32      layer count
    per layer: in_dim u32, out_dim u32, act u8 (0 sine / 1 softplus),
               beta f32, weights f32[out*in] row-major, biases f32[out]
    bounds  f32[6]   domain lo_xyz then hi_xyz

Sine layers on the wire apply a plain ``sin``; the trainer's first-layer
``omega`` factor is folded into that layer's weights at export so the
file reproduces the training-time forward pass exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

MAGIC = b"UDFW"
ACT_SINE = 0
ACT_SOFTPLUS = 1


class PositionalEncoding(nn.Module):
    """Features [x, sin(2^k pi x), cos(2^k pi x)] for k < frequencies."""

    def __init__(self, frequencies: int, include_input: bool = True):
        super().__init__()
        self.frequencies = int(frequencies)
        self.include_input = bool(include_input)

    @property
    def out_dim(self) -> int:
        return 3 * (self.include_input + 2 * self.frequencies)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        feats = [x] if self.include_input else []
        for k in range(self.frequencies):
            w = (2.0 ** k) * torch.pi
            feats.append(torch.sin(w * x))
            feats.append(torch.cos(w * x))
        return torch.cat(feats, dim=-1)


class SineLayer(nn.Module):
    def __init__(self, in_dim: int, out_dim: int, omega: float = 1.0,
                 first: bool = False):
        super().__init__()
        self.linear = nn.Linear(in_dim, out_dim)
        self.omega = float(omega)
        with torch.no_grad():
            if first:
                bound = 1.0 / in_dim
            else:
                bound = np.sqrt(6.0 / in_dim)
            self.linear.weight.uniform_(-bound, bound)
            self.linear.bias.uniform_(-bound, bound)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.sin(self.omega * self.linear(x))


class UdfNet(nn.Module):
    """n_layers linear layers; all but the last sine-activated (or all
    SoftPlus when a positional encoding is attached)."""

    def __init__(self, hidden_dim: int = 512, n_layers: int = 9,
                 first_omega: float = 30.0, softplus_beta: float = 100.0,
                 encoding_frequencies: int = 0):
        super().__init__()
        if n_layers < 2:
            raise ValueError("need at least an input and an output layer")
        self.softplus_beta = float(softplus_beta)
        self.encoding = (PositionalEncoding(encoding_frequencies)
                         if encoding_frequencies > 0 else None)
        in_dim = self.encoding.out_dim if self.encoding else 3

        hidden: list[nn.Module] = []
        if self.encoding:
            act = nn.Softplus(beta=softplus_beta)
            for _ in range(n_layers - 1):
                hidden += [nn.Linear(in_dim, hidden_dim), act]
                in_dim = hidden_dim
        else:
            hidden.append(SineLayer(in_dim, hidden_dim, omega=first_omega,
                                    first=True))
            for _ in range(n_layers - 2):
                hidden.append(SineLayer(hidden_dim, hidden_dim))
        self.hidden = nn.Sequential(*hidden)
        self.head = nn.Linear(hidden_dim, 1)
        self.out_act = nn.Softplus(beta=softplus_beta)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.encoding is not None:
            x = self.encoding(x)
        return self.out_act(self.head(self.hidden(x))).squeeze(-1)


@dataclass(frozen=True)
class WireLayer:
    weights: np.ndarray   # (out, in) float32
    biases: np.ndarray    # (out,) float32
    activation: int
    beta: float


def _wire_layers(model: UdfNet) -> list[WireLayer]:
    layers: list[WireLayer] = []

    def dump(linear: nn.Linear, scale: float, act: int) -> WireLayer:
        w = (linear.weight.detach().cpu().numpy() * scale).astype(np.float32)
        b = (linear.bias.detach().cpu().numpy() * scale).astype(np.float32)
        return WireLayer(w, b, act, model.softplus_beta)

    for module in model.hidden:
        if isinstance(module, SineLayer):
            layers.append(dump(module.linear, module.omega, ACT_SINE))
        elif isinstance(module, nn.Linear):
            layers.append(dump(module, 1.0, ACT_SOFTPLUS))
    layers.append(dump(model.head, 1.0, ACT_SOFTPLUS))
    return layers


def save_weights(path: str, model: UdfNet,
                 bounds=((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))) -> None:
    layers = _wire_layers(model)
    enc = model.encoding
    with open(path, "wb") as f:
        f.write(MAGIC)
        if enc is not None:
            f.write(struct.pack("<I", 2))
            f.write(struct.pack("<IB", enc.frequencies, int(enc.include_input)))
        else:
            f.write(struct.pack("<I", 1))
        f.write(struct.pack("<I", len(layers)))
        for layer in layers:
            out_dim, in_dim = layer.weights.shape
            f.write(struct.pack("<IIBf", in_dim, out_dim, layer.activation,
                                layer.beta))
            f.write(layer.weights.astype("<f4").tobytes())
            f.write(layer.biases.astype("<f4").tobytes())
        lo, hi = bounds
        f.write(np.asarray([*lo, *hi], dtype="<f4").tobytes())


def load_weights(path: str):
    """Read back a UDFW file (for round-trip checks): returns
    (layers, (frequencies, include_input) | None, bounds)."""
    with open(path, "rb") as f:
        data = f.read()
    off = 0

    def take(fmt: str):
        nonlocal off
        vals = struct.unpack_from(fmt, data, off)
        off += struct.calcsize(fmt)
        return vals

    if data[:4] != MAGIC:
        raise ValueError("bad magic")
    off = 4
    (version,) = take("<I")
    encoding = None
    if version == 2:
        freqs, include = take("<IB")
        encoding = (freqs, bool(include))
    elif version != 1:
        raise ValueError(f"unsupported version {version}")
    (count,) = take("<I")
    layers = []
    for _ in range(count):
        in_dim, out_dim, act, beta = take("<IIBf")
        w = np.frombuffer(data, "<f4", out_dim * in_dim, off)
        off += 4 * out_dim * in_dim
        b = np.frombuffer(data, "<f4", out_dim, off)
        off += 4 * out_dim
        layers.append(WireLayer(w.reshape(out_dim, in_dim).copy(), b.copy(),
                                act, float(beta)))
    bounds = np.frombuffer(data, "<f4", 6, off).copy()
    off += 24
    if off != len(data):
        raise ValueError("trailing bytes")
    return layers, encoding, bounds
