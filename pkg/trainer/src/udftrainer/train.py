"""Overfit one shape's unsigned distance field and export UDFW weights."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import torch

from .bands import BandConfig, sample_training_set
from .meshdist import load_obj
from .model import UdfNet, save_weights


@dataclass(frozen=True)
class TrainConfig:
    mesh_path: str
    out_path: str
    iterations: int = 3000
    batch_size: int = 30_000
    lr: float = 1e-4
    lr_decay: float = 0.3
    milestones: tuple[int, ...] = (1500, 2300)
    bands: BandConfig = field(default_factory=BandConfig)
    seed: int = 0
    hidden_dim: int = 512
    n_layers: int = 9
    first_omega: float = 30.0
    softplus_beta: float = 100.0
    encoding_frequencies: int = 0
    device: str = "cpu"

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.batch_size <= 0:
            raise ValueError("batch_size must be positive")
        if self.lr <= 0 or not 0 < self.lr_decay <= 1:
            raise ValueError("bad learning-rate schedule")
        if list(self.milestones) != sorted(set(self.milestones)):
            raise ValueError("milestones must be strictly increasing")
        if self.bands.total == 0:
            raise ValueError("training set is empty")


@dataclass
class TrainReport:
    final_loss: float
    loss_history: list[tuple[int, float]]   # (iteration, running mean loss)
    n_samples: int
    elapsed_s: float
    out_path: str


def train(config: TrainConfig, log=lambda msg: None) -> TrainReport:
    torch.manual_seed(config.seed)
    device = torch.device(config.device)

    vertices, faces = load_obj(config.mesh_path)
    t0 = time.perf_counter()
    data = sample_training_set(vertices, faces, config.bands, seed=config.seed)
    log(f"sampled {len(data.points)} labelled points "
        f"(bands {data.band_sizes}) in {time.perf_counter() - t0:.1f}s")

    points = torch.from_numpy(data.points).to(device)
    dists = torch.from_numpy(data.distances).to(device)

    model = UdfNet(hidden_dim=config.hidden_dim, n_layers=config.n_layers,
                   first_omega=config.first_omega,
                   softplus_beta=config.softplus_beta,
                   encoding_frequencies=config.encoding_frequencies).to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    scheduler = torch.optim.lr_scheduler.MultiStepLR(
        optimizer, milestones=list(config.milestones), gamma=config.lr_decay)
    sampler = torch.Generator(device="cpu").manual_seed(config.seed)

    t0 = time.perf_counter()
    history: list[tuple[int, float]] = []
    running: list[float] = []
    final_loss = float("nan")
    for it in range(config.iterations):
        idx = torch.randint(len(points), (config.batch_size,), generator=sampler)
        pred = model(points[idx])
        loss = torch.mean(torch.abs(pred - dists[idx]))
        if not torch.isfinite(loss):
            raise RuntimeError(
                f"training diverged: loss is not finite at iteration {it}")
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        scheduler.step()
        final_loss = loss.item()
        running.append(final_loss)
        if (it + 1) % 100 == 0 or it + 1 == config.iterations:
            history.append((it + 1, float(np.mean(running))))
            log(f"iter {it + 1:>5}/{config.iterations} "
                f"loss {np.mean(running):.3e} lr {scheduler.get_last_lr()[0]:.1e}")
            running.clear()

    model.eval()
    save_weights(config.out_path, model)
    elapsed = time.perf_counter() - t0
    log(f"trained {config.iterations} iterations in {elapsed:.1f}s; "
        f"weights written to {config.out_path}")
    return TrainReport(final_loss=final_loss, loss_history=history,
                       n_samples=len(data.points), elapsed_s=elapsed,
                       out_path=config.out_path)
