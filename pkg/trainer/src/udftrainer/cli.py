"""Command line front end mirroring TrainConfig."""

from __future__ import annotations

import argparse
import json
import sys

from .bands import BandConfig
from .train import TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udftrain",
        description="Overfit an MLP to a mesh's unsigned distance field and "
                    "export UDFW weights.")
    parser.add_argument("--mesh", required=True, help="input mesh (.obj)")
    parser.add_argument("--out", required=True, help="output weights (.udfw)")
    parser.add_argument("--iterations", type=int, default=3000)
    parser.add_argument("--batch-size", type=int, default=30_000)
    parser.add_argument("--lr", type=float, default=1e-4)
    parser.add_argument("--lr-decay", type=float, default=0.3)
    parser.add_argument("--milestones", type=int, nargs="*", default=[1500, 2300],
                        help="iterations at which the learning rate decays")
    parser.add_argument("--band-surface", type=int, default=600_000)
    parser.add_argument("--band-near", type=int, default=1_200_000)
    parser.add_argument("--band-mid", type=int, default=800_000)
    parser.add_argument("--band-uniform", type=int, default=400_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--hidden-dim", type=int, default=512)
    parser.add_argument("--n-layers", type=int, default=9)
    parser.add_argument("--first-omega", type=float, default=30.0)
    parser.add_argument("--softplus-beta", type=float, default=100.0)
    parser.add_argument("--encoding-frequencies", type=int, default=0,
                        help="> 0 switches to positional encoding with "
                             "SoftPlus activations (exported as UDFW v2)")
    parser.add_argument("--device", default="cpu",
                        help='training device, e.g. "cpu" or "cuda"')
    parser.add_argument("--report", help="write a training report JSON here")
    parser.add_argument("--quiet", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = TrainConfig(
            mesh_path=args.mesh,
            out_path=args.out,
            iterations=args.iterations,
            batch_size=args.batch_size,
            lr=args.lr,
            lr_decay=args.lr_decay,
            milestones=tuple(args.milestones),
            bands=BandConfig(surface=args.band_surface, near=args.band_near,
                             mid=args.band_mid, uniform=args.band_uniform),
            seed=args.seed,
            hidden_dim=args.hidden_dim,
            n_layers=args.n_layers,
            first_omega=args.first_omega,
            softplus_beta=args.softplus_beta,
            encoding_frequencies=args.encoding_frequencies,
            device=args.device,
        )
        log = (lambda msg: None) if args.quiet else (
            lambda msg: print(msg, file=sys.stderr))
        report = train(config, log=log)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.report:
        payload = {
            "final_loss": report.final_loss,
            "loss_history": report.loss_history,
            "n_samples": report.n_samples,
            "elapsed_s": report.elapsed_s,
            "out_path": report.out_path,
        }
        with open(args.report, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
