"""Command line interface: extract / eval / probe.

Exit codes: 0 success, 1 failure in any stage (bad field spec, missing
or malformed files, metric errors); argparse reports argv syntax errors
with its native exit code 2. Outputs are written to a temporary file
and renamed into place so an interrupted run never leaves a partial
mesh at the target path. An extraction that legitimately finds no
surface still exits 0 and prints a warning.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .fields import parse_field_spec
from .fields.base import eval_batch
from .fields.mlp import UdfwFormatError
from .mesher import MesherConfig
from .meshio import MeshFormatError, load_mesh, save_mesh
from .metrics import MetricConfig, evaluate
from .octree import OctreeConfig, dump_cells
from .pipeline import ExtractConfig, extract
from .vertexer import VertexerConfig

EXIT_OK = 0
EXIT_FAILURE = 1

_STAGE_ERRORS = (ValueError, OSError, UdfwFormatError, MeshFormatError)


def _atomic_save(path: str, writer) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _write_text(path: str, payload: str) -> None:
    with open(path, "w") as f:
        f.write(payload)


def _fail(exc: BaseException) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return EXIT_FAILURE


def _cmd_extract(args: argparse.Namespace) -> int:
    try:
        field = parse_field_spec(args.field)
    except _STAGE_ERRORS as exc:
        return _fail(exc)

    try:
        config = ExtractConfig(
            octree=OctreeConfig(max_depth=args.max_depth, epsilon=args.epsilon),
            vertexer=VertexerConfig(
                delta1=args.delta1,
                delta2=args.delta2,
                fallback_delta1=args.fallback_delta1,
                sigma_ratio=args.sigma_ratio,
                dense_sampling=args.dense_sampling,
                filter_enabled=not args.no_filter,
            ),
            mesher=MesherConfig(
                normal_tol_deg=args.normal_tol,
                repair=args.manifold,
                hole_fill_max_edges=args.hole_fill_max,
            ),
            threads=args.threads,
        )
        result = extract(field, config)
    except _STAGE_ERRORS as exc:
        return _fail(exc)

    if not args.quiet:
        t = result.timings
        print(f"leaves={len(result.leaves)} vertices={result.mesh.stats.n_vertices} "
              f"triangles={result.mesh.stats.n_triangles}", file=sys.stderr)
        print(f"timings: octree={t['octree_s']:.3f}s vertexer={t['vertexer_s']:.3f}s "
              f"mesher={t['mesher_s']:.3f}s total={t['total_s']:.3f}s", file=sys.stderr)

    report = dict(result.report)
    report["seed"] = args.seed
    fmt = "ply" if str(args.out).endswith(".ply") else "obj"
    try:
        _atomic_save(args.out, lambda p: save_mesh(
            p, result.mesh.vertices, result.mesh.triangles, fmt=fmt))
        if args.report:
            payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
            _atomic_save(args.report, lambda p: _write_text(p, payload))
        if args.cells:
            _atomic_save(args.cells, lambda p: dump_cells(result.leaves, p))
    except OSError as exc:
        return _fail(exc)

    if result.mesh.stats.n_vertices == 0:
        print("warning: extraction produced an empty mesh", file=sys.stderr)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        cand_v, cand_f = load_mesh(args.candidate)
        ref_v, ref_f = load_mesh(args.reference)
        config = MetricConfig(n_samples=args.samples, f_threshold=args.threshold,
                              seed=args.seed)
        report = evaluate(cand_v, cand_f, ref_v, ref_f, config)
    except _STAGE_ERRORS as exc:
        return _fail(exc)
    payload = report.as_dict()
    print(f"chamfer       {payload['chamfer']:.10g}")
    print(f"f_score       {payload['f_score']:.6f} %")
    print(f"hausdorff     {payload['hausdorff']:.10g}")
    print(f"precision     {payload['precision']:.6f} %")
    print(f"recall        {payload['recall']:.6f} %")
    print(f"sample_count  {payload['sample_count']}")
    print(f"threshold     {payload['threshold']:.10g}")
    print(f"seed          {payload['seed']}")
    if args.json:
        try:
            _atomic_save(args.json, lambda p: _write_text(
                p, json.dumps(payload, indent=2, sort_keys=True) + "\n"))
        except OSError as exc:
            return _fail(exc)
    return EXIT_OK


def _parse_points(tokens: list[str], file_arg: str | None) -> np.ndarray:
    pts: list[list[float]] = []
    for token in tokens:
        if "," in token:
            parts = token.split(",")
            if len(parts) != 3:
                raise ValueError(f"point {token!r} is not of the form x,y,z")
            pts.append([float(v) for v in parts])
        else:
            file_arg = token
    if file_arg:
        data = np.loadtxt(file_arg, ndmin=2, dtype=np.float64,
                          delimiter="," if file_arg.endswith(".csv") else None)
        if data.shape[1] != 3:
            raise ValueError(f"{file_arg}: expected three columns, got {data.shape[1]}")
        pts.extend(data.tolist())
    if not pts:
        raise ValueError("no probe points given (x,y,z tokens or a points file)")
    return np.asarray(pts, dtype=np.float64)


def _cmd_probe(args: argparse.Namespace) -> int:
    try:
        field = parse_field_spec(args.field)
        points = _parse_points(args.points, args.file)
    except _STAGE_ERRORS as exc:
        return _fail(exc)
    resp = eval_batch(field, points, need_grad=True)
    for i in range(len(points)):
        x, y, z = (float(v) for v in points[i])
        gx, gy, gz = (float(v) for v in resp.gradients[i])
        print(f"{x:.17g},{y:.17g},{z:.17g},{float(resp.distances[i]):.17g},"
              f"{gx:.17g},{gy:.17g},{gz:.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udfmesh",
        description="Extract triangle meshes from unsigned distance fields.")
    parser.add_argument("--version", action="version", version=f"udfmesh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ext = sub.add_parser("extract", help="extract a mesh from a field")
    ext.add_argument("--field", required=True,
                     help="field spec, e.g. analytic:sphere:0.5, mesh:shape.obj, "
                          "mlp:weights.udfw, noisy:SEED:analytic:plane")
    ext.add_argument("--out", "--output", "-o", required=True,
                     help="output mesh (.obj or .ply)")
    ext.add_argument("--max-depth", "--depth", type=int, default=7,
                     help="octree depth; grid resolution is 2**depth (default 7)")
    ext.add_argument("--epsilon", type=float, default=2e-3,
                     help="pruning safety margin (default 2e-3)")
    ext.add_argument("--delta1", type=float, default=2e-3,
                     help="minimum sample distance from the surface (default 2e-3)")
    ext.add_argument("--delta2", type=float, default=2e-3,
                     help="maximum residual at the projected sample (default 2e-3)")
    ext.add_argument("--fallback-delta1", type=float, default=1e-3,
                     help="relaxed delta1 retry for sparse cells (default 1e-3)")
    ext.add_argument("--sigma-ratio", type=float, default=0.1,
                     help="singular value ratio for cell classification (default 0.1)")
    ext.add_argument("--dense-sampling", action="store_true",
                     help="sample 5x5x5 lattice per cell instead of 3x3x3")
    ext.add_argument("--no-filter", action="store_true",
                     help="disable sample filtering (keep all usable-gradient samples)")
    ext.add_argument("--manifold", action=argparse.BooleanOptionalAction, default=True,
                     help="run the manifold repair pass (default on)")
    ext.add_argument("--hole-fill-max", type=int, default=12,
                     help="close boundary loops up to this many edges; 0 disables "
                          "(default 12)")
    ext.add_argument("--normal-tol", type=float, default=25.0,
                     help="triangle/vertex normal agreement tolerance in degrees")
    ext.add_argument("--threads", type=int, default=max(1, os.cpu_count() or 1),
                     help="worker threads for compiled kernels (output-invariant; "
                          "default: hardware cores)")
    ext.add_argument("--seed", type=int, default=0,
                     help="recorded in the report; extraction itself is deterministic")
    ext.add_argument("--report", help="write extraction statistics JSON here")
    ext.add_argument("--cells", help="write surviving octree leaves as JSONL here")
    ext.add_argument("--quiet", action="store_true", help="suppress progress output")
    ext.set_defaults(func=_cmd_extract)

    ev = sub.add_parser("eval", help="compare a mesh against a reference")
    ev.add_argument("candidate", help="candidate mesh (.obj/.ply)")
    ev.add_argument("reference", help="reference mesh (.obj/.ply)")
    ev.add_argument("--samples", type=int, default=100_000)
    ev.add_argument("--threshold", type=float, default=1e-3,
                    help="F-score distance threshold (default 1e-3)")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--json", help="write the metric report as JSON here")
    ev.set_defaults(func=_cmd_eval)

    pr = sub.add_parser("probe", help="evaluate a field at points; prints "
                                      "x,y,z,d,gx,gy,gz CSV rows")
    pr.add_argument("--field", required=True)
    pr.add_argument("points", nargs="*",
                    help="points as x,y,z tokens and/or a path to a points file")
    pr.add_argument("--file", help="text/csv file with one x y z row per point")
    pr.set_defaults(func=_cmd_probe)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
