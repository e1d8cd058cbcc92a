"""End-to-end extraction: octree -> per-cell vertices -> mesh assembly."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import octree
from .fields.base import ScalarField
from .mesher import MesherConfig, MeshResult, assemble_mesh
from .octree import LeafSet, OctreeConfig
from .vertexer import VertexerConfig, VertexTable, solve_all


@dataclass(frozen=True)
class ExtractConfig:
    octree: OctreeConfig = field(default_factory=OctreeConfig)
    vertexer: VertexerConfig = field(default_factory=VertexerConfig)
    mesher: MesherConfig = field(default_factory=MesherConfig)
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass
class ExtractResult:
    mesh: MeshResult
    table: VertexTable
    leaves: LeafSet
    report: dict
    timings: dict   # wall-clock seconds; intentionally kept out of report


def _apply_thread_count(threads: int) -> None:
    """Thread count only sizes the worker pool of compiled kernels; all
    per-point work is independent, so results do not depend on it."""
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(threads, limit)))


def extract(field_obj: ScalarField, config: ExtractConfig | None = None) -> ExtractResult:
    config = config or ExtractConfig()
    _apply_thread_count(config.threads)
    timings = {}
    t0 = time.perf_counter()
    leaves = octree.build(field_obj, config.octree)
    timings["octree_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    table = solve_all(field_obj, leaves, config.vertexer)
    timings["vertexer_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    mesh = assemble_mesh(table, config.mesher)
    timings["mesher_s"] = time.perf_counter() - t0
    timings["total_s"] = sum(timings.values())

    vstats = table.stats
    report = {
        "schema_version": 1,
        "config": {
            "max_depth": config.octree.max_depth,
            "resolution": config.octree.resolution,
            "cell_size": config.octree.cell_size,
            "epsilon": config.octree.epsilon,
            "delta1": config.vertexer.delta1,
            "delta2": config.vertexer.delta2,
            "fallback_delta1": config.vertexer.fallback_delta1,
            "sigma_ratio": config.vertexer.sigma_ratio,
            "samples_per_axis": config.vertexer.samples_per_axis,
            "filter_enabled": config.vertexer.filter_enabled,
            "normal_tol_deg": config.mesher.normal_tol_deg,
            "repair": config.mesher.repair,
            "hole_fill_max_edges": config.mesher.hole_fill_max_edges,
        },
        "octree": {
            "leaves": len(leaves),
            "field_evals": leaves.field_evals,
        },
        "vertexer": asdict(vstats),
        "mesh": asdict(mesh.stats),
        "field_queries_total": leaves.field_evals + vstats.field_queries,
    }
    return ExtractResult(mesh=mesh, table=table, leaves=leaves,
                         report=report, timings=timings)
