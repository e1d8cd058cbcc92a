"""Triangle mesh extraction from unsigned distance fields.

The pipeline prunes an octree down to cells near the zero level set,
solves one vertex per cell from filtered surface samples, and stitches
vertices of adjacent cells into a watertight-where-possible triangle
mesh. Fields may be analytic primitives, distances to a reference
mesh, or small fully-connected networks loaded from the UDFW format.
"""

__version__ = "0.1.0"

from .fields import (
    BoxField,
    DiskField,
    MeshField,
    MlpField,
    NoisyFieldWrapper,
    PlaneField,
    ScalarField,
    SphereField,
    TorusField,
    TwoPlanesField,
    parse_field_spec,
)
from .mesher import MesherConfig, MeshResult, assemble_mesh
from .metrics import MetricConfig, MetricReport, evaluate, sample_surface
from .octree import LeafSet, OctreeCell, OctreeConfig, build, is_provably_empty
from .pipeline import ExtractConfig, ExtractResult, extract
from .vertexer import DualVertex, VertexClass, VertexerConfig, VertexTable, solve_all

__all__ = [
    "BoxField", "DiskField", "MeshField", "MlpField", "NoisyFieldWrapper",
    "PlaneField", "ScalarField", "SphereField", "TorusField", "TwoPlanesField",
    "parse_field_spec",
    "MesherConfig", "MeshResult", "assemble_mesh",
    "MetricConfig", "MetricReport", "evaluate", "sample_surface",
    "LeafSet", "OctreeCell", "OctreeConfig", "build", "is_provably_empty",
    "ExtractConfig", "ExtractResult", "extract",
    "DualVertex", "VertexClass", "VertexerConfig", "VertexTable", "solve_all",
    "__version__",
]
