"""Distance-field backends and the field-spec parser.

Field specs are compact URIs used by the CLI and tests:

    analytic:sphere:0.5           sphere of radius 0.5
    analytic:box:0.5              cube with half extent 0.5
    analytic:box:0.4,0.3,0.2      box with per-axis half extents
    analytic:plane[:z0]           horizontal plane z = z0
    analytic:disk:1.0[:z0]        unit disk at height z0 (open surface)
    analytic:torus:0.6,0.25       torus, major and minor radii
    analytic:twoplanes:0.004      parallel planes z = +-0.002
    mesh:path/to/shape.obj        exact distance to a triangle mesh
    mlp:path/to/weights.udfw      network loaded from a UDFW file
    noisy:SEED:INNER-SPEC         corruption wrapper around any spec

Unknown schemes are rejected at parse time, before any field work runs.
"""

from __future__ import annotations

from .analytic import (BoxField, DiskField, PlaneField, SphereField,
                       TorusField, TwoPlanesField)
from .base import (DOMAIN_HI, DOMAIN_LO, GRAD_EPS, Array, FieldResponse,
                   ScalarField, eval_batch)
from .meshfield import MeshDistance, MeshField, brute_force_distance
from .mlp import (ACT_SINE, ACT_SOFTPLUS, MlpField, MlpLayer, MlpWeights,
                  PositionalEncoding, UdfwFormatError, load_weights,
                  save_weights)
from .noisy import NoisyFieldWrapper

__all__ = [
    "Array", "FieldResponse", "ScalarField", "eval_batch",
    "DOMAIN_LO", "DOMAIN_HI", "GRAD_EPS",
    "SphereField", "PlaneField", "BoxField", "DiskField", "TorusField",
    "TwoPlanesField", "MeshField", "MeshDistance", "brute_force_distance",
    "MlpField", "MlpLayer", "MlpWeights", "PositionalEncoding",
    "load_weights", "save_weights", "UdfwFormatError", "ACT_SINE",
    "ACT_SOFTPLUS", "NoisyFieldWrapper", "parse_field_spec",
]


def _floats(token: str) -> list[float]:
    return [float(t) for t in token.split(",")]


def parse_field_spec(spec: str) -> ScalarField:
    """Construct a field from a spec URI; raises ValueError on bad specs."""
    scheme, _, rest = spec.partition(":")
    if scheme == "analytic":
        kind, _, args = rest.partition(":")
        parts = [p for p in args.split(":") if p] if args else []
        if kind == "sphere":
            if not parts:
                raise ValueError(f"{spec!r}: sphere needs a radius")
            center = _floats(parts[1]) if len(parts) > 1 else (0.0, 0.0, 0.0)
            return SphereField(float(parts[0]), center)
        if kind == "box":
            if not parts:
                raise ValueError(f"{spec!r}: box needs half extents")
            h = _floats(parts[0])
            return BoxField(h[0] if len(h) == 1 else h)
        if kind == "plane":
            return PlaneField(offset=float(parts[0]) if parts else 0.0)
        if kind == "disk":
            if not parts:
                raise ValueError(f"{spec!r}: disk needs a radius")
            return DiskField(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
        if kind == "torus":
            if not parts:
                raise ValueError(f"{spec!r}: torus needs major,minor radii")
            r = _floats(parts[0])
            if len(r) != 2:
                raise ValueError(f"{spec!r}: torus needs major,minor radii")
            return TorusField(r[0], r[1])
        if kind == "twoplanes":
            if not parts:
                raise ValueError(f"{spec!r}: twoplanes needs a gap")
            return TwoPlanesField(float(parts[0]))
        raise ValueError(f"unknown analytic shape {kind!r} in {spec!r}")
    if scheme == "mesh":
        if not rest:
            raise ValueError(f"{spec!r}: mesh needs a path")
        return MeshField.from_file(rest)
    if scheme == "mlp":
        if not rest:
            raise ValueError(f"{spec!r}: mlp needs a path")
        return MlpField.from_file(rest)
    if scheme == "noisy":
        seed_tok, _, inner = rest.partition(":")
        if not seed_tok or not inner:
            raise ValueError(f"{spec!r}: noisy needs 'noisy:SEED:INNER-SPEC'")
        return NoisyFieldWrapper(parse_field_spec(inner), rng_seed=int(seed_tok))
    raise ValueError(f"unknown field-spec scheme {scheme!r} in {spec!r}")
