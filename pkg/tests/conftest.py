"""Shared fixtures: small extractions reused across test modules.

Extraction at moderate depth is the expensive part of the suite, so the
common shapes are extracted once per session and shared read-only.
"""

from __future__ import annotations

import numpy as np
import pytest

from udfmesh import (
    BoxField,
    ExtractConfig,
    MesherConfig,
    OctreeConfig,
    SphereField,
    VertexerConfig,
    extract,
)


def make_config(max_depth: int, **kwargs) -> ExtractConfig:
    """ExtractConfig with defaults, overriding only depth and named fields."""
    octree = OctreeConfig(max_depth=max_depth, epsilon=kwargs.pop("epsilon", 2e-3))
    vertexer = VertexerConfig(
        **{k: kwargs.pop(k) for k in list(kwargs)
           if k in VertexerConfig.__dataclass_fields__}
    )
    mesher = MesherConfig(
        **{k: kwargs.pop(k) for k in list(kwargs)
           if k in MesherConfig.__dataclass_fields__}
    )
    threads = kwargs.pop("threads", 1)
    if kwargs:
        raise TypeError(f"unknown config overrides: {sorted(kwargs)}")
    return ExtractConfig(octree=octree, vertexer=vertexer, mesher=mesher, threads=threads)


@pytest.fixture(scope="session")
def box_field():
    return BoxField(half_extents=(0.5, 0.5, 0.5))


@pytest.fixture(scope="session")
def sphere_field():
    return SphereField(radius=0.5)


@pytest.fixture(scope="session")
def box_extraction_d5(box_field):
    """Box extracted at depth 5 (32^3): cheap, closed, exactly axis-aligned."""
    return extract(box_field, make_config(5))


@pytest.fixture(scope="session")
def sphere_extraction_d6(sphere_field):
    """Sphere extracted at depth 6 (64^3): cheap, closed, curved."""
    return extract(sphere_field, make_config(6))


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
