"""Triangle mesh file I/O: OBJ and binary little-endian PLY.

Readers fan-triangulate polygons and return (vertices, faces) as
float64/int64 arrays. Writers are deterministic: identical inputs
produce byte-identical files, and both formats round-trip coordinates
exactly (OBJ uses 17 significant digits, PLY stores doubles).
"""

from __future__ import annotations

import struct

import numpy as np

Array = np.ndarray

_PLY_SIZES = {
    "char": 1, "int8": 1, "uchar": 1, "uint8": 1,
    "short": 2, "int16": 2, "ushort": 2, "uint16": 2,
    "int": 4, "int32": 4, "uint": 4, "uint32": 4, "float": 4, "float32": 4,
    "double": 8, "float64": 8,
}
_PLY_DTYPES = {
    "char": "<i1", "int8": "<i1", "uchar": "<u1", "uint8": "<u1",
    "short": "<i2", "int16": "<i2", "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4", "uint": "<u4", "uint32": "<u4",
    "float": "<f4", "float32": "<f4", "double": "<f8", "float64": "<f8",
}


class MeshFormatError(ValueError):
    pass


def _fan(poly: list[int]) -> list[tuple[int, int, int]]:
    return [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]


def read_obj(path) -> tuple[Array, Array]:
    verts: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    with open(path, "r") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise MeshFormatError(f"{path}:{lineno}: malformed vertex line")
                verts.append((float(parts[1]), float(parts[2]), float(parts[3])))
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    raw = tok.split("/")[0]
                    i = int(raw)
                    # OBJ indices are 1-based; negatives count from the end
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                if len(idx) < 3:
                    raise MeshFormatError(f"{path}:{lineno}: face with fewer than 3 vertices")
                faces.extend(_fan(idx))
    if not verts:
        raise MeshFormatError(f"{path}: no vertices")
    v = np.asarray(verts, dtype=np.float64)
    fc = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if fc.size and (fc.min() < 0 or fc.max() >= len(v)):
        raise MeshFormatError(f"{path}: face index out of range")
    return v, fc


def write_obj(path, vertices: Array, faces: Array) -> None:
    with open(path, "w") as f:
        for x, y, z in np.asarray(vertices, dtype=np.float64):
            f.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in np.asarray(faces, dtype=np.int64):
            f.write(f"f {a + 1} {b + 1} {c + 1}\n")


def read_ply(path) -> tuple[Array, Array]:
    with open(path, "rb") as f:
        if f.readline().strip() != b"ply":
            raise MeshFormatError(f"{path}: not a PLY file")
        fmt = None
        elements: list[tuple[str, int, list]] = []  # (name, count, properties)
        while True:
            line = f.readline()
            if not line:
                raise MeshFormatError(f"{path}: unexpected EOF in header")
            tokens = line.decode("ascii", "replace").split()
            if not tokens or tokens[0] == "comment":
                continue
            if tokens[0] == "format":
                fmt = tokens[1]
            elif tokens[0] == "element":
                elements.append((tokens[1], int(tokens[2]), []))
            elif tokens[0] == "property":
                if not elements:
                    raise MeshFormatError(f"{path}: property before element")
                if tokens[1] == "list":
                    elements[-1][2].append(("list", tokens[2], tokens[3], tokens[4]))
                else:
                    elements[-1][2].append(("scalar", tokens[1], tokens[2]))
            elif tokens[0] == "end_header":
                break
        if fmt != "binary_little_endian":
            raise MeshFormatError(f"{path}: unsupported PLY format {fmt!r}")
        body = f.read()

    verts = faces = None
    off = 0
    for name, count, props in elements:
        if name == "vertex":
            if any(p[0] == "list" for p in props):
                raise MeshFormatError(f"{path}: list property on vertex element")
            stride = sum(_PLY_SIZES[p[1]] for p in props)
            names = [p[2] for p in props]
            if not {"x", "y", "z"} <= set(names):
                raise MeshFormatError(f"{path}: vertex element lacks x/y/z")
            block = body[off:off + stride * count]
            if len(block) != stride * count:
                raise MeshFormatError(f"{path}: truncated vertex data")
            rows = np.frombuffer(block, dtype=np.uint8).reshape(count, stride)
            verts = np.empty((count, 3))
            col_off = 0
            for p in props:
                size = _PLY_SIZES[p[1]]
                if p[2] in ("x", "y", "z"):
                    col = rows[:, col_off:col_off + size].copy().view(_PLY_DTYPES[p[1]])[:, 0]
                    verts[:, "xyz".index(p[2])] = col.astype(np.float64)
                col_off += size
            off += stride * count
        elif name == "face":
            if len(props) != 1 or props[0][0] != "list":
                raise MeshFormatError(f"{path}: unsupported face properties")
            _, count_t, index_t, _ = props[0]
            csize, isize = _PLY_SIZES[count_t], _PLY_SIZES[index_t]
            cdt, idt = _PLY_DTYPES[count_t], _PLY_DTYPES[index_t]
            tri = []
            for _ in range(count):
                k = int(np.frombuffer(body, dtype=cdt, count=1, offset=off)[0])
                off += csize
                poly = np.frombuffer(body, dtype=idt, count=k, offset=off).astype(np.int64)
                off += isize * k
                if k < 3:
                    raise MeshFormatError(f"{path}: face with fewer than 3 vertices")
                tri.extend(_fan(list(poly)))
            faces = np.asarray(tri, dtype=np.int64).reshape(-1, 3)
        else:
            raise MeshFormatError(f"{path}: cannot skip unknown element {name!r}")
    if verts is None:
        raise MeshFormatError(f"{path}: no vertex element")
    if faces is None:
        faces = np.zeros((0, 3), dtype=np.int64)
    if faces.size and (faces.min() < 0 or faces.max() >= len(verts)):
        raise MeshFormatError(f"{path}: face index out of range")
    return verts, faces


def write_ply(path, vertices: Array, faces: Array) -> None:
    """Binary little-endian PLY with double-precision coordinates."""
    vertices = np.ascontiguousarray(vertices, dtype="<f8")
    faces = np.ascontiguousarray(faces, dtype="<i4")
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        f"element vertex {len(vertices)}\n"
        "property double x\nproperty double y\nproperty double z\n"
        f"element face {len(faces)}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    )
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(vertices.tobytes())
        if len(faces):
            rec = np.empty(len(faces), dtype=[("n", "u1"), ("idx", "<i4", (3,))])
            rec["n"] = 3
            rec["idx"] = faces
            f.write(rec.tobytes())


def load_mesh(path) -> tuple[Array, Array]:
    p = str(path)
    if p.endswith(".obj"):
        return read_obj(path)
    if p.endswith(".ply"):
        return read_ply(path)
    raise MeshFormatError(f"{path}: unknown mesh extension (expected .obj or .ply)")


def save_mesh(path, vertices: Array, faces: Array, fmt: str | None = None) -> None:
    """Write by extension, or force ``fmt`` ("obj"/"ply") regardless of path."""
    p = str(path)
    kind = fmt or ("obj" if p.endswith(".obj") else "ply" if p.endswith(".ply") else None)
    if kind == "obj":
        write_obj(path, vertices, faces)
    elif kind == "ply":
        write_ply(path, vertices, faces)
    else:
        raise MeshFormatError(f"{path}: unknown mesh extension (expected .obj or .ply)")


def triangle_areas(vertices: Array, faces: Array) -> Array:
    a = vertices[faces[:, 0]]
    cross = np.cross(vertices[faces[:, 1]] - a, vertices[faces[:, 2]] - a)
    return 0.5 * np.linalg.norm(cross, axis=1)
