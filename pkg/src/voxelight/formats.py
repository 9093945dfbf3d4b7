"""File formats: the attribute-cloud PLY dialect and the scene JSON file.

Cloud files are PLY with integer voxel indices plus the seven attributes as
float32 (or uchar when quantized), and two reserved comments carrying grid
dims and voxel size:

    ply
    format ascii 1.0 | format binary_little_endian 1.0
    comment voxelight dims DX DY DZ
    comment voxelight voxel_size S
    element vertex N
    property int32 x ... property float32 d
    end_header

Serialization is canonical: cells in (z, y, x) lexicographic order.
"""

from __future__ import annotations

import json
import struct
from typing import Tuple

import numpy as np
import pydantic

from voxelight.errors import (
    DuplicateVoxel,
    MalformedHeader,
    OutOfBoundsVoxel,
    OutOfRangeAttribute,
    SchemaError,
    TruncatedBody,
    UnknownProperty,
)
from voxelight.model import FIELD_NAMES, VoxelAttributes, VoxelGrid
from voxelight.scene import SceneConfig

_COORD_NAMES = ("x", "y", "z")
_INT_TYPES = {"int32", "int"}
_FLOAT_TYPES = {"float32", "float"}
_UCHAR_TYPES = {"uchar", "uint8"}


def _parse_header(data: bytes):
    end = data.find(b"end_header\n")
    if end < 0:
        raise MalformedHeader(0, "missing end_header")
    header_bytes = data[: end + len(b"end_header\n")]
    body = data[len(header_bytes):]
    lines = header_bytes.decode("ascii", errors="replace").splitlines()

    if not lines or lines[0].strip() != "ply":
        raise MalformedHeader(1, "file does not start with 'ply'")

    encoding = None
    dims = None
    voxel_size = None
    count = None
    quantization = None
    props_seen = []

    for no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        parts = line.split()
        if not parts:
            raise MalformedHeader(no, "empty header line")
        tag = parts[0]
        if tag == "format":
            if len(parts) != 3 or parts[2] != "1.0" or parts[1] not in (
                "ascii",
                "binary_little_endian",
            ):
                raise MalformedHeader(no, f"unsupported format line: {line!r}")
            encoding = parts[1]
        elif tag == "comment":
            if len(parts) >= 2 and parts[1] == "voxelight":
                if len(parts) == 6 and parts[2] == "dims":
                    try:
                        dims = tuple(int(p) for p in parts[3:6])
                    except ValueError:
                        raise MalformedHeader(no, f"bad dims comment: {line!r}") from None
                    if any(x <= 0 for x in dims):
                        raise MalformedHeader(no, f"dims must be positive: {line!r}")
                elif len(parts) == 4 and parts[2] == "voxel_size":
                    try:
                        voxel_size = float(parts[3])
                    except ValueError:
                        raise MalformedHeader(no, f"bad voxel_size comment: {line!r}") from None
                    if not voxel_size > 0:
                        raise MalformedHeader(no, f"voxel_size must be positive: {line!r}")
                else:
                    raise MalformedHeader(no, f"unrecognized voxelight comment: {line!r}")
            # foreign comments are ignored
        elif tag == "element":
            if len(parts) != 3 or parts[1] != "vertex":
                raise MalformedHeader(no, f"only 'element vertex N' is supported: {line!r}")
            try:
                count = int(parts[2])
            except ValueError:
                raise MalformedHeader(no, f"bad vertex count: {line!r}") from None
            if count < 0:
                raise MalformedHeader(no, "vertex count must be nonnegative")
        elif tag == "property":
            if len(parts) != 3:
                raise MalformedHeader(no, f"bad property line: {line!r}")
            ptype, pname = parts[1], parts[2]
            idx = len(props_seen)
            expected = (_COORD_NAMES + FIELD_NAMES)[idx] if idx < 10 else None
            if pname != expected:
                if pname in _COORD_NAMES + FIELD_NAMES:
                    raise MalformedHeader(no, f"property {pname!r} out of order")
                raise UnknownProperty(pname)
            if idx < 3:
                if ptype not in _INT_TYPES:
                    raise MalformedHeader(no, f"coordinate {pname!r} must be int32")
            else:
                if ptype in _FLOAT_TYPES:
                    q = "float32"
                elif ptype in _UCHAR_TYPES:
                    q = "uint8"
                else:
                    raise MalformedHeader(no, f"attribute {pname!r} must be float32 or uchar")
                if quantization is None:
                    quantization = q
                elif quantization != q:
                    raise MalformedHeader(no, "mixed attribute quantization")
            props_seen.append(pname)
        elif tag == "end_header":
            break
        else:
            raise MalformedHeader(no, f"unrecognized header line: {line!r}")

    if encoding is None:
        raise MalformedHeader(0, "missing format line")
    if dims is None:
        raise MalformedHeader(0, "missing 'comment voxelight dims' line")
    if voxel_size is None:
        raise MalformedHeader(0, "missing 'comment voxelight voxel_size' line")
    if count is None:
        raise MalformedHeader(0, "missing 'element vertex' line")
    if len(props_seen) != 10:
        raise MalformedHeader(0, f"expected 10 properties, found {len(props_seen)}")
    if quantization is None:
        quantization = "float32"
    return encoding, dims, voxel_size, count, quantization, body


def parse_cloud(data: bytes) -> VoxelGrid:
    """Parse a cloud file into a sparse grid; air rows collapse to absence."""
    encoding, dims, voxel_size, count, quantization, body = _parse_header(data)
    grid = VoxelGrid(dims, voxel_size)

    if encoding == "ascii":
        rows = body.decode("ascii", errors="replace").split()
        expected = count * 10
        if len(rows) < expected:
            raise TruncatedBody(expected, len(rows))
        records = []
        for i in range(count):
            chunk = rows[i * 10 : (i + 1) * 10]
            try:
                coord = tuple(int(v) for v in chunk[:3])
                vals = [float(v) for v in chunk[3:]]
            except ValueError:
                raise TruncatedBody(expected, i * 10) from None
            records.append((coord, vals))
    else:
        attr_fmt = "<iii" + ("fffffff" if quantization == "float32" else "BBBBBBB")
        rec_size = struct.calcsize(attr_fmt)
        expected = count * rec_size
        if len(body) < expected:
            raise TruncatedBody(expected, len(body))
        records = []
        for i in range(count):
            vals = struct.unpack_from(attr_fmt, body, i * rec_size)
            records.append((vals[:3], list(vals[3:])))

    seen = set()
    for i, (coord, vals) in enumerate(records):
        if quantization == "uint8":
            vals = [v / 255.0 for v in vals]
        for name, v in zip(FIELD_NAMES, vals):
            if not (0.0 <= v <= 1.0):
                raise OutOfRangeAttribute(i, name, v)
        if not grid.in_bounds(coord):
            raise OutOfBoundsVoxel(coord, dims)
        if coord in seen:
            raise DuplicateVoxel(coord)
        seen.add(coord)
        grid.set(coord, VoxelAttributes(*vals))
    return grid


def serialize_cloud(
    grid: VoxelGrid,
    encoding: str = "binary_little_endian",
    quantization: str = "float32",
) -> bytes:
    """Canonical cloud bytes: cells emitted in (z, y, x) lexicographic order."""
    if encoding not in ("ascii", "binary_little_endian"):
        raise ValueError(f"unknown encoding {encoding!r}")
    if quantization not in ("float32", "uint8"):
        raise ValueError(f"unknown quantization {quantization!r}")

    cells = sorted(grid.occupied(), key=lambda kv: (kv[0][2], kv[0][1], kv[0][0]))
    attr_type = "float32" if quantization == "float32" else "uchar"
    header = [
        "ply",
        f"format {encoding} 1.0",
        "comment voxelight dims {} {} {}".format(*grid.dims),
        f"comment voxelight voxel_size {grid.voxel_size!r}",
        f"element vertex {len(cells)}",
        "property int32 x",
        "property int32 y",
        "property int32 z",
    ]
    header += [f"property {attr_type} {n}" for n in FIELD_NAMES]
    header.append("end_header")
    out = ("\n".join(header) + "\n").encode("ascii")

    if encoding == "ascii":
        lines = []
        for (x, y, z), a in cells:
            vals = a.as_array()
            if quantization == "uint8":
                q = np.rint(vals * 255.0).astype(int)
                lines.append(f"{x} {y} {z} " + " ".join(str(v) for v in q))
            else:
                f32 = vals.astype(np.float32)
                lines.append(f"{x} {y} {z} " + " ".join(repr(float(v)) for v in f32))
        if lines:
            out += ("\n".join(lines) + "\n").encode("ascii")
    else:
        fmt = "<iii" + ("fffffff" if quantization == "float32" else "BBBBBBB")
        parts = []
        for (x, y, z), a in cells:
            vals = a.as_array()
            if quantization == "uint8":
                payload = [int(v) for v in np.rint(vals * 255.0)]
            else:
                payload = [float(np.float32(v)) for v in vals]
            parts.append(struct.pack(fmt, x, y, z, *payload))
        out += b"".join(parts)
    return out


def parse_scene(data: bytes) -> SceneConfig:
    """Parse the scene JSON; unknown keys are rejected."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SchemaError("", f"invalid JSON: {e}") from None
    try:
        return SceneConfig.model_validate(doc)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        path = ".".join(str(p) for p in first["loc"])
        raise SchemaError(path, first["msg"]) from None


def serialize_scene(cfg: SceneConfig) -> bytes:
    """Canonical scene bytes; stable under parse/serialize round trips."""
    doc = cfg.model_dump(exclude_none=True)
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def write_ppm(pixels: np.ndarray) -> bytes:
    """Binary PPM (P6, maxval 255) from an (H, W, 3) uint8 array."""
    if pixels.dtype != np.uint8 or pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ValueError("expected (H, W, 3) uint8 pixel array")
    h, w = pixels.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + pixels.tobytes()


def parse_ppm(data: bytes) -> np.ndarray:
    """Inverse of write_ppm, for tests and the info tooling."""
    if not data.startswith(b"P6"):
        raise ValueError("not a binary PPM file")
    parts = data.split(b"\n", 3)
    w, h = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    return np.frombuffer(parts[3][: w * h * 3], dtype=np.uint8).reshape(h, w, 3)


def cloud_info(grid: VoxelGrid) -> dict:
    """Summary statistics used by validate/info surfaces."""
    from voxelight.model import PRESETS

    stats = {}
    if grid.occupied_count:
        arr = np.array([a.as_array() for _, a in grid.occupied()])
        for i, name in enumerate(FIELD_NAMES):
            col = arr[:, i]
            stats[name] = {
                "min": float(col.min()),
                "max": float(col.max()),
                "mean": float(col.mean()),
            }
    else:
        stats = {name: {"min": 0.0, "max": 0.0, "mean": 0.0} for name in FIELD_NAMES}

    preset_counts: dict = {}
    for _, a in grid.occupied():
        for pname, preset in PRESETS.items():
            if np.allclose(a.as_array(), preset.attrs.as_array(), atol=1e-6):
                preset_counts[pname] = preset_counts.get(pname, 0) + 1
                break
    return {
        "dims": list(grid.dims),
        "voxel_size": grid.voxel_size,
        "occupied": grid.occupied_count,
        "attributes": stats,
        "preset_matches": preset_counts,
    }
