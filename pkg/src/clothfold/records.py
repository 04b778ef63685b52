"""Canonical JSON layout for sequences and annotations, plus the heatmap file pair.

Sequence files are written with lossless float repr. Annotation files use a
fixed 6-significant-digit float format and sorted keys so identical records
always produce identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from clothfold.errors import FormatError, ParseError, ValidationError
from clothfold.geometry import Mesh, NocsMesh

GARMENT_CATEGORIES = ("Skirt", "Top", "Trousers", "Tshirt")
HEATMAP_DTYPE = "f32le"


@dataclass(frozen=True, eq=False)
class FrameRecord:
    t: int
    cloth_vertices: np.ndarray
    left_grip_vertex_ids: tuple = ()
    right_grip_vertex_ids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cloth_vertices", np.asarray(self.cloth_vertices, dtype=np.float64))
        object.__setattr__(self, "left_grip_vertex_ids", tuple(int(i) for i in self.left_grip_vertex_ids))
        object.__setattr__(self, "right_grip_vertex_ids", tuple(int(i) for i in self.right_grip_vertex_ids))

    def grip_ids(self, hand: str) -> tuple:
        return self.left_grip_vertex_ids if hand == "left" else self.right_grip_vertex_ids

    def __eq__(self, other):
        if not isinstance(other, FrameRecord):
            return NotImplemented
        return (
            self.t == other.t
            and np.array_equal(self.cloth_vertices, other.cloth_vertices)
            and self.left_grip_vertex_ids == other.left_grip_vertex_ids
            and self.right_grip_vertex_ids == other.right_grip_vertex_ids
        )


@dataclass(frozen=True, eq=False)
class SequenceRecord:
    sequence_id: str
    garment_category: str
    faces: np.ndarray
    nocs_vertices: np.ndarray
    frames: tuple

    def __post_init__(self):
        object.__setattr__(self, "faces", np.asarray(self.faces, dtype=np.int64))
        object.__setattr__(self, "nocs_vertices", np.asarray(self.nocs_vertices, dtype=np.float64))
        object.__setattr__(self, "frames", tuple(self.frames))
        validate_sequence(self)

    @property
    def nocs_mesh(self) -> NocsMesh:
        return NocsMesh(self.nocs_vertices, self.faces)

    def frame_mesh(self, index: int) -> Mesh:
        return Mesh(self.frames[index].cloth_vertices, self.faces)

    def __eq__(self, other):
        if not isinstance(other, SequenceRecord):
            return NotImplemented
        return (
            self.sequence_id == other.sequence_id
            and self.garment_category == other.garment_category
            and np.array_equal(self.faces, other.faces)
            and np.array_equal(self.nocs_vertices, other.nocs_vertices)
            and self.frames == other.frames
        )


def validate_sequence(rec: SequenceRecord) -> None:
    if not isinstance(rec.sequence_id, str) or not rec.sequence_id:
        raise ValidationError("sequence_id must be a non-empty string")
    if rec.garment_category not in GARMENT_CATEGORIES:
        raise ValidationError(
            f"garment_category {rec.garment_category!r} not one of {GARMENT_CATEGORIES}"
        )
    nocs = NocsMesh(rec.nocs_vertices, rec.faces)
    n = nocs.num_vertices
    if not rec.frames:
        raise ValidationError("frames must be non-empty")
    prev = None
    for i, fr in enumerate(rec.frames):
        if prev is not None and fr.t <= prev:
            raise ValidationError(f"frames not increasing at frames[{i}].t={fr.t}")
        prev = fr.t
        if fr.cloth_vertices.shape != (n, 3):
            raise ValidationError(
                f"frames[{i}].cloth_vertices has {len(fr.cloth_vertices)} vertices, nocs has {n}"
            )
        for hand in ("left", "right"):
            ids = fr.grip_ids(hand)
            if any(j < 0 or j >= n for j in ids):
                raise ValidationError(f"grip index out of range in frames[{i}].{hand}_grip_vertex_ids")


# -- sequences ---------------------------------------------------------------


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ParseError(f"missing field {where}{key}")
    val = obj[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise ParseError(f"field {where}{key} has wrong type {type(val).__name__}")
    return val


def _array(val, shape_tail: int, dtype, field_name: str) -> np.ndarray:
    try:
        arr = np.asarray(val, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {field_name} is not a numeric array: {exc}") from None
    if arr.size == 0:
        arr = arr.reshape(0, shape_tail)
    if arr.ndim != 2 or arr.shape[1] != shape_tail:
        raise ParseError(f"field {field_name} must be a list of {shape_tail}-element lists")
    return arr


def _grip_list(val, field_name: str) -> tuple:
    if not isinstance(val, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in val):
        raise ParseError(f"field {field_name} must be a list of integers")
    return tuple(val)


def parse_sequence(text: bytes | str) -> SequenceRecord:
    """Parse and validate one sequence document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    seq_id = _require(doc, "sequence_id", str, "")
    garment = _require(doc, "garment_category", str, "")
    faces = _array(_require(doc, "faces", list, ""), 3, np.int64, "faces")
    nocs = _array(_require(doc, "nocs_vertices", list, ""), 3, np.float64, "nocs_vertices")
    frames = []
    for i, fr in enumerate(_require(doc, "frames", list, "")):
        where = f"frames[{i}]."
        if not isinstance(fr, dict):
            raise ParseError(f"{where[:-1]} must be an object")
        frames.append(
            FrameRecord(
                t=_require(fr, "t", int, where),
                cloth_vertices=_array(
                    _require(fr, "cloth_vertices", list, where), 3, np.float64, where + "cloth_vertices"
                ),
                left_grip_vertex_ids=_grip_list(
                    _require(fr, "left_grip_vertex_ids", list, where), where + "left_grip_vertex_ids"
                ),
                right_grip_vertex_ids=_grip_list(
                    _require(fr, "right_grip_vertex_ids", list, where), where + "right_grip_vertex_ids"
                ),
            )
        )
    return SequenceRecord(seq_id, garment, faces, nocs, frames)


def dump_sequence(rec: SequenceRecord) -> bytes:
    """Serialize a sequence losslessly (shortest round-trip float repr)."""
    doc = {
        "sequence_id": rec.sequence_id,
        "garment_category": rec.garment_category,
        "faces": rec.faces.tolist(),
        "nocs_vertices": rec.nocs_vertices.tolist(),
        "frames": [
            {
                "t": fr.t,
                "cloth_vertices": fr.cloth_vertices.tolist(),
                "left_grip_vertex_ids": list(fr.left_grip_vertex_ids),
                "right_grip_vertex_ids": list(fr.right_grip_vertex_ids),
            }
            for fr in rec.frames
        ],
    }
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def read_sequence(path) -> SequenceRecord:
    return parse_sequence(Path(path).read_bytes())


# -- deterministic JSON ------------------------------------------------------


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite float {x}")
    s = f"{x:.6g}"
    if s == "-0":
        s = "0"
    return s


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (bool, int, float, str, np.integer, np.floating))


def _encode(v, indent: int) -> str:
    pad = "  " * indent
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        if all(_is_scalar(x) for x in v):
            return "[" + ", ".join(_encode(x, 0) for x in v) + "]"
        inner = ",\n".join(pad + "  " + _encode(x, indent + 1) for x in v)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = []
        for k in sorted(v):
            if not isinstance(k, str):
                raise ValidationError(f"non-string key {k!r}")
            items.append(pad + "  " + json.dumps(k) + ": " + _encode(v[k], indent + 1))
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise ValidationError(f"cannot serialize {type(v).__name__}")


def dumps_canonical(doc: Any) -> bytes:
    """Pretty, key-sorted JSON with 6-significant-digit floats."""
    return (_encode(doc, 0) + "\n").encode("utf-8")


# -- heatmap file pair -------------------------------------------------------


def _heatmap_paths(path) -> tuple[Path, Path]:
    p = Path(path)
    if p.suffix in (".json", ".f32"):
        p = p.with_suffix("")
    return p.with_name(p.name + ".json"), p.with_name(p.name + ".f32")


def write_heatmap(h, path) -> tuple[Path, Path]:
    """Write ``<path>.json`` (header) and ``<path>.f32`` (row-major little-endian float32)."""
    arr = np.asarray(h)
    if arr.ndim != 2 or arr.shape[0] <= 0 or arr.shape[1] <= 0:
        raise ValidationError(f"heatmap must be a non-empty 2-D grid, got shape {arr.shape}")
    header_path, data_path = _heatmap_paths(path)
    header = {"dtype": HEATMAP_DTYPE, "height": int(arr.shape[0]), "width": int(arr.shape[1])}
    header_path.write_bytes(dumps_canonical(header))
    data_path.write_bytes(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    return header_path, data_path


def read_heatmap(path) -> np.ndarray:
    header_path, data_path = _heatmap_paths(path)
    try:
        header = json.loads(header_path.read_bytes())
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad heatmap header {header_path}: {exc.msg}") from None
    if header.get("dtype") != HEATMAP_DTYPE:
        raise FormatError(f"unsupported heatmap dtype {header.get('dtype')!r}")
    height, width = header.get("height"), header.get("width")
    if not isinstance(height, int) or not isinstance(width, int) or height <= 0 or width <= 0:
        raise FormatError("heatmap header needs positive integer height and width")
    payload = data_path.read_bytes()
    if len(payload) != height * width * 4:
        raise FormatError(
            f"header claims {height}x{width} but payload has {len(payload) / 4:g} floats"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(height, width).astype(np.float32)
