"""Scripted synthetic folding demonstrations.

A flat square grid garment is folded by rigid rotations of the part on one side
of a fold line. Fold lines pass through grid vertices, so no mesh edge crosses
a line and edge lengths are preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from clothfold.geometry import grid_mesh, mesh_diameter
from clothfold.records import FrameRecord, SequenceRecord, dump_sequence

GRID_N = 11
GARMENT_SIZE = 0.6
IDLE_FRAMES = 3
MOVE_FRAMES = 20


@dataclass
class FoldSpec:
    """Rotate everything with ``side * ((p - point) . normal) > 0`` about the line by pi.

    ``point``/``normal`` are in NOCS (u, v) units; grips are lists of (u, v) grid cells.
    """

    point: tuple
    normal: tuple
    left_grip: list
    right_grip: list


def nocs_grid(n: int = GRID_N) -> np.ndarray:
    base = grid_mesh(n, 1.0).vertices
    return np.column_stack([base[:, 0], base[:, 1], np.full(len(base), 0.5)])


def cell_index(u: float, v: float, n: int = GRID_N) -> int:
    c = int(round(u * (n - 1)))
    r = int(round(v * (n - 1)))
    return r * n + c


def to_world(uv, size: float = GARMENT_SIZE) -> np.ndarray:
    uv = np.asarray(uv, dtype=np.float64)
    return (uv - 0.5) * size


def _rotate_about_line(points: np.ndarray, origin: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    # Rodrigues rotation about a horizontal line through origin
    k = axis / np.linalg.norm(axis)
    p = points - origin
    cos, sin = np.cos(angle), np.sin(angle)
    rotated = p * cos + np.cross(k, p) * sin + np.outer(p @ k, k) * (1 - cos)
    return rotated + origin


def apply_fold(verts: np.ndarray, fold: FoldSpec, size: float = GARMENT_SIZE):
    """Frames of a fold as a list of vertex arrays, starting after ``verts``."""
    origin = np.array([*to_world(fold.point, size), 0.0])
    normal = np.array([*fold.normal, 0.0], dtype=np.float64)
    normal /= np.linalg.norm(normal)
    axis = np.cross(normal, [0.0, 0.0, 1.0])
    signed = (verts - origin) @ normal
    moving = signed > 1e-9
    frames = []
    for i in range(1, MOVE_FRAMES + 1):
        out = verts.copy()
        out[moving] = _rotate_about_line(verts[moving], origin, axis, np.pi * i / MOVE_FRAMES)
        frames.append(out)
    return frames


def build_sequence(
    sequence_id: str, garment: str, folds: list[FoldSpec], n: int = GRID_N, blip: tuple = ()
) -> SequenceRecord:
    """Frames for a series of folds separated by idle frames.

    ``blip`` is an optional ``(hand, (u, v), frames)`` static grip inserted before
    the first fold; it never moves the cloth, so the spurious-action filter drops it.
    """
    nocs = nocs_grid(n)
    faces = grid_mesh(n, 1.0).faces
    verts = np.column_stack([to_world(nocs[:, :2]), np.zeros(len(nocs))])
    frames = []
    t = 0

    def push(v, left=(), right=()):
        nonlocal t
        frames.append(FrameRecord(t, v.copy(), tuple(left), tuple(right)))
        t += 1

    for _ in range(IDLE_FRAMES):
        push(verts)
    if blip:
        hand, cell, count = blip
        ids = [cell_index(*cell, n)]
        for _ in range(count):
            push(verts, ids if hand == "left" else (), ids if hand == "right" else ())
        for _ in range(IDLE_FRAMES):
            push(verts)
    for fold in folds:
        left = [cell_index(u, v, n) for u, v in fold.left_grip]
        right = [cell_index(u, v, n) for u, v in fold.right_grip]
        push(verts, left, right)
        moved = apply_fold(verts, fold)
        for v in moved:
            push(v, left, right)
        verts = moved[-1]
        for _ in range(IDLE_FRAMES):
            push(verts)
    return SequenceRecord(sequence_id, garment, faces, nocs, frames)


def spike(record: SequenceRecord, frame: int, vertex: int, factor: float = 100.0) -> SequenceRecord:
    """Teleport one vertex of one frame ``factor`` mesh diameters away."""
    frames = list(record.frames)
    fr = frames[frame]
    verts = fr.cloth_vertices.copy()
    verts[vertex] += np.array([1.0, 0.0, 0.0]) * factor * mesh_diameter(verts)
    frames[frame] = FrameRecord(fr.t, verts, fr.left_grip_vertex_ids, fr.right_grip_vertex_ids)
    return SequenceRecord(record.sequence_id, record.garment_category, record.faces, record.nocs_vertices, frames)


# Folds in NOCS units: u grows to the garment's right, v grows towards its top.
LEFT_TO_RIGHT = FoldSpec((0.5, 0.5), (-1, 0), [(0.1, 0.8), (0.0, 0.8)], [(0.1, 0.2), (0.0, 0.2)])
TOP_TO_BOTTOM = FoldSpec((0.5, 0.5), (0, 1), [(0.2, 0.9), (0.2, 1.0)], [(0.8, 0.9), (0.8, 1.0)])
BOTTOM_TO_TOP = FoldSpec((0.5, 0.5), (0, -1), [(0.2, 0.1), (0.2, 0.0)], [(0.8, 0.1), (0.8, 0.0)])
RIGHT_SLEEVE = FoldSpec((0.7, 0.5), (1, 0), [], [(1.0, 0.8), (0.9, 0.8)])
LEFT_SLEEVE = FoldSpec((0.3, 0.5), (-1, 0), [(0.0, 0.8), (0.1, 0.8)], [])
# corner fold along u - v = 0.6; stays inside the bottom-right region
BOTTOM_RIGHT_TUCK = FoldSpec((0.8, 0.2), (1, -1), [], [(1.0, 0.0), (0.9, 0.0)])


def corpus() -> list[SequenceRecord]:
    """The bundled demonstration set (one divergent sequence included)."""
    top = build_sequence("00005_Top_000002_000000", "Top", [TOP_TO_BOTTOM], blip=("left", (0.3, 0.3), 4))
    return [
        build_sequence("00001_Trousers_000000_000000", "Trousers", [LEFT_TO_RIGHT, TOP_TO_BOTTOM]),
        build_sequence("00002_Tshirt_000001_000000", "Tshirt", [RIGHT_SLEEVE, LEFT_SLEEVE, BOTTOM_TO_TOP]),
        spike(
            build_sequence("00003_Top_000013_000000", "Top", [LEFT_TO_RIGHT]),
            frame=IDLE_FRAMES + 10,
            vertex=GRID_N - 1,
        ),
        build_sequence("00004_Skirt_000000_000000", "Skirt", [BOTTOM_RIGHT_TUCK, LEFT_TO_RIGHT]),
        top,
    ]


def write_corpus(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for rec in corpus():
        p = directory / f"{rec.sequence_id}.json"
        p.write_bytes(dump_sequence(rec))
        paths.append(p)
    return paths
