"""Triangle meshes, edge statistics and nearest-vertex lookup."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clothfold.errors import ValidationError

#: Denominators below this are treated as zero spread.
STD_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangle mesh with vertices in meters.

    ``vertices`` is ``(N, 3)`` float, ``faces`` is ``(F, 3)`` int.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        faces = np.asarray(self.faces, dtype=np.int64)
        if faces.size == 0:
            faces = faces.reshape(0, 3)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "faces", faces)
        validate_mesh(verts, faces)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def with_vertices(self, vertices) -> "Mesh":
        return type(self)(vertices, self.faces)

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices) and np.array_equal(
            self.faces, other.faces
        )


class NocsMesh(Mesh):
    """Mesh whose vertices live in the canonical unit cube."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.vertices < 0.0) or np.any(self.vertices > 1.0):
            raise ValidationError("nocs coordinates must lie in [0, 1]")


def validate_mesh(vertices: np.ndarray, faces: np.ndarray) -> None:
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise ValidationError(f"vertices must have shape (N, 3), got {vertices.shape}")
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise ValidationError(f"faces must have shape (F, 3), got {faces.shape}")
    if len(vertices) < 3:
        raise ValidationError("mesh needs at least 3 vertices")
    if len(faces) < 1:
        raise ValidationError("mesh needs at least 1 face")
    if not np.all(np.isfinite(vertices)):
        raise ValidationError("vertices must be finite")
    if faces.min() < 0 or faces.max() >= len(vertices):
        raise ValidationError("face index out of range")
    if np.any(
        (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])
    ):
        raise ValidationError("face references the same vertex twice")


def unique_edges(faces: np.ndarray) -> np.ndarray:
    """Undirected edges of a face set as sorted ``(i, j)`` rows, ``i < j``."""
    faces = np.asarray(faces)
    pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    pairs = np.sort(pairs, axis=1)
    return np.unique(pairs, axis=0)


def edge_lengths(mesh: Mesh) -> np.ndarray:
    """One length per unique undirected edge, ordered by ``(i, j)``."""
    edges = unique_edges(mesh.faces)
    diff = mesh.vertices[edges[:, 0]] - mesh.vertices[edges[:, 1]]
    return np.linalg.norm(diff, axis=1)


def divergence_score(mesh: Mesh) -> float:
    """How far the longest edge sits above the mean, in population std units.

    Returns 0 when every edge has (numerically) the same length.
    """
    lengths = edge_lengths(mesh)
    std = lengths.std()
    if std < STD_EPS:
        return 0.0
    return float((lengths.max() - lengths.mean()) / std)


def divergence_ratio(sim: Mesh, nocs: Mesh) -> float:
    """Ratio of the simulation score to the NOCS score; ``inf`` if the NOCS score is 0."""
    if sim.num_vertices != nocs.num_vertices or not np.array_equal(sim.faces, nocs.faces):
        raise ValidationError("sim and nocs meshes must share topology")
    ref = divergence_score(nocs)
    if ref < STD_EPS:
        return float("inf")
    return divergence_score(sim) / ref


def is_divergent(sim: Mesh, nocs: Mesh, threshold: float = 3.5) -> bool:
    # a degenerate reference cannot certify anything
    return divergence_ratio(sim, nocs) > threshold


def nearest_vertex(vertices, query) -> int:
    """Index of the closest vertex; ties go to the lowest index."""
    verts = np.asarray(vertices, dtype=np.float64)
    if verts.ndim != 2 or len(verts) == 0:
        raise ValidationError("vertex list must be non-empty")
    d2 = np.sum((verts - np.asarray(query, dtype=np.float64)) ** 2, axis=1)
    return int(np.argmin(d2))


def mesh_diameter(vertices) -> float:
    """Length of the axis-aligned bounding box diagonal."""
    verts = np.asarray(vertices, dtype=np.float64)
    return float(np.linalg.norm(verts.max(axis=0) - verts.min(axis=0)))


def grid_mesh(n: int = 10, size: float = 1.0) -> Mesh:
    """Regular ``n x n`` vertex grid over a square in the z=0 plane."""
    xs = np.linspace(0.0, size, n)
    gx, gy = np.meshgrid(xs, xs, indexing="xy")
    verts = np.stack([gx.ravel(), gy.ravel(), np.zeros(n * n)], axis=1)
    faces = []
    for r in range(n - 1):
        for c in range(n - 1):
            a = r * n + c
            b, d, e = a + 1, a + n, a + n + 1
            faces.append((a, b, e))
            faces.append((a, e, d))
    return Mesh(verts, np.array(faces))
