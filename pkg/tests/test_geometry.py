import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clothfold.errors import ValidationError
from clothfold.geometry import (
    Mesh,
    NocsMesh,
    divergence_ratio,
    divergence_score,
    edge_lengths,
    grid_mesh,
    is_divergent,
    mesh_diameter,
    nearest_vertex,
)


def brute_force_edges(mesh):
    seen = set()
    for f in mesh.faces.tolist():
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            seen.add(frozenset((a, b)))
    return sorted(
        math.dist(mesh.vertices[a], mesh.vertices[b]) for a, b in (tuple(e) for e in seen)
    )


def random_mesh(rng, n=50, n_faces=80):
    verts = rng.normal(size=(n, 3))
    faces = np.array([rng.choice(n, size=3, replace=False) for _ in range(n_faces)])
    return Mesh(verts, faces)


def test_unit_square_edges(unit_square):
    assert sorted(edge_lengths(unit_square)) == pytest.approx([1, 1, 1, 1, math.sqrt(2)])


def test_coincident_vertices_give_zero_length():
    verts = np.array([[0, 0, 0], [0, 0, 0], [1, 0, 0]], dtype=float)
    assert 0.0 in edge_lengths(Mesh(verts, [[0, 1, 2]]))


def test_random_mesh_matches_brute_force(rng):
    mesh = random_mesh(rng)
    assert sorted(edge_lengths(mesh)) == pytest.approx(brute_force_edges(mesh), abs=1e-12)


@pytest.mark.parametrize(
    "verts, faces, msg",
    [
        ([[0, 0, 0], [1, 0, 0]], [[0, 1, 1]], "at least 3"),
        ([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 3]], "out of range"),
        ([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 1]], "same vertex"),
        ([[0, 0, 0], [1, 0, 0], [0, 1, 0]], np.zeros((0, 3), int), "at least 1 face"),
    ],
)
def test_invalid_mesh(verts, faces, msg):
    with pytest.raises(ValidationError, match=msg):
        Mesh(np.array(verts, float), faces)


def test_nocs_must_be_in_unit_cube():
    with pytest.raises(ValidationError):
        NocsMesh([[0, 0, 0], [1.5, 0, 0], [0, 1, 0]], [[0, 1, 2]])


def test_equilateral_score_is_zero():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0]])
    assert divergence_score(Mesh(verts, [[0, 1, 2]])) == 0.0


def test_unit_square_score(unit_square):
    # lengths {1,1,1,1,sqrt2}: mean 1.0828, population std 0.16569
    lengths = np.array([1, 1, 1, 1, math.sqrt(2)])
    hand = (lengths.max() - lengths.mean()) / math.sqrt(np.mean((lengths - lengths.mean()) ** 2))
    assert hand == pytest.approx(2.0)
    assert divergence_score(unit_square) == pytest.approx(2.0, abs=1e-12)


def test_teleported_vertex_at_least_doubles_score():
    clean = grid_mesh(10)
    verts = clean.vertices.copy()
    verts[55] += [10.0, 0.0, 0.0]
    assert divergence_score(clean.with_vertices(verts)) >= 2 * divergence_score(clean)


def test_scaled_copy_not_divergent():
    nocs = grid_mesh(10)
    sim = nocs.with_vertices(nocs.vertices * 1.7 + [0.3, -2.0, 5.0])
    assert divergence_ratio(sim, nocs) == pytest.approx(1.0)
    assert not is_divergent(sim, nocs)


def test_spiked_copy_is_divergent():
    nocs = grid_mesh(10)
    verts = nocs.vertices.copy()
    verts[9] += [100 * mesh_diameter(verts), 0, 0]
    assert is_divergent(nocs.with_vertices(verts), nocs)


def test_threshold_is_strict():
    nocs = grid_mesh(10)
    verts = nocs.vertices.copy()
    verts[42] += [0.3, 0.2, 0.1]
    sim = nocs.with_vertices(verts)
    ratio = divergence_ratio(sim, nocs)
    assert not is_divergent(sim, nocs, threshold=ratio)
    assert is_divergent(sim, nocs, threshold=np.nextafter(ratio, 0))


def test_degenerate_reference_counts_as_divergent():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0]])
    tri = Mesh(verts, [[0, 1, 2]])
    assert is_divergent(tri, tri)


def test_topology_mismatch():
    a = grid_mesh(4)
    b = grid_mesh(5)
    with pytest.raises(ValidationError, match="topology"):
        is_divergent(a, b)


def test_nearest_vertex_exact_hit(rng):
    verts = rng.uniform(size=(20, 3))
    assert nearest_vertex(verts, verts[7]) == 7


def test_nearest_vertex_tie_goes_low():
    verts = np.array([[5, 5, 5], [9, 9, 9], [1, 0, 0], [7, 7, 7], [8, 8, 8], [-1, 0, 0]], float)
    assert nearest_vertex(verts, [0, 0, 0]) == 2


def test_nearest_vertex_linear_scan(rng):
    verts = rng.uniform(-1, 1, size=(1000, 3))
    q = rng.uniform(-1, 1, size=3)
    best, best_d = None, float("inf")
    for i, v in enumerate(verts):
        d = math.dist(v, q)
        if d < best_d:
            best, best_d = i, d
    assert nearest_vertex(verts, q) == best


def test_nearest_vertex_empty():
    with pytest.raises(ValidationError):
        nearest_vertex(np.zeros((0, 3)), [0, 0, 0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_edges_invariant_to_relabeling(seed):
    rng = np.random.default_rng(seed)
    mesh = random_mesh(rng, n=12, n_faces=10)
    perm = rng.permutation(12)
    inv = np.argsort(perm)
    relabeled = Mesh(mesh.vertices[perm], inv[mesh.faces])
    assert sorted(edge_lengths(relabeled)) == pytest.approx(sorted(edge_lengths(mesh)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100))
def test_score_invariant_to_similarity_transforms(seed, scale):
    rng = np.random.default_rng(seed)
    mesh = random_mesh(rng, n=15, n_faces=12)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    moved = mesh.with_vertices(scale * mesh.vertices @ q.T + rng.normal(size=3))
    assert divergence_score(moved) == pytest.approx(divergence_score(mesh), rel=1e-7, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 50))
def test_clean_mesh_never_divergent_against_rescaled_self(seed, scale):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    nocs = grid_mesh(n)
    jitter = nocs.vertices + rng.uniform(-0.01, 0.01, size=nocs.vertices.shape) / n
    nocs = nocs.with_vertices(np.clip(jitter, 0, 1))
    assert not is_divergent(nocs.with_vertices(nocs.vertices * scale), nocs)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nearest_vertex_is_minimal(seed):
    rng = np.random.default_rng(seed)
    verts = rng.integers(-3, 4, size=(12, 3)).astype(float)
    q = rng.integers(-3, 4, size=3).astype(float)
    i = nearest_vertex(verts, q)
    d = np.linalg.norm(verts - q, axis=1)
    assert np.all(d[i] <= d)
    assert i == min(np.flatnonzero(d == d.min()))


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 1e6), st.integers(0, 3))
def test_two_triangle_square_never_exceeds_bound(scale, vertex):
    # five edges: no z-score can exceed sqrt(4) = 2, so the ratio stays near 1
    verts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    faces = np.array([[0, 1, 2], [0, 2, 3]])
    clean = Mesh(verts, faces)
    moved = verts.copy()
    moved[vertex] += [scale, scale, 0]
    spiked = Mesh(moved, faces)
    assert divergence_score(spiked) <= 2.0 + 1e-9
    assert not is_divergent(spiked, clean, 3.5)
