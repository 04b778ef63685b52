import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from clothfold.camera import (
    CameraPose,
    annotate_pixels,
    look_at_camera,
    mask_distance,
    mask_pixel_count,
    project,
    sample_camera,
)
from clothfold.errors import DistanceError, NoValidCameraError, ProjectionError


def test_sample_within_shell(rng):
    center = np.array([0.1, -0.2, 0.0])
    for _ in range(200):
        cam = sample_camera(rng, center)
        assert 45.0 - 1e-9 <= cam.elevation_deg <= 90.0 + 1e-9
        assert 1.8 - 1e-12 <= cam.radius <= 2.2 + 1e-12
        assert np.array_equal(cam.look_at, center)
        assert cam.image_size == (384, 384)


def test_sample_deterministic():
    a = sample_camera(np.random.default_rng(5), [0, 0, 0])
    b = sample_camera(np.random.default_rng(5), [0, 0, 0])
    assert a == b


def test_elevation_distribution_uniform():
    rng = np.random.default_rng(0)
    elev = np.array([sample_camera(rng, [0, 0, 0]).elevation_deg for _ in range(10_000)])
    assert sps.kstest(elev, "uniform", args=(45, 45)).pvalue > 0.01


def test_look_at_projects_to_center(rng):
    for _ in range(50):
        cam = sample_camera(rng, rng.normal(size=3))
        assert project(cam.look_at, cam) == pytest.approx((191.5, 191.5), abs=1e-9)


def test_offset_along_right_matches_pinhole():
    cam = look_at_camera([0, 0, 2.0], [0, 0, 0], vertical_fov=45.0)
    angle = math.radians(10)
    p = cam.look_at + cam.right * 2.0 * math.tan(angle)
    row, col = project(p, cam)
    expected = (384 / 2) * math.tan(angle) / math.tan(math.radians(45) / 2)
    assert col - 191.5 == pytest.approx(expected, rel=1e-12)
    assert row == pytest.approx(191.5, abs=1e-9)


def test_up_moves_rows_up():
    cam = look_at_camera([2.0, 0, 1.0], [0, 0, 0])
    row, _ = project(cam.look_at + 0.1 * cam.up, cam)
    assert row < 191.5


def test_zenith_camera_uses_y_up():
    cam = look_at_camera([0, 0, 2.0], [0, 0, 0])
    assert cam.up == pytest.approx([0, 1, 0])


def test_behind_camera_raises():
    cam = look_at_camera([0, 0, 2.0], [0, 0, 0])
    with pytest.raises(ProjectionError):
        project([0, 0, 3.0], cam)
    with pytest.raises(ProjectionError):
        project(cam.position, cam)


def test_annotate_near_center():
    rng = np.random.default_rng(3)
    pts = [[0.05, 0, 0], [-0.05, 0.02, 0]]
    cam, px = annotate_pixels(pts, rng, [0, 0, 0], max_resamples=1)
    assert len(px) == 2


def test_annotate_impossible_spread():
    with pytest.raises(NoValidCameraError):
        annotate_pixels([[-5, 0, 0], [5, 0, 0]], np.random.default_rng(0), [0, 0, 0])


def test_annotate_deterministic():
    pts = np.random.default_rng(1).uniform(-0.3, 0.3, size=(6, 3))
    a = annotate_pixels(pts, np.random.default_rng(11), [0, 0, 0])
    b = annotate_pixels(pts, np.random.default_rng(11), [0, 0, 0])
    assert a[0] == b[0] and a[1] == b[1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_annotated_pixels_inside_image(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-0.5, 0.5, size=(8, 3))
    try:
        cam, px = annotate_pixels(pts, rng, [0, 0, 0])
    except NoValidCameraError:
        return
    for r, c in px:
        assert 0 <= r < 384 and 0 <= c < 384


def test_mask_distance_inside():
    mask = np.zeros((10, 10), bool)
    mask[3:6, 3:6] = True
    assert mask_distance((4, 4), mask) == 0.0


def test_mask_distance_axis_aligned():
    mask = np.zeros((20, 20), bool)
    mask[:, 10:] = True
    assert mask_distance((7, 5), mask) == 5.0


def test_mask_distance_empty():
    with pytest.raises(DistanceError):
        mask_distance((1, 1), np.zeros((4, 4), bool))


def test_mask_distance_brute_force(rng):
    for _ in range(20):
        mask = rng.uniform(size=(25, 30)) < 0.05
        if not mask.any():
            continue
        px = (rng.uniform(0, 24.4), rng.uniform(0, 29.4))
        rr, cc = int(math.floor(px[0] + 0.5)), int(math.floor(px[1] + 0.5))
        if mask[rr, cc]:
            expected = 0.0
        else:
            expected = min(
                math.hypot(px[0] - r, px[1] - c) for r in range(25) for c in range(30) if mask[r, c]
            )
        assert mask_distance(px, mask) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mask_distance_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    mask = rng.uniform(size=(12, 12)) < 0.1
    if not mask.any():
        return
    r, c = rng.integers(0, 12, size=2)
    d = mask_distance((r, c), mask)
    assert (d == 0.0) == bool(mask[r, c])
    for mr, mc in np.argwhere(mask):
        assert d <= math.hypot(r - mr, c - mc) + 1e-12


def test_mask_pixel_counts():
    assert mask_pixel_count(np.zeros((384, 384), bool)) == 0
    assert mask_pixel_count(np.ones((384, 384), bool)) == 147456
    board = (np.add.outer(np.arange(4), np.arange(4)) % 2).astype(bool)
    assert mask_pixel_count(board) == 8


def test_camera_dict_round_trip(rng):
    cam = sample_camera(rng, [0, 0, 0])
    assert CameraPose.from_dict(cam.to_dict()) == cam
