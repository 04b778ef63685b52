import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clothfold.errors import NoPeakError, NormalizationError, ValidationError
from clothfold.heatmaps import apply_mask, argmax_position, gaussian_heatmap, to_distribution


def test_single_center_peak_is_one():
    h = gaussian_heatmap([(100, 120)], (384, 384))
    assert h[100, 120] == pytest.approx(1.0, abs=1e-12)
    assert h.max() == pytest.approx(1.0)


def test_single_center_at_distance_five():
    h = gaussian_heatmap([(100, 120)], (384, 384))
    assert h[105, 120] == pytest.approx(math.exp(-2.5), abs=1e-12)
    assert h[103, 124] == pytest.approx(math.exp(-2.5), abs=1e-12)


def test_two_centers_symmetric():
    h = gaussian_heatmap([(50, 40), (50, 60)], (101, 101))
    assert h[50, 40] == pytest.approx(h[50, 60], abs=1e-15)
    assert np.allclose(h[:, 40:61], h[:, 40:61][:, ::-1])


def test_coincident_centers_equal_single():
    one = gaussian_heatmap([(10.3, 20.7)], (40, 40))
    many = gaussian_heatmap([(10.3, 20.7)] * 4, (40, 40))
    assert np.array_equal(one, many)


def test_values_in_unit_interval(rng):
    h = gaussian_heatmap(rng.uniform(0, 63, size=(5, 2)), (64, 64))
    assert h.min() >= 0 and h.max() == pytest.approx(1.0)


@pytest.mark.parametrize("centers", [[], [(-1, 0)], [(0, 64)]])
def test_bad_centers(centers):
    with pytest.raises(ValidationError):
        gaussian_heatmap(centers, (64, 64))


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 20), st.integers(5, 20), st.integers(-4, 4), st.integers(-4, 4))
def test_translation_equivariance(r, c, dr, dc):
    a = gaussian_heatmap([(r, c), (r + 3, c + 1)], (48, 48))
    b = gaussian_heatmap([(r + dr, c + dc), (r + 3 + dr, c + 1 + dc)], (48, 48))
    # compare away from the borders
    assert np.allclose(a[10:30, 10:30], b[10 + dr : 30 + dr, 10 + dc : 30 + dc], atol=1e-12)


def test_mask_identity_and_zero():
    h = gaussian_heatmap([(5, 5)], (12, 12))
    assert np.array_equal(apply_mask(h, np.ones((12, 12), bool)), h)
    assert not apply_mask(h, np.zeros((12, 12), bool)).any()


def test_mask_excluding_peak_drops_max():
    h = gaussian_heatmap([(5, 5)], (12, 12))
    mask = np.ones((12, 12), bool)
    mask[5, 5] = False
    assert apply_mask(h, mask).max() < 1.0


def test_mask_shape_mismatch():
    with pytest.raises(ValidationError):
        apply_mask(np.ones((3, 3)), np.ones((3, 4), bool))


def test_argmax_rounded_center():
    assert argmax_position(gaussian_heatmap([(30.2, 17.7)], (64, 64))) == (30, 18)


def test_argmax_tie_break():
    assert argmax_position(np.full((5, 7), 0.3)) == (0, 0)


def test_argmax_masked_matches_scan(rng):
    h = gaussian_heatmap(rng.uniform(0, 31, size=(3, 2)), (32, 32))
    mask = rng.uniform(size=(32, 32)) < 0.4
    mask[argmax_position(h)] = False
    m = apply_mask(h, mask)
    best, best_v = None, -1.0
    for r in range(32):
        for c in range(32):
            if mask[r, c] and m[r, c] > best_v:
                best, best_v = (r, c), m[r, c]
    assert argmax_position(m) == best


def test_argmax_all_zero():
    with pytest.raises(NoPeakError):
        argmax_position(np.zeros((4, 4)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_masked_argmax_stays_in_mask(seed):
    rng = np.random.default_rng(seed)
    h = gaussian_heatmap(rng.uniform(0, 15, size=(2, 2)), (16, 16))
    mask = rng.uniform(size=(16, 16)) < 0.5
    m = apply_mask(h, mask)
    if not m.any():
        return
    assert mask[argmax_position(m)]


def test_distribution_examples():
    assert np.allclose(to_distribution(np.ones((4, 5))), 1 / 20)
    single = np.zeros((3, 3))
    single[1, 2] = 0.4
    assert to_distribution(single)[1, 2] == 1.0
    with pytest.raises(NormalizationError):
        to_distribution(np.zeros((2, 2)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_distribution_sums_to_one(seed):
    rng = np.random.default_rng(seed)
    h = rng.uniform(size=(20, 30)) ** 3
    assert abs(to_distribution(h).sum() - 1.0) <= 1e-9
