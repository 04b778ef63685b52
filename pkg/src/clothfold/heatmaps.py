"""Gaussian-mixture supervision heatmaps, masking and greedy decoding."""

from __future__ import annotations

import numpy as np

from clothfold.errors import NoPeakError, NormalizationError, ValidationError

#: Isotropic variance of each mixture component, in squared pixels.
DEFAULT_SIGMA2 = 5.0


def gaussian_heatmap(centers, shape, sigma2: float = DEFAULT_SIGMA2) -> np.ndarray:
    """Equal-weight Gaussian mixture over every pixel, rescaled to max 1.

    ``centers`` are real ``(row, col)`` positions.
    """
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    if len(centers) == 0:
        raise ValidationError("need at least one center")
    if sigma2 <= 0:
        raise ValidationError("sigma2 must be positive")
    h, w = shape
    if h <= 0 or w <= 0:
        raise ValidationError("heatmap shape must be positive")
    if np.any(centers < 0) or np.any(centers[:, 0] >= h) or np.any(centers[:, 1] >= w):
        raise ValidationError("centers must lie inside the image")
    rows = np.arange(h, dtype=np.float64)[:, None]
    cols = np.arange(w, dtype=np.float64)[None, :]
    out = np.zeros((h, w))
    for r, c in centers:
        out += np.exp(-((rows - r) ** 2 + (cols - c) ** 2) / (2.0 * sigma2))
    out /= len(centers)
    return out / out.max()


def apply_mask(h: np.ndarray, mask) -> np.ndarray:
    """Zero out pixels outside ``mask``. The result is not renormalized."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != np.shape(h):
        raise ValidationError(f"mask shape {mask.shape} does not match heatmap shape {np.shape(h)}")
    return np.where(mask, h, 0.0)


def argmax_position(h: np.ndarray) -> tuple[int, int]:
    """Most probable pixel; row-major first occurrence wins ties."""
    h = np.asarray(h)
    if h.size == 0:
        raise ValidationError("empty heatmap")
    if not np.any(h):
        raise NoPeakError("heatmap is all zero")
    r, c = np.unravel_index(int(np.argmax(h)), h.shape)
    return int(r), int(c)


def to_distribution(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    total = h.sum()
    if not total > 0:
        raise NormalizationError("heatmap has no mass")
    return h / total
