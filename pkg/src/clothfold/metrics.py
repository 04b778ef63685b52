"""Image-space keypoint metrics and simulation-space mesh metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from clothfold.errors import ValidationError
from clothfold.heatmaps import to_distribution

AP_THRESHOLDS = (5, 10, 20, 50)
IOU_SUCCESS = 0.8
VERTEX_SUCCESS_M = 0.0125


def _as_points(gt) -> np.ndarray:
    pts = np.asarray(gt, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValidationError("ground-truth set must be non-empty")
    return pts


def nearest_gt_distances(preds, gts) -> np.ndarray:
    """Distance from each prediction to the closest point of its ground-truth set."""
    preds = np.asarray(preds, dtype=np.float64).reshape(-1, 2)
    if len(preds) != len(gts):
        raise ValidationError(f"{len(preds)} predictions but {len(gts)} ground-truth sets")
    out = []
    for p, g in zip(preds, gts):
        diff = _as_points(g) - p
        out.append(np.min(np.sqrt(diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1])))
    return np.array(out)


def ap_at(preds, gts, tau: float) -> float:
    """Percentage of predictions within ``tau`` pixels of their nearest ground truth."""
    d = nearest_gt_distances(preds, gts)
    if len(d) == 0:
        return 0.0
    return 100.0 * np.count_nonzero(d <= tau) / len(d)


def kp_error(preds, gts, squared: bool = False) -> float:
    """Mean (or mean squared) nearest-ground-truth pixel distance.

    The sum is correctly rounded, so the result does not depend on ordering.
    """
    d = nearest_gt_distances(preds, gts)
    if len(d) == 0:
        return 0.0
    return math.fsum(d * d if squared else d) / len(d)


def quantile(h, gt_pixels, strict: bool = True) -> float:
    """Mean percentage of pixels ranked below each ground-truth pixel's probability."""
    p = to_distribution(h)
    gt = np.asarray(gt_pixels).reshape(-1, 2)
    if len(gt) == 0:
        raise ValidationError("need at least one ground-truth pixel")
    rows, cols = gt[:, 0], gt[:, 1]
    if np.any(rows < 0) or np.any(rows >= p.shape[0]) or np.any(cols < 0) or np.any(cols >= p.shape[1]):
        raise ValidationError("ground-truth pixel out of bounds")
    flat = np.sort(p.ravel())
    values = p[rows.astype(int), cols.astype(int)]
    side = "left" if strict else "right"
    below = np.searchsorted(flat, values, side=side)
    return float(np.mean(100.0 * below / flat.size))


def iou(a, b) -> float:
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValidationError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def iou_success(value: float, threshold: float = IOU_SUCCESS) -> bool:
    return value >= threshold


def vertex_error(a, b) -> float:
    """Mean Euclidean distance between corresponding vertices, in meters."""
    va = np.asarray(getattr(a, "vertices", a), dtype=np.float64)
    vb = np.asarray(getattr(b, "vertices", b), dtype=np.float64)
    if va.shape != vb.shape:
        raise ValidationError(f"vertex count mismatch: {va.shape} vs {vb.shape}")
    return float(np.mean(np.linalg.norm(va - vb, axis=1)))


def vertex_success(error_m: float, threshold: float = VERTEX_SUCCESS_M) -> bool:
    return error_m < threshold


def error_mm(a, b) -> float:
    return vertex_error(a, b) * 1000.0


@dataclass
class MetricReport:
    ap: dict = field(default_factory=dict)
    kp_error_px: float | None = None
    quantile_pct: float | None = None
    iou: float | None = None
    success_iou80: bool | None = None
    vertex_error_m: float | None = None
    success_vertex: bool | None = None

    def to_dict(self) -> dict:
        return {
            "ap": {str(k): v for k, v in self.ap.items()},
            "kp_error_px": self.kp_error_px,
            "quantile_pct": self.quantile_pct,
            "iou": self.iou,
            "success_iou80": self.success_iou80,
            "vertex_error_m": self.vertex_error_m,
            "success_vertex": self.success_vertex,
        }


def keypoint_report(preds, gts, thresholds=AP_THRESHOLDS, squared: bool = False) -> MetricReport:
    return MetricReport(
        ap={t: ap_at(preds, gts, t) for t in thresholds},
        kp_error_px=kp_error(preds, gts, squared=squared),
    )
