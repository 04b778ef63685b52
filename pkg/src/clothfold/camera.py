"""Camera sampling on a spherical-cap shell, pinhole projection and mask distances.

World up is +z. Pixel coordinates are ``(row, col)`` with the principal point at
``((H - 1) / 2, (W - 1) / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from clothfold.errors import DistanceError, NoValidCameraError, ProjectionError, ValidationError

WORLD_UP = np.array([0.0, 0.0, 1.0])
FALLBACK_UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class CameraSampler:
    elevation_deg: tuple = (45.0, 90.0)
    radius: tuple = (1.8, 2.2)
    vertical_fov: float = 45.0
    image_size: tuple = (384, 384)
    max_resamples: int = 100


@dataclass(frozen=True, eq=False)
class CameraPose:
    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray
    vertical_fov: float = 45.0
    image_size: tuple = (384, 384)

    def __post_init__(self):
        for name in ("position", "look_at", "up"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        h, w = self.image_size
        if h <= 0 or w <= 0:
            raise ValidationError("image_size must be positive")
        object.__setattr__(self, "image_size", (int(h), int(w)))
        if not 0.0 < self.vertical_fov < 180.0:
            raise ValidationError("vertical_fov must be in (0, 180) degrees")

    @property
    def forward(self) -> np.ndarray:
        f = self.look_at - self.position
        return f / np.linalg.norm(f)

    @property
    def right(self) -> np.ndarray:
        r = np.cross(self.forward, self.up)
        return r / np.linalg.norm(r)

    @property
    def focal_px(self) -> float:
        return (self.image_size[0] / 2.0) / math.tan(math.radians(self.vertical_fov) / 2.0)

    @property
    def principal_point(self) -> tuple[float, float]:
        h, w = self.image_size
        return (h - 1) / 2.0, (w - 1) / 2.0

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.position - self.look_at))

    @property
    def elevation_deg(self) -> float:
        d = self.position - self.look_at
        return math.degrees(math.asin(np.clip(d[2] / np.linalg.norm(d), -1.0, 1.0)))

    def to_dict(self) -> dict:
        return {
            "position": self.position.tolist(),
            "look_at": self.look_at.tolist(),
            "up": self.up.tolist(),
            "vertical_fov": float(self.vertical_fov),
            "image_size": list(self.image_size),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraPose":
        return cls(d["position"], d["look_at"], d["up"], d["vertical_fov"], tuple(d["image_size"]))

    def __eq__(self, other):
        if not isinstance(other, CameraPose):
            return NotImplemented
        return (
            np.array_equal(self.position, other.position)
            and np.array_equal(self.look_at, other.look_at)
            and np.array_equal(self.up, other.up)
            and self.vertical_fov == other.vertical_fov
            and self.image_size == other.image_size
        )


def camera_up(position, look_at) -> np.ndarray:
    """World up made orthogonal to the view axis; +y when looking straight down."""
    f = np.asarray(look_at, dtype=np.float64) - np.asarray(position, dtype=np.float64)
    f /= np.linalg.norm(f)
    ref = WORLD_UP
    if np.linalg.norm(np.cross(f, ref)) < 1e-9:
        ref = FALLBACK_UP
    up = ref - np.dot(ref, f) * f
    return up / np.linalg.norm(up)


def look_at_camera(position, look_at, vertical_fov=45.0, image_size=(384, 384)) -> CameraPose:
    return CameraPose(position, look_at, camera_up(position, look_at), vertical_fov, image_size)


def sample_camera(rng: np.random.Generator, center, sampler: CameraSampler = CameraSampler()) -> CameraPose:
    """Uniform elevation, azimuth and radius within the configured shell."""
    center = np.asarray(center, dtype=np.float64)
    elev = math.radians(rng.uniform(*sampler.elevation_deg))
    azim = math.radians(rng.uniform(0.0, 360.0))
    radius = rng.uniform(*sampler.radius)
    offset = radius * np.array(
        [math.cos(elev) * math.cos(azim), math.cos(elev) * math.sin(azim), math.sin(elev)]
    )
    return look_at_camera(center + offset, center, sampler.vertical_fov, sampler.image_size)


def project(point, cam: CameraPose) -> tuple[float, float]:
    """Sub-pixel ``(row, col)`` of a world point."""
    d = np.asarray(point, dtype=np.float64) - cam.position
    z = float(np.dot(d, cam.forward))
    if z <= 1e-9:
        raise ProjectionError(f"point {point!r} is at or behind the camera")
    x = float(np.dot(d, cam.right))
    y = float(np.dot(d, cam.up))
    f = cam.focal_px
    cy, cx = cam.principal_point
    return cy - f * y / z, cx + f * x / z


def in_image(pixel, image_size) -> bool:
    r, c = pixel
    h, w = image_size
    return 0.0 <= r < h and 0.0 <= c < w


def annotate_pixels(
    points,
    rng: np.random.Generator,
    center,
    sampler: CameraSampler = CameraSampler(),
    max_resamples: int | None = None,
) -> tuple[CameraPose, list[tuple[float, float]]]:
    """First sampled camera that sees every point inside the image, with their pixels."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(points) == 0:
        raise ValidationError("need at least one point to annotate")
    tries = sampler.max_resamples if max_resamples is None else max_resamples
    for _ in range(tries):
        cam = sample_camera(rng, center, sampler)
        try:
            pixels = [project(p, cam) for p in points]
        except ProjectionError:
            continue
        if all(in_image(px, cam.image_size) for px in pixels):
            return cam, pixels
    raise NoValidCameraError(f"no camera out of {tries} kept all {len(points)} points in view")


def round_pixel(pixel) -> tuple[int, int]:
    return int(math.floor(pixel[0] + 0.5)), int(math.floor(pixel[1] + 0.5))


def mask_distance(pixel, mask) -> float:
    """Zero on the mask, otherwise Euclidean distance to the nearest mask pixel."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValidationError("mask must be 2-D")
    r, c = round_pixel(pixel)
    if not (0 <= r < mask.shape[0] and 0 <= c < mask.shape[1]):
        raise ValidationError(f"pixel {pixel!r} outside a {mask.shape} mask")
    if mask[r, c]:
        return 0.0
    coords = np.argwhere(mask)
    if len(coords) == 0:
        raise DistanceError("distance to an empty mask is undefined")
    d = coords - np.asarray(pixel, dtype=np.float64)
    return float(np.sqrt(np.min(np.sum(d * d, axis=1))))


def mask_pixel_count(mask) -> int:
    return int(np.count_nonzero(np.asarray(mask, dtype=bool)))
