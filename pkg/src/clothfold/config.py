"""Pipeline configuration. Every constant defaults to the published value."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from clothfold.camera import CameraSampler
from clothfold.errors import ClothfoldError
from clothfold.semantics import AxisConfig


class ConfigError(ClothfoldError, ValueError):
    """Invalid configuration document."""


@dataclass(frozen=True)
class Thresholds:
    spurious_frames: int = 5
    spurious_distance: float = 0.1
    divergence_ratio: float = 3.5
    sigma2: float = 5.0
    iou_success: float = 0.8
    vertex_success: float = 0.0125


@dataclass(frozen=True)
class CameraConfig:
    elevation_deg: tuple = (45.0, 90.0)
    radius: tuple = (1.8, 2.2)
    vertical_fov: float = 45.0
    max_resamples: int = 100


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    thresholds: Thresholds = field(default_factory=Thresholds)
    camera: CameraConfig = field(default_factory=CameraConfig)
    axes: AxisConfig = field(default_factory=AxisConfig)
    template_bank: Optional[str] = None
    image_size: tuple = (384, 384)
    capitalize_garment: bool = False
    write_heatmaps: bool = True
    ap_thresholds: tuple = (5, 10, 20, 50)

    def __post_init__(self):
        t = self.thresholds
        for name in ("spurious_frames", "spurious_distance", "divergence_ratio", "sigma2", "iou_success", "vertex_success"):
            if not getattr(t, name) > 0:
                raise ConfigError(f"threshold {name} must be positive")
        if len(self.image_size) != 2 or min(self.image_size) <= 0:
            raise ConfigError("image_size must be two positive integers")
        lo, hi = self.camera.elevation_deg
        if not 0 <= lo <= hi <= 90:
            raise ConfigError("camera elevation range must satisfy 0 <= lo <= hi <= 90")
        rlo, rhi = self.camera.radius
        if not 0 < rlo <= rhi:
            raise ConfigError("camera radius range must satisfy 0 < lo <= hi")
        if self.camera.max_resamples < 1:
            raise ConfigError("camera max_resamples must be at least 1")

    def sampler(self) -> CameraSampler:
        return CameraSampler(
            elevation_deg=tuple(self.camera.elevation_deg),
            radius=tuple(self.camera.radius),
            vertical_fov=self.camera.vertical_fov,
            image_size=tuple(self.image_size),
            max_resamples=self.camera.max_resamples,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_SECTIONS = {"thresholds": Thresholds, "camera": CameraConfig, "axes": AxisConfig}


def config_from_dict(doc: dict) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    try:
        for key, val in doc.items():
            if key in _SECTIONS:
                if not isinstance(val, dict):
                    raise ConfigError(f"config section {key!r} must be an object")
                cls = _SECTIONS[key]
                fields = {f.name for f in dataclasses.fields(cls)}
                bad = set(val) - fields
                if bad:
                    raise ConfigError(f"unknown keys in {key!r}: {sorted(bad)}")
                val = cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in val.items()})
            elif isinstance(val, list):
                val = tuple(val)
            kwargs[key] = val
        return PipelineConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None, seed: Optional[int] = None) -> PipelineConfig:
    doc = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    cfg = config_from_dict(doc)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    return cfg
