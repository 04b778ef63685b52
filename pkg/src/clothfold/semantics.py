"""Garment-region labels from NOCS coordinates and left/right picker fusion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from clothfold.errors import UnresolvableLocationError, ValidationError
from clothfold.geometry import Mesh, nearest_vertex
from clothfold.segmentation import HandAction

VERTICAL = ("top", "bottom")
HORIZONTAL = ("left", "right")
CANONICAL_LABELS = (
    "top",
    "bottom",
    "left",
    "right",
    "top left",
    "top right",
    "bottom left",
    "bottom right",
)
_OPPOSITE_WORD = {"top": "bottom", "bottom": "top", "left": "right", "right": "left"}


@dataclass(frozen=True)
class AxisConfig:
    """Which NOCS axis runs bottom-to-top and which runs left-to-right.

    Coordinates at or above a split value fall on the high side (top / right).
    """

    updown_axis: int = 1
    leftright_axis: int = 0
    split_updown: float = 0.5
    split_leftright: float = 0.5

    def __post_init__(self):
        if {self.updown_axis, self.leftright_axis} - {0, 1, 2} or self.updown_axis == self.leftright_axis:
            raise ValidationError("updown_axis and leftright_axis must be distinct axes in {0, 1, 2}")


@dataclass(frozen=True)
class RegionLabel:
    vertical: Optional[str] = None
    horizontal: Optional[str] = None

    def __post_init__(self):
        if self.vertical not in (*VERTICAL, None):
            raise ValidationError(f"bad vertical region {self.vertical!r}")
        if self.horizontal not in (*HORIZONTAL, None):
            raise ValidationError(f"bad horizontal region {self.horizontal!r}")


@dataclass(frozen=True)
class SemanticLabel:
    text: str
    sleeve_flag: bool = False

    def __post_init__(self):
        if self.text not in CANONICAL_LABELS:
            raise ValidationError(f"{self.text!r} is not a canonical label")


def nocs_region(coord, axes: AxisConfig = AxisConfig()) -> RegionLabel:
    c = np.asarray(coord, dtype=np.float64)
    if c.shape != (3,) or np.any(c < 0.0) or np.any(c > 1.0):
        raise ValidationError(f"NOCS coordinate {coord!r} outside the unit cube")
    vertical = "top" if c[axes.updown_axis] >= axes.split_updown else "bottom"
    horizontal = "right" if c[axes.leftright_axis] >= axes.split_leftright else "left"
    return RegionLabel(vertical, horizontal)


def hand_pick_region(action: HandAction, nocs: Mesh, axes: AxisConfig = AxisConfig()) -> RegionLabel:
    """Region of the mean NOCS coordinate of the gripped vertices."""
    coord = nocs.vertices[list(action.pick_vertex_ids)].mean(axis=0)
    return nocs_region(np.clip(coord, 0.0, 1.0), axes)


def hand_place_region(
    action: HandAction, reference_mesh: Mesh, nocs: Mesh, axes: AxisConfig = AxisConfig()
) -> RegionLabel:
    """Region of the NOCS coordinate of the ``reference_mesh`` vertex closest to the place point.

    The pipeline passes the mesh at the action's start frame. At the end frame the
    gripped vertices have followed the picker, so they would always win.
    """
    if reference_mesh.num_vertices != nocs.num_vertices:
        raise ValidationError("reference mesh and NOCS mesh must share topology")
    idx = nearest_vertex(reference_mesh.vertices, action.place_point)
    return nocs_region(nocs.vertices[idx], axes)


def opposite_word(word: str) -> str:
    return _OPPOSITE_WORD[word]


def opposite(label: SemanticLabel) -> SemanticLabel:
    """Flip every axis present in the label."""
    return SemanticLabel(" ".join(opposite_word(w) for w in label.text.split()))


def resolve_location(
    left: RegionLabel,
    right: RegionLabel,
    action_type: str,
    garment: str,
    s_pick: Optional[SemanticLabel] = None,
) -> SemanticLabel:
    """Fuse the two pickers' regions into one semantic location.

    For a place, ``s_pick`` is the already resolved pick label; the cascade tries
    to avoid returning the same location as the pick. When the pickers agree only
    on the vertical axis, the vertical label is returned.
    """
    if action_type not in ("pick", "place"):
        raise ValidationError(f"action_type must be 'pick' or 'place', got {action_type!r}")
    if action_type == "place" and s_pick is None:
        raise ValidationError("place resolution requires the pick label")
    v = left.vertical if left.vertical == right.vertical else None
    h = left.horizontal if left.horizontal == right.horizontal else None

    if h is not None:
        if v is None:
            return SemanticLabel(h)
        if action_type == "place":
            pick = s_pick.text
            if pick == h:
                return SemanticLabel(v)
            if pick == v:
                return SemanticLabel(h)
            if pick == opposite_word(h):
                return SemanticLabel(h)
            if pick == opposite_word(v):
                return SemanticLabel(v)
            return SemanticLabel(f"{v} {h}")
        if garment == "Tshirt" and v == "top":
            return SemanticLabel(h, sleeve_flag=True)
        return SemanticLabel(f"{v} {h}")

    if v is not None:
        return SemanticLabel(v)
    if action_type == "place":
        # place vertices may be wrong, e.g. a sleeve laid over the bottom
        return opposite(s_pick)
    raise UnresolvableLocationError(
        f"pickers agree on neither axis (left={left}, right={right})"
    )
