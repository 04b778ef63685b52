"""Annotation records: parsed actions with labels, instructions and pixel endpoints."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from clothfold.camera import CameraPose
from clothfold.errors import ParseError, ValidationError
from clothfold.records import dumps_canonical
from clothfold.segmentation import HANDS, ActionSegment, HandAction
from clothfold.semantics import RegionLabel, SemanticLabel
from clothfold.templates import InstructionRecord


@dataclass(frozen=True)
class HandPixels:
    pick: tuple
    place: tuple


@dataclass(frozen=True)
class AnnotatedAction:
    segment: ActionSegment
    pick: SemanticLabel
    place: SemanticLabel
    instruction: InstructionRecord
    pixels: dict = field(default_factory=dict)
    regions: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AnnotationRecord:
    sequence_id: str
    garment_category: str
    actions: tuple = ()
    camera: Optional[CameraPose] = None

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        starts = [a.segment.start_frame for a in self.actions]
        if starts != sorted(starts):
            raise ValidationError("actions must be ordered by start frame")
        for hand in HANDS:
            spans = [getattr(a.segment, hand) for a in self.actions]
            spans = [s for s in spans if s is not None]
            for a, b in zip(spans, spans[1:]):
                if a.overlaps(b):
                    raise ValidationError(f"overlapping {hand} actions in {self.sequence_id}")


# -- dict conversion ---------------------------------------------------------


def _hand_to_dict(a: HandAction, pixels: Optional[HandPixels], regions: Optional[dict]) -> dict:
    d = {
        "start_frame": a.start_frame,
        "end_frame": a.end_frame,
        "pick_vertex_ids": list(a.pick_vertex_ids),
        "place_vertex_ids": list(a.place_vertex_ids),
        "pick_point": a.pick_point.tolist(),
        "place_point": a.place_point.tolist(),
        "pick_pixel": list(pixels.pick) if pixels else None,
        "place_pixel": list(pixels.place) if pixels else None,
    }
    for key in ("pick", "place"):
        reg = (regions or {}).get(key)
        d[f"{key}_region"] = None if reg is None else {"vertical": reg.vertical, "horizontal": reg.horizontal}
    return d


def _label_dict(label: SemanticLabel) -> dict:
    return {"text": label.text, "sleeve_flag": label.sleeve_flag}


def annotation_to_dict(rec: AnnotationRecord) -> dict:
    actions = []
    for act in rec.actions:
        seg = act.segment
        hands = {}
        for hand in HANDS:
            ha = getattr(seg, hand)
            hands[hand] = None if ha is None else _hand_to_dict(ha, act.pixels.get(hand), act.regions.get(hand))
        actions.append(
            {
                "start_frame": seg.start_frame,
                "end_frame": seg.end_frame,
                "arm_usage": seg.arm_usage,
                "hands": hands,
                "pick": _label_dict(act.pick),
                "place": _label_dict(act.place),
                "instruction": {
                    "kind": act.instruction.kind,
                    "template_index": act.instruction.template_index,
                    "text": act.instruction.text,
                    "single_arm": act.instruction.single_arm,
                },
            }
        )
    return {
        "sequence_id": rec.sequence_id,
        "garment_category": rec.garment_category,
        "camera": None if rec.camera is None else rec.camera.to_dict(),
        "actions": actions,
    }


def write_annotation(rec: AnnotationRecord) -> bytes:
    """Deterministic bytes: sorted keys, 6 significant digits for floats."""
    return dumps_canonical(annotation_to_dict(rec))


def _hand_from_dict(hand: str, d: dict):
    action = HandAction(
        hand=hand,
        start_frame=d["start_frame"],
        end_frame=d["end_frame"],
        pick_vertex_ids=d["pick_vertex_ids"],
        place_vertex_ids=d["place_vertex_ids"],
        pick_point=d["pick_point"],
        place_point=d["place_point"],
    )
    pixels = None
    if d.get("pick_pixel") is not None:
        pixels = HandPixels(tuple(d["pick_pixel"]), tuple(d["place_pixel"]))
    regions = {}
    for key in ("pick", "place"):
        reg = d.get(f"{key}_region")
        if reg is not None:
            regions[key] = RegionLabel(reg["vertical"], reg["horizontal"])
    return action, pixels, regions


def annotation_from_dict(doc: dict) -> AnnotationRecord:
    try:
        actions = []
        for a in doc["actions"]:
            hands, pixels, regions = {}, {}, {}
            for hand in HANDS:
                hd = a["hands"].get(hand)
                if hd is None:
                    hands[hand] = None
                    continue
                hands[hand], px, reg = _hand_from_dict(hand, hd)
                if px is not None:
                    pixels[hand] = px
                if reg:
                    regions[hand] = reg
            seg = ActionSegment(left=hands["left"], right=hands["right"])
            if seg.arm_usage != a["arm_usage"]:
                raise ValidationError(f"arm_usage {a['arm_usage']!r} inconsistent with hands present")
            ins = a["instruction"]
            actions.append(
                AnnotatedAction(
                    segment=seg,
                    pick=SemanticLabel(a["pick"]["text"], a["pick"]["sleeve_flag"]),
                    place=SemanticLabel(a["place"]["text"], a["place"]["sleeve_flag"]),
                    instruction=InstructionRecord(
                        ins["kind"], ins["template_index"], ins["text"], ins["single_arm"]
                    ),
                    pixels=pixels,
                    regions=regions,
                )
            )
        camera = None if doc.get("camera") is None else CameraPose.from_dict(doc["camera"])
        return AnnotationRecord(doc["sequence_id"], doc["garment_category"], actions, camera)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed annotation record: missing or bad field {exc}") from None


def parse_annotation(text: bytes | str) -> AnnotationRecord:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return annotation_from_dict(doc)


def gt_pixels(act: AnnotatedAction, which: str) -> np.ndarray:
    """Pixel endpoints (``which`` = pick/place) of every hand in the action."""
    pts = [getattr(p, which) for _, p in sorted(act.pixels.items())]
    return np.asarray(pts, dtype=np.float64).reshape(-1, 2)
