"""Parse per-frame grip signals into pick-and-place actions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from clothfold.errors import ValidationError
from clothfold.records import SequenceRecord

HANDS = ("left", "right")
MAX_SPURIOUS_FRAMES = 5
MIN_ACTION_DISTANCE = 0.1


@dataclass(frozen=True, eq=False)
class HandAction:
    hand: str
    start_frame: int
    end_frame: int
    pick_vertex_ids: tuple
    place_vertex_ids: tuple
    pick_point: np.ndarray
    place_point: np.ndarray

    def __post_init__(self):
        if self.hand not in HANDS:
            raise ValidationError(f"hand must be one of {HANDS}, got {self.hand!r}")
        if self.end_frame <= self.start_frame:
            raise ValidationError("end_frame must be greater than start_frame")
        if not self.pick_vertex_ids or not self.place_vertex_ids:
            raise ValidationError("pick/place vertex sets must be non-empty")
        object.__setattr__(self, "pick_vertex_ids", tuple(int(i) for i in self.pick_vertex_ids))
        object.__setattr__(self, "place_vertex_ids", tuple(int(i) for i in self.place_vertex_ids))
        object.__setattr__(self, "pick_point", np.asarray(self.pick_point, dtype=np.float64))
        object.__setattr__(self, "place_point", np.asarray(self.place_point, dtype=np.float64))

    @property
    def span(self) -> int:
        """Inclusive number of frames."""
        return self.end_frame - self.start_frame + 1

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(self.place_point - self.pick_point))

    def overlaps(self, other: "HandAction") -> bool:
        return self.start_frame <= other.end_frame and other.start_frame <= self.end_frame

    def __eq__(self, other):
        if not isinstance(other, HandAction):
            return NotImplemented
        return (
            self.hand == other.hand
            and self.start_frame == other.start_frame
            and self.end_frame == other.end_frame
            and self.pick_vertex_ids == other.pick_vertex_ids
            and self.place_vertex_ids == other.place_vertex_ids
            and np.array_equal(self.pick_point, other.pick_point)
            and np.array_equal(self.place_point, other.place_point)
        )

    def __repr__(self):
        return f"HandAction({self.hand}, [{self.start_frame}, {self.end_frame}])"


@dataclass(frozen=True)
class ActionSegment:
    left: Optional[HandAction] = None
    right: Optional[HandAction] = None

    def __post_init__(self):
        if self.left is None and self.right is None:
            raise ValidationError("segment needs at least one hand")
        if self.left is not None and self.right is not None and not self.left.overlaps(self.right):
            raise ValidationError("bimanual segment hands must overlap in time")

    @property
    def arm_usage(self) -> str:
        if self.left is not None and self.right is not None:
            return "bimanual"
        return "left_only" if self.left is not None else "right_only"

    @property
    def hands(self) -> list[HandAction]:
        return [a for a in (self.left, self.right) if a is not None]

    @property
    def start_frame(self) -> int:
        return min(a.start_frame for a in self.hands)

    @property
    def end_frame(self) -> int:
        return max(a.end_frame for a in self.hands)


def extract_hand_actions(record: SequenceRecord, hand: str) -> list[HandAction]:
    """One action per maximal run of consecutive frames with a non-empty grip set.

    Runs covering a single stored frame have no distinct start and end and are skipped.
    """
    if hand not in HANDS:
        raise ValidationError(f"hand must be one of {HANDS}, got {hand!r}")
    frames = record.frames
    actions = []
    i = 0
    while i < len(frames):
        if not frames[i].grip_ids(hand):
            i += 1
            continue
        j = i
        while j + 1 < len(frames) and frames[j + 1].grip_ids(hand):
            j += 1
        if j > i:
            first, last = frames[i], frames[j]
            pick_ids = first.grip_ids(hand)
            place_ids = last.grip_ids(hand)
            actions.append(
                HandAction(
                    hand=hand,
                    start_frame=first.t,
                    end_frame=last.t,
                    pick_vertex_ids=pick_ids,
                    place_vertex_ids=place_ids,
                    pick_point=first.cloth_vertices[list(pick_ids)].mean(axis=0),
                    place_point=last.cloth_vertices[list(place_ids)].mean(axis=0),
                )
            )
        i = j + 1
    return actions


def is_spurious(
    action: HandAction,
    max_frames: int = MAX_SPURIOUS_FRAMES,
    min_distance: float = MIN_ACTION_DISTANCE,
) -> bool:
    return action.span <= max_frames or action.distance < min_distance


def filter_spurious(
    actions: list[HandAction],
    max_frames: int = MAX_SPURIOUS_FRAMES,
    min_distance: float = MIN_ACTION_DISTANCE,
) -> list[HandAction]:
    """Drop short-lived or barely-moving actions."""
    return [a for a in actions if not is_spurious(a, max_frames, min_distance)]


def _check_hand_list(actions: list[HandAction], hand: str) -> list[HandAction]:
    ordered = sorted(actions, key=lambda a: a.start_frame)
    for a in ordered:
        if a.hand != hand:
            raise ValidationError(f"expected only {hand} actions, got a {a.hand} action")
    for a, b in zip(ordered, ordered[1:]):
        if a.overlaps(b):
            raise ValidationError(f"overlapping {hand} actions {a!r} and {b!r}")
    return ordered


def align_bimanual(left: list[HandAction], right: list[HandAction]) -> list[ActionSegment]:
    """Pair overlapping left/right actions into bimanual segments.

    Actions are visited in start-frame order (left first on ties). Each unmatched
    action takes the earliest-starting unmatched action of the other hand that
    shares at least one frame with it.
    """
    left = _check_hand_list(left, "left")
    right = _check_hand_list(right, "right")
    pool = {"left": left, "right": right}
    used = {"left": [False] * len(left), "right": [False] * len(right)}
    order = sorted(
        [(a.start_frame, 0, i, "left") for i, a in enumerate(left)]
        + [(a.start_frame, 1, i, "right") for i, a in enumerate(right)]
    )
    segments = []
    for _, _, i, hand in order:
        if used[hand][i]:
            continue
        used[hand][i] = True
        action = pool[hand][i]
        other = "right" if hand == "left" else "left"
        partner = None
        for k, cand in enumerate(pool[other]):
            if not used[other][k] and action.overlaps(cand):
                used[other][k] = True
                partner = cand
                break
        pair = {hand: action, other: partner}
        segments.append(ActionSegment(left=pair["left"], right=pair["right"]))
    segments.sort(key=lambda s: (s.start_frame, 0 if s.left is not None else 1))
    return segments


def segment_sequence(
    record: SequenceRecord,
    max_frames: int = MAX_SPURIOUS_FRAMES,
    min_distance: float = MIN_ACTION_DISTANCE,
) -> list[ActionSegment]:
    """Extract, filter and align the actions of both hands."""
    per_hand = {
        hand: filter_spurious(extract_hand_actions(record, hand), max_frames, min_distance)
        for hand in HANDS
    }
    return align_bimanual(per_hand["left"], per_hand["right"])
