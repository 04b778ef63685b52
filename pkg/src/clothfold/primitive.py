"""Waypoint schedules for the quasi-static pick-and-place primitive.

Phases:
    1. start pose (pick/place heights snapped to the picker radius)
    2. move above the pick point at the approach height (transit)
    3. descend to the pick point, gripper closes at the end
    4. lift back above the pick point
    5. move above the place point
    6. descend to the place point, gripper opens at the end
    7. retreat above the place point (transit)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from clothfold.errors import ValidationError

CONTACT_SPEED = 0.005
TRANSIT_MULTIPLIER = 100.0
APPROACH_HEIGHT = 0.15
TRANSIT_PHASES = (2, 7)
CONTACT_PHASES = (3, 4, 5, 6)
PHASES = tuple(range(1, 8))


@dataclass(frozen=True, eq=False)
class Waypoint:
    timestep: int
    position: np.ndarray
    gripper: str
    phase: int

    def to_dict(self) -> dict:
        return {
            "timestep": self.timestep,
            "position": [float(x) for x in self.position],
            "gripper": self.gripper,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class WaypointSchedule:
    waypoints: tuple

    def phase(self, k: int) -> list[Waypoint]:
        return [w for w in self.waypoints if w.phase == k]

    def phase_end(self, k: int) -> Waypoint:
        return self.phase(k)[-1]

    @property
    def positions(self) -> np.ndarray:
        return np.array([w.position for w in self.waypoints])

    def __len__(self):
        return len(self.waypoints)


def phase_steps(length: float, speed: float) -> int:
    """At least one step; tiny float excess over a whole number does not add a step."""
    return max(1, math.ceil(length / speed - 1e-9))


def plan_pick_place(
    pick,
    place,
    picker_radius: float,
    approach_height: float = APPROACH_HEIGHT,
    contact_speed: float = CONTACT_SPEED,
    transit_multiplier: float = TRANSIT_MULTIPLIER,
    start=None,
) -> WaypointSchedule:
    """Linearly interpolated 7-phase schedule for one picker.

    ``start`` defaults to the point above ``pick`` at the approach height.
    """
    if picker_radius <= 0 or approach_height <= 0 or contact_speed <= 0 or transit_multiplier <= 0:
        raise ValidationError("picker_radius, approach_height and speeds must be positive")
    if approach_height <= picker_radius:
        raise ValidationError("approach_height must be above the pick/place height")
    pick = np.asarray(pick, dtype=np.float64)
    place = np.asarray(place, dtype=np.float64)
    pick_low = np.array([pick[0], pick[1], picker_radius])
    place_low = np.array([place[0], place[1], picker_radius])
    pick_high = np.array([pick[0], pick[1], approach_height])
    place_high = np.array([place[0], place[1], approach_height])
    start = pick_high if start is None else np.asarray(start, dtype=np.float64)

    targets = {2: pick_high, 3: pick_low, 4: pick_high, 5: place_high, 6: place_low, 7: place_high}
    transit_speed = contact_speed * transit_multiplier
    waypoints = [Waypoint(0, start.copy(), "open", 1)]
    pos, gripper, t = start, "open", 0
    for k in PHASES[1:]:
        target = targets[k]
        speed = transit_speed if k in TRANSIT_PHASES else contact_speed
        n = phase_steps(float(np.linalg.norm(target - pos)), speed)
        for i in range(1, n + 1):
            t += 1
            point = target.copy() if i == n else pos + (target - pos) * (i / n)
            state = gripper
            if i == n and k == 3:
                state = "closed"
            elif i == n and k == 6:
                state = "open"
            waypoints.append(Waypoint(t, point, state, k))
        pos = target
        gripper = waypoints[-1].gripper
    return WaypointSchedule(tuple(waypoints))


@dataclass(frozen=True)
class PairedStep:
    timestep: int
    phase: int
    left: Waypoint
    right: Waypoint


def _pad_phase(steps: list[Waypoint], n: int, prior_gripper: str) -> list[Waypoint]:
    """Hold at the phase-end position; any gripper event stays on the final step."""
    missing = n - len(steps)
    if missing <= 0:
        return steps
    last = steps[-1]
    hold_state = steps[-2].gripper if len(steps) > 1 else prior_gripper
    holds = [Waypoint(last.timestep, last.position.copy(), hold_state, last.phase) for _ in range(missing)]
    return steps[:-1] + holds + [last]


def plan_bimanual(left: WaypointSchedule, right: WaypointSchedule) -> list[PairedStep]:
    """Phase-synchronized pairing of two single-picker schedules."""
    out: list[PairedStep] = []
    t = 0
    prior = {"left": "open", "right": "open"}
    for k in PHASES:
        lp, rp = left.phase(k), right.phase(k)
        if not lp or not rp:
            raise ValidationError(f"phase {k} missing from a schedule")
        n = max(len(lp), len(rp))
        lp = _pad_phase(lp, n, prior["left"])
        rp = _pad_phase(rp, n, prior["right"])
        for lw, rw in zip(lp, rp):
            out.append(PairedStep(t, k, lw, rw))
            t += 1
        prior = {"left": lp[-1].gripper, "right": rp[-1].gripper}
    return out


def schedule_lines(schedule: WaypointSchedule, picker: Optional[str] = None) -> list[dict]:
    rows = []
    for w in schedule.waypoints:
        d = w.to_dict()
        if picker is not None:
            d["picker"] = picker
        rows.append(d)
    return rows


def paired_lines(steps: list[PairedStep]) -> list[dict]:
    rows = []
    for s in steps:
        for picker, w in (("left", s.left), ("right", s.right)):
            rows.append(
                {
                    "timestep": s.timestep,
                    "phase": s.phase,
                    "picker": picker,
                    "position": [float(x) for x in w.position],
                    "gripper": w.gripper,
                }
            )
    return rows
