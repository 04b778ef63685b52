"""Dataset-level counts and histograms over annotation records."""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from clothfold.annotation import AnnotationRecord
from clothfold.camera import mask_distance
from clothfold.records import GARMENT_CATEGORIES


def mesh_id(sequence_id: str) -> str:
    """Mesh identifier: the leading field of ``<mesh>_<Garment>_<...>`` sequence ids."""
    return sequence_id.split("_", 1)[0]


@dataclass
class StatsReport:
    demos: dict = field(default_factory=dict)
    meshes: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    unique_instructions: dict = field(default_factory=dict)
    unique_instructions_total: int = 0
    actions_per_sequence: dict = field(default_factory=dict)
    fold_directions: dict = field(default_factory=dict)
    refinements: dict = field(default_factory=dict)
    first_sleeve_arm: dict = field(default_factory=dict)
    mask_distance_histogram: dict = field(default_factory=dict)

    @property
    def total_actions(self) -> int:
        return sum(self.actions.values())

    def to_dict(self) -> dict:
        return {
            "demos": self.demos,
            "meshes": self.meshes,
            "actions": self.actions,
            "unique_instructions": self.unique_instructions,
            "unique_instructions_total": self.unique_instructions_total,
            "actions_per_sequence": {
                g: {str(k): v for k, v in sorted(h.items())} for g, h in self.actions_per_sequence.items()
            },
            "fold_directions": dict(sorted(self.fold_directions.items())),
            "refinements": self.refinements,
            "first_sleeve_arm": self.first_sleeve_arm,
            "mask_distance_histogram": {str(k): v for k, v in sorted(self.mask_distance_histogram.items())},
        }


def _histogram_key(distance: float, bin_width: float) -> float:
    return float(int(distance // bin_width) * bin_width)


def dataset_stats(
    records: list[AnnotationRecord],
    masks: Optional[dict] = None,
    bin_width: float = 5.0,
) -> StatsReport:
    """Aggregate counts per garment category.

    ``masks`` optionally maps ``sequence_id`` to a cloth mask; each hand's place
    pixel then contributes its distance to that mask to the histogram, binned by
    ``bin_width`` pixels (key = bin lower edge).
    """
    zero = {g: 0 for g in GARMENT_CATEGORIES}
    demos, actions, refinements = dict(zero), dict(zero), dict(zero)
    meshes = defaultdict(set)
    texts = defaultdict(set)
    per_seq = {"all": Counter(), **{g: Counter() for g in GARMENT_CATEGORIES}}
    folds = Counter()
    sleeve_first = Counter()
    dist_hist = Counter()

    for rec in records:
        g = rec.garment_category
        demos[g] += 1
        meshes[g].add(mesh_id(rec.sequence_id))
        actions[g] += len(rec.actions)
        per_seq[g][len(rec.actions)] += 1
        per_seq["all"][len(rec.actions)] += 1
        first_sleeve = None
        for act in rec.actions:
            texts[g].add(act.instruction.text)
            kind = act.instruction.kind
            if kind == "fold":
                folds[f"{act.pick.text}->{act.place.text}"] += 1
            elif kind == "refine":
                refinements[g] += 1
            elif kind == "sleeve" and first_sleeve is None:
                first_sleeve = act.pick.text
            if masks is not None and rec.sequence_id in masks:
                for hp in act.pixels.values():
                    dist_hist[_histogram_key(mask_distance(hp.place, masks[rec.sequence_id]), bin_width)] += 1
        if first_sleeve is not None:
            sleeve_first[first_sleeve] += 1

    return StatsReport(
        demos=demos,
        meshes={g: len(meshes[g]) for g in GARMENT_CATEGORIES},
        actions=actions,
        unique_instructions={g: len(texts[g]) for g in GARMENT_CATEGORIES},
        unique_instructions_total=len(set().union(*texts.values())) if texts else 0,
        actions_per_sequence={g: dict(c) for g, c in per_seq.items()},
        fold_directions=dict(folds),
        refinements=refinements,
        first_sleeve_arm={"left": sleeve_first["left"], "right": sleeve_first["right"]},
        mask_distance_histogram=dict(dist_hist),
    )


def histogram_csv(hist: dict, key_name: str = "bin") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([key_name, "count"])
    for k, v in sorted(hist.items()):
        w.writerow([k, v])
    return buf.getvalue()
