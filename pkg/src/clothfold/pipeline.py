"""Per-sequence annotation: filter, segment, label, describe, project, build targets."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from clothfold.annotation import AnnotatedAction, AnnotationRecord, HandPixels, gt_pixels
from clothfold.camera import annotate_pixels
from clothfold.config import PipelineConfig
from clothfold.errors import NoValidCameraError, UnresolvableLocationError
from clothfold.geometry import divergence_ratio
from clothfold.heatmaps import gaussian_heatmap
from clothfold.records import SequenceRecord
from clothfold.segmentation import ActionSegment, segment_sequence
from clothfold.semantics import hand_pick_region, hand_place_region, resolve_location
from clothfold.templates import TemplateBank, classify_action, derive_seed, instantiate

log = logging.getLogger(__name__)


class SequenceDropped(Exception):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


@dataclass
class SequenceResult:
    record: AnnotationRecord
    targets: dict = field(default_factory=dict)
    skipped_actions: list = field(default_factory=list)


def max_divergence(record: SequenceRecord) -> tuple[float, int]:
    """Largest sim/NOCS divergence ratio over all frames and the frame index where it occurs."""
    nocs = record.nocs_mesh
    worst, at = -1.0, record.frames[0].t
    for i, fr in enumerate(record.frames):
        ratio = divergence_ratio(record.frame_mesh(i), nocs)
        if ratio > worst:
            worst, at = ratio, fr.t
    return worst, at


def check_divergence(record: SequenceRecord, threshold: float) -> None:
    ratio, t = max_divergence(record)
    if ratio > threshold:
        raise SequenceDropped("divergent", f"edge z-score ratio {ratio:.4g} at t={t}")


def _label_segment(record: SequenceRecord, seg: ActionSegment, cfg: PipelineConfig):
    nocs = record.nocs_mesh
    index_of = {fr.t: i for i, fr in enumerate(record.frames)}
    regions = {}
    for ha in seg.hands:
        start_mesh = record.frame_mesh(index_of[ha.start_frame])
        regions[ha.hand] = {
            "pick": hand_pick_region(ha, nocs, cfg.axes),
            "place": hand_place_region(ha, start_mesh, nocs, cfg.axes),
        }
    # a single picker agrees with itself on both axes
    left = regions.get("left", regions.get("right"))
    right = regions.get("right", regions.get("left"))
    garment = record.garment_category
    pick = resolve_location(left["pick"], right["pick"], "pick", garment)
    place = resolve_location(left["place"], right["place"], "place", garment, s_pick=pick)
    return pick, place, regions


def annotate_sequence(record: SequenceRecord, cfg: PipelineConfig, bank: TemplateBank) -> SequenceResult:
    """Run the full annotation chain on one sequence.

    Raises ``SequenceDropped`` when the sequence is filtered out as a whole.
    """
    check_divergence(record, cfg.thresholds.divergence_ratio)
    segments = segment_sequence(record, cfg.thresholds.spurious_frames, cfg.thresholds.spurious_distance)
    if not segments:
        raise SequenceDropped("no actions", "no pick-and-place survived filtering")

    labelled, skipped = [], []
    for i, seg in enumerate(segments):
        try:
            labelled.append((seg, *_label_segment(record, seg, cfg)))
        except UnresolvableLocationError as exc:
            skipped.append({"start_frame": seg.start_frame, "reason": "unresolvable location", "detail": str(exc)})
    if not labelled:
        raise SequenceDropped("no actions", "every action had an unresolvable location")

    points = [p for seg, *_ in labelled for ha in seg.hands for p in (ha.pick_point, ha.place_point)]
    center = record.frames[0].cloth_vertices.mean(axis=0)
    rng = np.random.default_rng(derive_seed(cfg.seed, "camera/" + record.sequence_id))
    try:
        camera, pixels = annotate_pixels(points, rng, center, cfg.sampler())
    except NoValidCameraError as exc:
        raise SequenceDropped("no valid camera", str(exc)) from None

    garment_text = bank.garment_name(record.garment_category, cfg.capitalize_garment)
    actions, targets, k = [], {}, 0
    for idx, (seg, pick, place, regions) in enumerate(labelled):
        hand_px = {}
        for ha in seg.hands:
            hand_px[ha.hand] = HandPixels(tuple(pixels[k]), tuple(pixels[k + 1]))
            k += 2
        single = None if seg.arm_usage == "bimanual" else seg.hands[0].hand
        kind = classify_action(pick, place)
        instruction = instantiate(
            bank, kind, garment_text, pick, place, single, derive_seed(cfg.seed, record.sequence_id, idx)
        )
        act = AnnotatedAction(seg, pick, place, instruction, hand_px, regions)
        actions.append(act)
        if cfg.write_heatmaps:
            for which in ("pick", "place"):
                targets[f"a{idx:02d}_{which}"] = gaussian_heatmap(
                    gt_pixels(act, which), cfg.image_size, cfg.thresholds.sigma2
                )
    rec = AnnotationRecord(record.sequence_id, record.garment_category, actions, camera)
    return SequenceResult(rec, targets, skipped)
