import itertools

import numpy as np
import pytest

from clothfold.annotation import AnnotatedAction, AnnotationRecord, HandPixels
from clothfold.segmentation import ActionSegment, HandAction
from clothfold.semantics import SemanticLabel
from clothfold.stats import dataset_stats, histogram_csv
from clothfold.templates import InstructionRecord


def make_action(start, pick, place, kind, text, hand="left", place_px=(10.0, 10.0)):
    ha = HandAction(hand, start, start + 10, (0,), (1,), [0, 0, 0], [0.5, 0, 0])
    seg = ActionSegment(**{hand: ha})
    return AnnotatedAction(
        seg,
        SemanticLabel(pick, sleeve_flag=kind == "sleeve"),
        SemanticLabel(place),
        InstructionRecord(kind, 0, text),
        {hand: HandPixels((5.0, 5.0), place_px)},
    )


def test_empty_input():
    rep = dataset_stats([])
    assert rep.total_actions == 0
    assert all(v == 0 for v in rep.demos.values())
    assert rep.fold_directions == {} and rep.unique_instructions_total == 0


def test_actions_per_sequence_histogram():
    recs = [
        AnnotationRecord(f"0000{n}_Skirt_0_0", "Skirt", [make_action(20 * i, "left", "right", "fold", "x") for i in range(n)])
        for n in (1, 2, 3)
    ]
    rep = dataset_stats(recs)
    assert rep.actions_per_sequence["Skirt"] == {1: 1, 2: 1, 3: 1}
    assert sum(rep.actions_per_sequence["Skirt"].values()) == 3
    assert rep.actions["Skirt"] == 6


def test_fold_direction_bookkeeping():
    rng = np.random.default_rng(0)
    labels = ["top", "bottom", "left", "right"]
    expected, recs = {}, []
    for s in range(20):
        acts = []
        for i in range(int(rng.integers(1, 4))):
            pick, place = rng.choice(labels, size=2, replace=False)
            key = f"{pick}->{place}"
            expected[key] = expected.get(key, 0) + 1
            acts.append(make_action(20 * i, pick, place, "fold", f"fold {key}"))
        acts.append(make_action(100, "top", "top", "refine", "refine top"))
        recs.append(AnnotationRecord(f"{s:05d}_Trousers_0_0", "Trousers", acts))
    rep = dataset_stats(recs)
    assert rep.fold_directions == expected
    assert rep.refinements["Trousers"] == 20
    assert rep.total_actions == sum(rep.actions.values()) == sum(len(r.actions) for r in recs)
    assert rep.unique_instructions["Trousers"] == len(expected) + 1
    shuffled = [recs[i] for i in rng.permutation(len(recs))]
    assert dataset_stats(shuffled).to_dict() == rep.to_dict()


def test_demo_and_mesh_counters_are_independent():
    recs = [
        AnnotationRecord("00001_Top_000000_000000", "Top", [make_action(0, "top", "bottom", "fold", "a")]),
        AnnotationRecord("00001_Top_000001_000000", "Top", [make_action(0, "top", "bottom", "fold", "a")]),
        AnnotationRecord("00002_Top_000000_000000", "Top", [make_action(0, "top", "bottom", "fold", "b")]),
    ]
    rep = dataset_stats(recs)
    assert rep.demos["Top"] == 3 and rep.meshes["Top"] == 2
    assert rep.unique_instructions["Top"] == 2


def test_first_sleeve_and_mask_distances():
    rec = AnnotationRecord(
        "00003_Tshirt_0_0",
        "Tshirt",
        [
            make_action(0, "right", "left", "sleeve", "s1", hand="right", place_px=(0.0, 3.0)),
            make_action(20, "left", "right", "sleeve", "s2", place_px=(0.0, 12.0)),
        ],
    )
    mask = np.zeros((20, 20), bool)
    mask[:, :2] = True
    rep = dataset_stats([rec], masks={"00003_Tshirt_0_0": mask})
    assert rep.first_sleeve_arm == {"left": 0, "right": 1}
    # distances 2 and 11 px with 5 px bins
    assert rep.mask_distance_histogram == {0.0: 1, 10.0: 1}


def test_histogram_csv():
    assert histogram_csv({2: 1, 1: 3}, "actions") == "actions,count\n1,3\n2,1\n"
