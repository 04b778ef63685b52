"""Command-line entry point: ``clothfold <subcommand>``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from clothfold.annotation import gt_pixels, parse_annotation, write_annotation
from clothfold.camera import round_pixel
from clothfold.config import ConfigError, PipelineConfig, load_config
from clothfold.errors import ClothfoldError
from clothfold.heatmaps import gaussian_heatmap
from clothfold.metrics import (
    MetricReport,
    ap_at,
    error_mm,
    iou,
    iou_success,
    kp_error,
    quantile,
    vertex_error,
    vertex_success,
)
from clothfold.pipeline import SequenceDropped, annotate_sequence, max_divergence
from clothfold.primitive import paired_lines, plan_bimanual, plan_pick_place, schedule_lines
from clothfold.records import dumps_canonical, read_heatmap, read_sequence, write_heatmap
from clothfold.stats import dataset_stats, histogram_csv
from clothfold.templates import TEMPLATE_BANK_ENV, load_bank

log = logging.getLogger("clothfold")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _floats(text: str, n: int) -> tuple:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return tuple(parts)


def point3(text):
    return _floats(text, 3)


def pixel2(text):
    return _floats(text, 2)


def shape2(text):
    return tuple(int(x) for x in _floats(text, 2))


def _emit(data: bytes, output) -> None:
    if output is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_bytes(data)


def _sequence_files(input_dir) -> list[Path]:
    return sorted(Path(input_dir).glob("*.json"))


# -- annotate / filter -------------------------------------------------------


def _annotate_one(args):
    path, cfg, output = args
    bank = load_bank(cfg.template_bank)
    try:
        record = read_sequence(path)
    except (OSError, ClothfoldError) as exc:
        return {"file": path.name, "error": str(exc)}
    try:
        result = annotate_sequence(record, cfg, bank)
    except SequenceDropped as exc:
        return {"file": path.name, "sequence_id": record.sequence_id, "reason": exc.reason, "detail": exc.detail}
    except ClothfoldError as exc:
        return {"file": path.name, "sequence_id": record.sequence_id, "reason": "error", "detail": str(exc)}
    ann_dir = output / "annotations"
    ann_dir.mkdir(parents=True, exist_ok=True)
    (ann_dir / f"{record.sequence_id}.json").write_bytes(write_annotation(result.record))
    if result.targets:
        tdir = output / "targets" / record.sequence_id
        tdir.mkdir(parents=True, exist_ok=True)
        for name, h in sorted(result.targets.items()):
            write_heatmap(h, tdir / name)
    return {
        "file": path.name,
        "sequence_id": record.sequence_id,
        "kept": True,
        "actions": len(result.record.actions),
        "skipped_actions": result.skipped_actions,
    }


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _manifest(results: list[dict]) -> tuple[dict, int]:
    kept = [r for r in results if r.get("kept")]
    dropped = [r for r in results if "reason" in r]
    errors = [r for r in results if "error" in r]
    manifest = {
        "kept": [
            {"sequence_id": r["sequence_id"], "actions": r["actions"], "skipped_actions": r["skipped_actions"]}
            for r in kept
        ],
        "dropped": [{"sequence_id": r["sequence_id"], "reason": r["reason"], "detail": r["detail"]} for r in dropped],
        "errors": [{"file": r["file"], "error": r["error"]} for r in errors],
    }
    for r in errors:
        log.error("%s: %s", r["file"], r["error"])
    status = EXIT_OK
    if errors:
        status = EXIT_PARTIAL
    return manifest, status


def cmd_annotate(args, cfg: PipelineConfig) -> int:
    files = _sequence_files(args.input)
    if not files:
        log.error("no sequence files in %s", args.input)
        return EXIT_PARTIAL
    output = Path(args.output or "annotations_out")
    output.mkdir(parents=True, exist_ok=True)
    results = _map(_annotate_one, [(f, cfg, output) for f in files], args.jobs)
    manifest, status = _manifest(results)
    (output / "manifest.json").write_bytes(dumps_canonical(manifest))
    log.info("kept %d, dropped %d, errors %d", len(manifest["kept"]), len(manifest["dropped"]), len(manifest["errors"]))
    return status


def _filter_one(args):
    path, cfg = args
    try:
        record = read_sequence(path)
    except (OSError, ClothfoldError) as exc:
        return {"file": path.name, "error": str(exc)}
    ratio, t = max_divergence(record)
    entry = {"file": path.name, "sequence_id": record.sequence_id, "max_ratio": ratio, "frame": t}
    if ratio > cfg.thresholds.divergence_ratio:
        entry.update(reason="divergent", detail=f"edge z-score ratio {ratio:.4g} at t={t}")
    return entry


def cmd_filter(args, cfg: PipelineConfig) -> int:
    files = _sequence_files(args.input)
    results = _map(_filter_one, [(f, cfg) for f in files], args.jobs)
    doc = {
        "threshold": cfg.thresholds.divergence_ratio,
        "kept": [r["sequence_id"] for r in results if "sequence_id" in r and "reason" not in r],
        "dropped": [
            {"sequence_id": r["sequence_id"], "reason": r["reason"], "detail": r["detail"]}
            for r in results
            if "reason" in r
        ],
        "errors": [{"file": r["file"], "error": r["error"]} for r in results if "error" in r],
    }
    out = None if args.output is None else Path(args.output) / "filter_manifest.json"
    _emit(dumps_canonical(doc), out)
    return EXIT_PARTIAL if doc["errors"] else EXIT_OK


# -- targets -----------------------------------------------------------------


def cmd_targets(args, cfg: PipelineConfig) -> int:
    sigma2 = args.sigma2 if args.sigma2 is not None else cfg.thresholds.sigma2
    shape = args.shape or tuple(cfg.image_size)
    if args.annotation:
        rec = parse_annotation(Path(args.annotation).read_bytes())
        out = Path(args.output or ".") / rec.sequence_id
        out.mkdir(parents=True, exist_ok=True)
        for i, act in enumerate(rec.actions):
            for which in ("pick", "place"):
                write_heatmap(gaussian_heatmap(gt_pixels(act, which), shape, sigma2), out / f"a{i:02d}_{which}")
        return EXIT_OK
    if not args.center:
        log.error("targets needs --center or --annotation")
        return EXIT_CONFIG
    stem = Path(args.output or "target")
    stem.parent.mkdir(parents=True, exist_ok=True)
    write_heatmap(gaussian_heatmap(args.center, shape, sigma2), stem)
    return EXIT_OK


# -- eval --------------------------------------------------------------------


def _load_annotations(path) -> dict:
    p = Path(path)
    files = sorted(p.glob("*.json")) if p.is_dir() else [p]
    recs = {}
    for f in files:
        rec = parse_annotation(f.read_bytes())
        recs[rec.sequence_id] = rec
    return recs


def _mask_from(ref, base: Path) -> np.ndarray:
    if isinstance(ref, str):
        return read_heatmap(base / ref) != 0
    return np.asarray(ref, dtype=bool)


def evaluate(predictions: dict, annotations: dict, cfg: PipelineConfig, base: Path, squared: bool = False) -> dict:
    """Score a predictions document (see README) against annotation records."""
    preds, gts, quantiles = [], [], []
    for entry in predictions.get("keypoints", []):
        act = annotations[entry["sequence_id"]].actions[entry["action"]]
        for which in ("pick", "place"):
            gt = gt_pixels(act, which)
            for px in entry.get(which, []):
                preds.append(px)
                gts.append(gt)
            hm = entry.get(f"{which}_heatmap")
            if hm is not None:
                quantiles.append(quantile(read_heatmap(base / hm), [round_pixel(g) for g in gt]))
    report = MetricReport()
    if preds:
        report.ap = {t: ap_at(preds, gts, t) for t in cfg.ap_thresholds}
        report.kp_error_px = kp_error(preds, gts, squared=squared)
    if quantiles:
        report.quantile_pct = float(np.mean(quantiles))

    meshes = []
    for pair in predictions.get("meshes", []):
        err = vertex_error(pair["predicted"], pair["target"])
        meshes.append(
            {
                "vertex_error_m": err,
                "error_mm": error_mm(pair["predicted"], pair["target"]),
                "success_vertex": vertex_success(err, cfg.thresholds.vertex_success),
            }
        )
    masks = []
    for pair in predictions.get("masks", []):
        value = iou(_mask_from(pair["predicted"], base), _mask_from(pair["target"], base))
        masks.append({"iou": value, "success_iou80": iou_success(value, cfg.thresholds.iou_success)})

    if meshes:
        report.vertex_error_m = float(np.mean([m["vertex_error_m"] for m in meshes]))
        report.success_vertex = vertex_success(report.vertex_error_m, cfg.thresholds.vertex_success)
    if masks:
        report.iou = float(np.mean([m["iou"] for m in masks]))
        report.success_iou80 = iou_success(report.iou, cfg.thresholds.iou_success)
    summary = report.to_dict()
    summary["num_keypoints"] = len(preds)
    if meshes:
        summary["error_mm"] = report.vertex_error_m * 1000.0
        summary["success_vertex_rate"] = 100.0 * np.mean([m["success_vertex"] for m in meshes])
    if masks:
        summary["success_iou80_rate"] = 100.0 * np.mean([m["success_iou80"] for m in masks])
    return {"summary": summary, "meshes": meshes, "masks": masks}


def cmd_eval(args, cfg: PipelineConfig) -> int:
    predictions = json.loads(Path(args.predictions).read_text(encoding="utf-8"))
    annotations = _load_annotations(args.annotations) if args.annotations else {}
    result = evaluate(predictions, annotations, cfg, Path(args.predictions).parent, args.squared)
    out = None if args.output is None else Path(args.output)
    if out is not None and (out.is_dir() or not out.suffix):
        out = out / "metrics.json"
    _emit(dumps_canonical(result), out)
    return EXIT_OK


# -- primitive ---------------------------------------------------------------


def cmd_primitive(args, cfg: PipelineConfig) -> int:
    kw = dict(picker_radius=args.radius, approach_height=args.approach, contact_speed=args.speed)
    if args.left or args.right:
        if not (args.left and args.right):
            log.error("bimanual mode needs both --left and --right")
            return EXIT_CONFIG
        left = plan_pick_place(args.left[0], args.left[1], **kw)
        right = plan_pick_place(args.right[0], args.right[1], **kw)
        rows = paired_lines(plan_bimanual(left, right))
    else:
        if args.pick is None or args.place is None:
            log.error("primitive needs --pick and --place (or --left and --right)")
            return EXIT_CONFIG
        rows = schedule_lines(plan_pick_place(args.pick, args.place, **kw))
    text = "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)
    out = None if args.output is None else Path(args.output)
    if out is not None and (out.is_dir() or not out.suffix):
        out = out / "schedule.jsonl"
    _emit(text.encode("utf-8"), out)
    return EXIT_OK


# -- stats -------------------------------------------------------------------


def cmd_stats(args, cfg: PipelineConfig) -> int:
    records = list(_load_annotations(args.input).values())
    masks = None
    if args.masks:
        masks = {}
        for header in sorted(Path(args.masks).glob("*.json")):
            masks[header.stem] = read_heatmap(header) != 0
    report = dataset_stats(records, masks, bin_width=args.bin_width)
    out_dir = None if args.output is None else Path(args.output)
    _emit(dumps_canonical(report.to_dict()), None if out_dir is None else out_dir / "stats.json")
    if args.csv and out_dir is not None:
        for g, hist in report.actions_per_sequence.items():
            (out_dir / f"actions_per_sequence_{g}.csv").write_text(histogram_csv(hist, "actions"))
        (out_dir / "fold_directions.csv").write_text(histogram_csv(report.fold_directions, "fold"))
        if report.mask_distance_histogram:
            (out_dir / "mask_distance.csv").write_text(histogram_csv(report.mask_distance_histogram, "distance_px"))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config JSON")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--output", help="output directory or file")
    common.add_argument("--template-bank", help="custom template bank file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="clothfold", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", parents=[common], help="annotate a directory of sequences")
    p.add_argument("input", help="directory of sequence JSON files")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("filter", parents=[common], help="report divergent sequences")
    p.add_argument("input")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("targets", parents=[common], help="write Gaussian target heatmaps")
    p.add_argument("--center", type=pixel2, action="append", help="row,col (repeatable)")
    p.add_argument("--shape", type=shape2, help="H,W")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--annotation", help="annotation record; writes pick/place targets per action")
    p.set_defaults(func=cmd_targets)

    p = sub.add_parser("eval", parents=[common], help="score predictions")
    p.add_argument("--predictions", required=True)
    p.add_argument("--annotations", help="annotation file or directory")
    p.add_argument("--squared", action="store_true", help="report mean squared pixel error")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("primitive", parents=[common], help="plan a pick-and-place waypoint schedule")
    p.add_argument("--pick", type=point3)
    p.add_argument("--place", type=point3)
    p.add_argument("--left", type=point3, nargs=2, metavar=("PICK", "PLACE"))
    p.add_argument("--right", type=point3, nargs=2, metavar=("PICK", "PLACE"))
    p.add_argument("--radius", type=float, default=0.00625)
    p.add_argument("--approach", type=float, default=0.15)
    p.add_argument("--speed", type=float, default=0.005)
    p.set_defaults(func=cmd_primitive)

    p = sub.add_parser("stats", parents=[common], help="dataset statistics over annotation records")
    p.add_argument("input", help="directory of annotation records")
    p.add_argument("--masks", help="directory of per-sequence masks in heatmap format")
    p.add_argument("--bin-width", type=float, default=5.0)
    p.add_argument("--csv", action="store_true", help="also write CSV histograms to --output")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.seed)
        # precedence: --template-bank, then the environment, then the config file
        bank_path = args.template_bank or os.environ.get(TEMPLATE_BANK_ENV) or cfg.template_bank
        if bank_path is not None:
            cfg = dataclasses.replace(cfg, template_bank=str(bank_path))
        load_bank(cfg.template_bank)
    except (ConfigError, ClothfoldError, OSError) as exc:
        log.error("invalid config: %s", exc)
        return EXIT_CONFIG
    try:
        return args.func(args, cfg)
    except ClothfoldError as exc:
        log.error("%s", exc)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
