"""Batch command-line front end."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .augment import AugmentSpec, Sample, augment
from .enhance import EnhanceOptions, enhance_contextual, gt_enhance
from .evalkit import MatchCriteria, exclude_boundary, sweep
from .fields import estimate_frequency, estimate_orientation
from .gabor import build_bank
from .minutiae import binarize, detect_minutiae, thin
from .pipeline import PipelineConfig, load_manifest, run_pipeline, write_report


def _parse_periods(text: str):
    if ":" in text:
        lo, hi = text.split(":")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(p) for p in text.split(","))


def _parse_values(text: str):
    parts = text.split(":")
    if len(parts) == 3:
        lo, hi, step = (float(p) for p in parts)
        n = int(round((hi - lo) / step)) + 1
        return [lo + i * step for i in range(n)]
    return [float(p) for p in text.split(",")]


def cmd_bank(args) -> int:
    bank = build_bank(args.orientations, _parse_periods(args.periods))
    out = Path(args.dump)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i, k in enumerate(bank.kernels):
        w = k.weights
        img = ((w - w.min()) / (w.max() - w.min()) * 255).round().astype(np.uint8)
        name = f"kernel_{i:03d}.png"
        io.write_image(out / name, img)
        manifest.append({"index": i, "file": name, "theta": k.theta,
                         "freq": k.freq, "sigma": k.sigma, "size": k.size})
    with open(out / "bank.json", "w", encoding="utf-8") as fh:
        json.dump({"orientations": list(bank.orientations),
                   "frequencies": list(bank.frequencies),
                   "kernels": manifest}, fh, indent=2)
    print(f"wrote {len(bank)} kernels to {out}")
    return 0


def _load_fields(args, image, mask):
    if args.orient:
        orient = io.read_orientation(args.orient).astype(float)
    else:
        orient = estimate_orientation(image, mask)
    if args.freq:
        freq = io.read_frequency(args.freq).astype(float)
    else:
        freq = estimate_frequency(image, mask, orient)
    return orient, freq


def cmd_enhance(args) -> int:
    image = io.read_image(args.input)
    mask = io.read_mask(args.mask)
    orient, freq = _load_fields(args, image, mask)
    bank = build_bank()
    opts = EnhanceOptions(output_mode=args.mode, threads=args.threads)
    enhanced = enhance_contextual(image, mask, orient, freq, bank, opts)
    io.write_image(args.out, (enhanced * 255).round().astype(np.uint8))
    return 0


def cmd_gt_enhance(args) -> int:
    skeleton = io.read_image(args.skeleton)
    mask = io.read_mask(args.mask)
    orient = io.read_orientation(args.orient).astype(float)
    freq = io.read_frequency(args.freq).astype(float)
    bank = build_bank()
    enhanced = gt_enhance(skeleton, orient, freq, mask, bank,
                          EnhanceOptions(output_mode=args.mode))
    io.write_image(args.out, (enhanced * 255).round().astype(np.uint8))
    return 0


def cmd_minutiae(args) -> int:
    enhanced = io.read_image(args.input).astype(float) / 255.0
    mask = io.read_mask(args.mask)
    skeleton = thin(binarize(enhanced, args.threshold))
    found = detect_minutiae(skeleton, mask, min_spur=args.min_spur)
    io.write_minutiae(args.out, found)
    print(f"{len(found)} minutiae -> {args.out}")
    return 0


def _collect_eval_sets(pred_dir, gt_dir, mask_dir, margin):
    pred_dir, gt_dir, mask_dir = Path(pred_dir), Path(gt_dir), Path(mask_dir)
    ids = sorted(p.stem for p in gt_dir.glob("*.min"))
    if not ids:
        raise SystemExit(f"no .min files in {gt_dir}")
    pred_sets, gt_sets = [], []
    for fid in ids:
        mask = io.read_mask(mask_dir / f"{fid}.png")
        pred = io.read_minutiae(pred_dir / f"{fid}.min")
        gt = io.read_minutiae(gt_dir / f"{fid}.min")
        pred_sets.append(exclude_boundary(pred, mask, margin))
        gt_sets.append(exclude_boundary(gt, mask, margin))
    return ids, pred_sets, gt_sets


def cmd_evaluate(args) -> int:
    from .evalkit import aggregate, evaluate_pair

    crit = MatchCriteria(args.td, math.radians(args.ttheta_deg), args.type)
    ids, pred_sets, gt_sets = _collect_eval_sets(args.pred, args.gt, args.mask, args.margin)
    groups = {}
    if args.groups:
        with open(args.groups, "r", encoding="utf-8") as fh:
            groups = json.load(fh)
    per_image = {}
    for fid, p, g in zip(ids, pred_sets, gt_sets):
        per_image[fid] = evaluate_pair(p, g, crit).as_dict()
        if fid in groups:
            per_image[fid]["group"] = groups[fid]
    report = {
        "criteria": {"tau_d": crit.tau_d, "tau_theta": crit.tau_theta,
                     "type_mode": crit.type_mode, "margin": args.margin},
        "aggregate": aggregate(pred_sets, gt_sets, crit).as_dict(),
        "per_image": per_image,
    }
    if groups:
        report["groups"] = {}
        for gname in sorted(set(groups.values())):
            sel = [i for i, fid in enumerate(ids) if groups.get(fid) == gname]
            report["groups"][gname] = aggregate(
                [pred_sets[i] for i in sel], [gt_sets[i] for i in sel], crit
            ).as_dict()
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    agg = report["aggregate"]
    print(f"TP={agg['tp']} FP={agg['fp']} FN={agg['fn']} "
          f"P={agg['precision']:.3f} R={agg['recall']:.3f} F1={agg['f1']:.3f}")
    return 0


def cmd_sweep(args) -> int:
    crit = MatchCriteria(args.td, math.radians(args.ttheta_deg), args.type)
    _, pred_sets, gt_sets = _collect_eval_sets(args.pred, args.gt, args.mask, args.margin)
    values = _parse_values(args.values)
    if args.axis == "ttheta":
        values = [math.radians(v) for v in values]
    curve = sweep(pred_sets, gt_sets, crit,
                  "tau_d" if args.axis == "td" else "tau_theta", values)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([args.axis, "tp", "fp", "fn", "precision", "recall", "f1"])
        for value, rep in curve:
            writer.writerow([value, rep.tp, rep.fp, rep.fn,
                             rep.precision, rep.recall, rep.f1])
    print(f"wrote {len(curve)} rows to {args.out}")
    return 0


def cmd_augment(args) -> int:
    in_dir, out_dir = Path(args.input), Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec_fields = {}
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            spec_fields = json.load(fh)
    for key in ("gamma_range", "contrast_range", "scratches", "abrasions"):
        if key in spec_fields:
            spec_fields[key] = tuple(spec_fields[key])
    spec = AugmentSpec(**spec_fields, seed=args.seed)
    skeleton_path = in_dir / "skeleton.png"
    sample = Sample(
        image=io.read_image(in_dir / "image.png"),
        mask=io.read_mask(in_dir / "mask.png"),
        orient=io.read_orientation(in_dir / "orient.ofd").astype(float),
        freq=io.read_frequency(in_dir / "freq.fqm").astype(float),
        skeleton=io.read_image(skeleton_path) if skeleton_path.exists() else None,
    )
    out = augment(sample, spec)
    io.write_image(out_dir / "image.png", out.image)
    io.write_mask(out_dir / "mask.png", out.mask)
    io.write_orientation(out_dir / "orient.ofd", out.orient)
    io.write_frequency(out_dir / "freq.fqm", out.freq)
    if out.skeleton is not None:
        io.write_image(out_dir / "skeleton.png", out.skeleton)
    return 0


def cmd_run(args) -> int:
    config_fields = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config_fields = json.load(fh)
    if args.threads is not None:
        config_fields["threads"] = args.threads
    config = PipelineConfig.from_dict(config_fields)
    items = load_manifest(args.manifest)
    if not items:
        print("error: no inputs", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report, timings, code = run_pipeline(config, items, out_dir)
    write_report(report, out_dir / "report.json")
    with open(out_dir / "timings.json", "w", encoding="utf-8") as fh:
        json.dump(timings, fh, indent=2, sort_keys=True)
    if "aggregate" in report:
        agg = report["aggregate"]
        print(f"aggregate: P={agg['precision']:.3f} R={agg['recall']:.3f} "
              f"F1={agg['f1']:.3f}")
    errors = [r for r in report["per_image"] if "error" in r]
    for r in errors:
        print(f"error: {r['id']}: {r['error']}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpenhance")
    parser.add_argument(
        "--version", action="version",
        version=f"fpenhance {__version__} (config {PipelineConfig().fingerprint()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bank", help="dump the Gabor filter bank")
    p.add_argument("--dump", required=True)
    p.add_argument("--orientations", type=int, default=16)
    p.add_argument("--periods", default="5:13")
    p.set_defaults(func=cmd_bank)

    p = sub.add_parser("enhance", help="enhance a fingerprint image")
    p.add_argument("--input", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--orient")
    p.add_argument("--freq")
    p.add_argument("--mode", choices=["binary", "response"], default="binary")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("gt-enhance", help="enhanced image from a ridge skeleton")
    p.add_argument("--skeleton", required=True)
    p.add_argument("--orient", required=True)
    p.add_argument("--freq", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--mode", choices=["binary", "response"], default="binary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gt_enhance)

    p = sub.add_parser("minutiae", help="extract minutiae from an enhanced image")
    p.add_argument("--input", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--min-spur", type=int, default=8)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_minutiae)

    p = sub.add_parser("evaluate", help="match predicted vs ground-truth minutiae")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--td", type=float, default=14.0)
    p.add_argument("--ttheta-deg", type=float, default=20.0)
    p.add_argument("--type", choices=["exact", "agnostic"], default="exact")
    p.add_argument("--margin", type=float, default=14.0)
    p.add_argument("--groups", help="JSON mapping image id -> quality group")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="threshold sweep curves")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--axis", choices=["td", "ttheta"], required=True)
    p.add_argument("--values", required=True, help="lo:hi:step or comma list")
    p.add_argument("--td", type=float, default=14.0)
    p.add_argument("--ttheta-deg", type=float, default=20.0)
    p.add_argument("--type", choices=["exact", "agnostic"], default="exact")
    p.add_argument("--margin", type=float, default=14.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("augment", help="augment a sample directory")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--spec", help="JSON file with AugmentSpec fields")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("run", help="run the full pipeline over a manifest")
    p.add_argument("--config", help="JSON file with PipelineConfig fields")
    p.add_argument("--manifest", required=True)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
