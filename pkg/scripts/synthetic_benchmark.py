#!/usr/bin/env python3
"""End-to-end benchmark on synthetic ridge patterns.

Generates sinusoid patterns whose ridge period changes across a seam (the
ridge-count mismatch forces genuine minutiae there), runs the batch
pipeline twice (the first pass's detections become the second pass's
ground truth), and prints the aggregate scores plus a per-stage timing
breakdown.

Usage: python scripts/synthetic_benchmark.py [--out DIR] [--images N]
"""

import argparse
import json
import math
import tempfile
from pathlib import Path

import numpy as np

from fpenhance import io
from fpenhance import synthetic as syn
from fpenhance.pipeline import PipelineConfig, run_pipeline, write_report

SHAPE = (256, 256)


def seamed_pattern(period_a, period_b, seam_offset, theta=math.pi / 2):
    """Sinusoid whose inter-ridge period changes from `period_a` to
    `period_b` across a seam `seam_offset` pixels from the image center;
    the ridge-count mismatch forces minutiae along the seam. Returns the
    image and the matching per-pixel frequency map."""
    h, w = SHAPE
    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    t = cc * math.sin(theta) + rr * math.cos(theta)
    u = (cc - w / 2.0) * math.cos(theta) - (rr - h / 2.0) * math.sin(theta)
    side_a = u < seam_offset
    vals = np.where(side_a,
                    128.0 - 100.0 * np.cos(2.0 * math.pi * t / period_a),
                    128.0 - 100.0 * np.cos(2.0 * math.pi * t / period_b))
    img = np.clip(np.rint(vals), 0, 255).astype(np.uint8)
    freq = np.where(side_a, 1.0 / period_a, 1.0 / period_b)
    return img, freq


def build_dataset(root: Path, n_images: int, noise_sigma: float):
    rng = np.random.default_rng(0)
    items = []
    groups = ["Good", "Bad", "Ugly"]
    for i in range(n_images):
        period_a = int(rng.integers(5, 10))
        period_b = period_a + int(rng.integers(3, 5))
        theta = float(rng.uniform(0, math.pi))
        seam = float(rng.uniform(-SHAPE[0] * 0.15, SHAPE[0] * 0.15))
        img, freq = seamed_pattern(period_a, period_b, seam, theta)
        if noise_sigma:
            img = syn.add_noise(img, noise_sigma, seed=i)
        mask = np.zeros(SHAPE, bool)
        mask[12:-12, 12:-12] = True
        orient = np.full(SHAPE, theta % math.pi)
        fid = f"syn{i:03d}"
        io.write_image(root / f"{fid}.png", img)
        io.write_mask(root / f"{fid}_mask.png", mask)
        io.write_orientation(root / f"{fid}.ofd", orient.astype(np.float32))
        io.write_frequency(root / f"{fid}.fqm",
                           np.where(mask, freq, 0.0).astype(np.float32))
        items.append({
            "id": fid,
            "group": groups[i % len(groups)],
            "image": str(root / f"{fid}.png"),
            "mask": str(root / f"{fid}_mask.png"),
            "orient": str(root / f"{fid}.ofd"),
            "freq": str(root / f"{fid}.fqm"),
        })
    return items


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=None, help="output directory (default: temp)")
    ap.add_argument("--images", type=int, default=9)
    ap.add_argument("--noise", type=float, default=0.0,
                    help="gaussian noise sigma in gray levels")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--estimate-fields", action="store_true",
                    help="drop the exact field files and re-estimate from pixels")
    args = ap.parse_args()

    out = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="fpbench_"))
    out.mkdir(parents=True, exist_ok=True)
    data = out / "data"
    data.mkdir(exist_ok=True)
    items = build_dataset(data, args.images, args.noise)
    if args.estimate_fields:
        for item in items:
            item.pop("orient")
            item.pop("freq")

    config = PipelineConfig(threads=args.threads)
    pass1 = out / "pass1"
    report1, timings1, _ = run_pipeline(config, items, pass1)
    for item in items:
        item["gt"] = str(pass1 / f"{item['id']}.min")
    report2, timings2, _ = run_pipeline(config, items, out / "pass2")
    write_report(report2, out / "report.json")
    with open(out / "timings.json", "w", encoding="utf-8") as fh:
        json.dump(timings2, fh, indent=2, sort_keys=True)

    agg = report2["aggregate"]
    print(f"images: {args.images}  noise sigma: {args.noise}  "
          f"fields: {'estimated' if args.estimate_fields else 'exact'}")
    print(f"aggregate: TP={agg['tp']} FP={agg['fp']} FN={agg['fn']} "
          f"P={agg['precision']:.3f} R={agg['recall']:.3f} F1={agg['f1']:.3f}")
    for group, stats in sorted(report2.get("groups", {}).items()):
        print(f"  {group:>5}: F1={stats['f1']:.3f} "
              f"(TP={stats['tp']} FP={stats['fp']} FN={stats['fn']})")
    stage_totals = {}
    for per_stage in timings2.values():
        for stage, seconds in per_stage.items():
            stage_totals[stage] = stage_totals.get(stage, 0.0) + seconds
    print("mean per-image stage timings (ms):")
    for stage, total in sorted(stage_totals.items()):
        print(f"  {stage:>10}: {1000.0 * total / len(timings2):7.1f}")
    print(f"artifacts in {out}")


if __name__ == "__main__":
    main()
