"""Batch pipeline: load -> estimate or load fields -> enhance -> extract
minutiae -> exclude boundary -> match against ground truth -> aggregate.

Reports are deterministic (byte-identical across reruns and thread counts);
wall-clock timings go to a separate structure so they never perturb the
report.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import io
from .enhance import EnhanceOptions, enhance_contextual
from .evalkit import EvalReport, MatchCriteria, exclude_boundary, match_minutiae, prf1
from .fields import FrequencyParams, OrientationParams, estimate_frequency, estimate_orientation
from .gabor import build_bank
from .minutiae import binarize, detect_minutiae, thin


@dataclass(frozen=True)
class PipelineConfig:
    orientation_count: int = 16
    periods: tuple[int, ...] = tuple(range(5, 14))
    gradient_window: int = 33
    coherence_floor: float = 0.1
    freq_window_length: int = 64
    min_period: int = 5
    max_period: int = 13
    output_mode: str = "binary"
    binarize_threshold: float = 0.5
    min_spur: int = 8
    tau_d: float = 14.0
    tau_theta: float = math.pi / 9.0
    type_mode: str = "exact"
    margin: float = 14.0
    threads: int = 1

    def __post_init__(self):
        # re-validate embedded parameters through their owning types
        self.orientation_params()
        self.frequency_params()
        self.criteria()
        EnhanceOptions(output_mode=self.output_mode, threads=self.threads)
        if self.margin < 0:
            raise ValueError("margin must be >= 0")

    def orientation_params(self) -> OrientationParams:
        return OrientationParams(self.gradient_window, self.coherence_floor)

    def frequency_params(self) -> FrequencyParams:
        return FrequencyParams(self.freq_window_length, self.min_period, self.max_period)

    def criteria(self) -> MatchCriteria:
        return MatchCriteria(self.tau_d, self.tau_theta, self.type_mode)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["periods"] = list(self.periods)
        return d

    def fingerprint(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        if "periods" in d:
            d["periods"] = tuple(d["periods"])
        return cls(**d)


def load_manifest(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    items = data if isinstance(data, list) else data.get("items")
    if not isinstance(items, list):
        raise ValueError(f"{path}: manifest must contain an 'items' list")
    for item in items:
        if "id" not in item or "image" not in item or "mask" not in item:
            raise ValueError(f"{path}: manifest items need 'id', 'image', 'mask'")
    return items


def process_item(item: dict, config: PipelineConfig, bank, out_dir: Path | None):
    """Run one fingerprint through the pipeline; returns (result, timings)."""
    timings = {}
    t0 = time.perf_counter()
    image = io.read_image(item["image"])
    mask = io.read_mask(item["mask"])
    timings["load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if item.get("orient"):
        orient = io.read_orientation(item["orient"]).astype(float)
    else:
        orient = estimate_orientation(image, mask, config.orientation_params())
    if item.get("freq"):
        freq = io.read_frequency(item["freq"]).astype(float)
    else:
        freq = estimate_frequency(image, mask, orient, config.frequency_params())
    timings["fields"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    opts = EnhanceOptions(output_mode=config.output_mode, threads=1)
    enhanced = enhance_contextual(image, mask, orient, freq, bank, opts)
    timings["enhance"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    skeleton = thin(binarize(enhanced, config.binarize_threshold))
    pred = detect_minutiae(skeleton, mask, min_spur=config.min_spur)
    pred = exclude_boundary(pred, mask, config.margin)
    timings["minutiae"] = time.perf_counter() - t0

    result = {"id": item["id"], "group": item.get("group"), "minutiae": len(pred)}
    if out_dir is not None:
        t0 = time.perf_counter()
        io.write_image(out_dir / f"{item['id']}_enhanced.png",
                       (enhanced * 255).round().astype("uint8"))
        io.write_minutiae(out_dir / f"{item['id']}.min", pred)
        timings["write"] = time.perf_counter() - t0

    if item.get("gt"):
        t0 = time.perf_counter()
        gt = exclude_boundary(io.read_minutiae(item["gt"]), mask, config.margin)
        pairs, up, ug = match_minutiae(pred, gt, config.criteria())
        timings["evaluate"] = time.perf_counter() - t0
        result["counts"] = {"tp": len(pairs), "fp": len(up), "fn": len(ug)}
        result["report"] = prf1(len(pairs), len(up), len(ug)).as_dict()
    return result, timings


def _aggregate_counts(results) -> EvalReport:
    tp = sum(r["counts"]["tp"] for r in results)
    fp = sum(r["counts"]["fp"] for r in results)
    fn = sum(r["counts"]["fn"] for r in results)
    return prf1(tp, fp, fn)


def run_pipeline(config: PipelineConfig, manifest_items, out_dir=None):
    """Returns (report, timings, exit_code). Per-file failures are recorded
    and skipped; the exit code is nonzero only if every file fails."""
    items = list(manifest_items)
    if not items:
        raise ValueError("no inputs")
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    bank = build_bank(config.orientation_count, config.periods)

    def safe(item):
        t0 = time.perf_counter()
        try:
            result, timings = process_item(item, config, bank, out_dir)
        except Exception as exc:  # noqa: BLE001 - per-file isolation
            return {"id": item.get("id"), "error": str(exc)}, {}
        timings["total"] = time.perf_counter() - t0
        return result, timings

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as ex:
            outcomes = list(ex.map(safe, items))
    else:
        outcomes = [safe(item) for item in items]
    outcomes.sort(key=lambda o: str(o[0].get("id")))
    results = [r for r, _ in outcomes]
    timings = {r["id"]: t for (r, t) in outcomes if t}
    ok = [r for r in results if "error" not in r]
    evaluated = [r for r in ok if "counts" in r]

    report = {
        "config": config.as_dict(),
        "config_fingerprint": config.fingerprint(),
        "per_image": results,
    }
    if evaluated:
        report["aggregate"] = _aggregate_counts(evaluated).as_dict()
        groups = sorted({r["group"] for r in evaluated if r.get("group")})
        if groups:
            report["groups"] = {
                g: _aggregate_counts([r for r in evaluated if r.get("group") == g]).as_dict()
                for g in groups
            }
    exit_code = 1 if not ok else 0
    return report, timings, exit_code


def write_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
