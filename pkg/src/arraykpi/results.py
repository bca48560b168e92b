"""CSV and JSON output of simulation results."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import config_to_mapping, serialize_config
from .montecarlo import METRICS, KpiDataset, ergodic_rates

__all__ = ["make_manifest", "write_cdf_csv", "write_results", "write_sweep"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def make_manifest(dataset: KpiDataset, wall_clock_s: float | None = None) -> dict:
    """Structured run summary; its ``config`` entry reproduces the run."""
    cfg = dataset.config
    mean_rate, sum_rate = ergodic_rates(dataset)
    return {
        "software": "arraykpi",
        "version": __version__,
        "config": config_to_mapping(cfg),
        "config_text": serialize_config(cfg),
        "master_seed": cfg.mc_seed,
        "wall_clock_s": wall_clock_s,
        "trials": int(dataset.served.shape[0]),
        "error_counts": dataset.error_counts(),
        "drop_probability": dataset.drop_probability,
        "served_fraction": dataset.served_fraction,
        "mean_ue_rate": mean_rate,
        "ergodic_sum_rate": sum_rate,
    }


def write_cdf_csv(path, dataset: KpiDataset, metric: str) -> Path:
    """Write ``sample,cdf`` rows for the distinct served samples of ``metric``."""
    path = Path(path)
    lines = ["sample,cdf"]
    samples = dataset.samples(metric)
    if samples.size:
        x, F = dataset.cdf(metric).steps()
        lines.extend(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, F))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None
    return path


def _ensure_dir(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out}: {exc.strerror}") from None
    return out


def write_results(dataset: KpiDataset, manifest: dict, out_dir, prefix: str = "") -> list:
    """Write one CSV per metric plus ``{prefix}manifest.json``; returns the paths."""
    out = _ensure_dir(out_dir)
    paths = [write_cdf_csv(out / f"{prefix}{m}.csv", dataset, m) for m in METRICS]
    mpath = out / f"{prefix}manifest.json"
    try:
        mpath.write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {mpath}: {exc.strerror}") from None
    return paths + [mpath]


def write_sweep(results: dict, out_dir, wall_clock_s: float | None = None) -> list:
    """Write ``{array}_{nodrop|drop}_{metric}.csv`` files and a combined manifest."""
    out = _ensure_dir(out_dir)
    paths = []
    runs = []
    for (name, dropping), ds in results.items():
        tag = f"{name}_{'drop' if dropping else 'nodrop'}"
        paths += [write_cdf_csv(out / f"{tag}_{m}.csv", ds, m) for m in METRICS]
        runs.append({"name": tag, **make_manifest(ds)})
    summary = {"software": "arraykpi", "version": __version__, "wall_clock_s": wall_clock_s, "runs": runs}
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(summary, indent=2, default=_json_default) + "\n")
    return paths + [mpath]


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
