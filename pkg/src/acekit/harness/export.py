"""Writing summaries, histograms, datasets and estimates to disk."""

from __future__ import annotations

import re
from pathlib import Path

import pandas as pd
from loguru import logger

from acekit.core.models import Dataset, McSummary

SUMMARY_COLUMNS = ["estimator", "mean", "sd", "mse", "successes", "failures"]


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def summary_frame(summary: McSummary, decimals: int = 4) -> pd.DataFrame:
    """One row per estimator, moments rounded to ``decimals``."""
    rows = [
        {
            "estimator": item.name,
            "mean": None if item.mean is None else round(item.mean, decimals),
            "sd": None if item.sd is None else round(item.sd, decimals),
            "mse": None if item.mse is None else round(item.mse, decimals),
            "successes": item.successes,
            "failures": item.failures,
        }
        for item in summary.estimators
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def write_summary(summary: McSummary, out_dir: Path, decimals: int = 4) -> list[Path]:
    """Write summary.json (full precision), summary.csv (rounded) and one histogram per estimator."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "summary.json"
    path.write_text(summary.model_dump_json(indent=2) + "\n")
    written.append(path)

    path = out_dir / "summary.csv"
    summary_frame(summary, decimals).to_csv(path, index=False, lineterminator="\n")
    written.append(path)

    for item in summary.estimators:
        path = out_dir / f"hist_{_safe_name(item.name)}.csv"
        frame = pd.DataFrame(
            [entry.model_dump() for entry in item.histogram],
            columns=["bin_left", "bin_right", "count"],
        )
        frame.to_csv(path, index=False, lineterminator="\n")
        written.append(path)

    logger.debug(f"Wrote {len(written)} files to {out_dir}")
    return written


def export_dataset_csv(data: Dataset, path: Path) -> Path:
    """Write a dataset with header x1..xp,t,y (or the dataset's covariate names)."""
    frame = pd.DataFrame(data.x, columns=data.covariate_names)
    frame["t"] = data.t
    frame["y"] = data.y
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
    return path
