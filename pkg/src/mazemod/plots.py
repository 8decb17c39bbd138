"""Render sweep accuracy figures (mean with stdev bars, one line per model).

Uses the Agg backend so rendering works headless; figures land next to the
CSV files the sweep writes.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import TrialRecord

_MARKERS = ("o", "s", "^", "D", "v")


def load_trials_csv(path) -> list[TrialRecord]:
    """Read per-trial rows back into records ("n/a" becomes None)."""
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(
                TrialRecord(
                    sweep=row["sweep"],
                    feature_value=int(row["feature_value"]),
                    model=row["model"],
                    trial=int(row["trial"]),
                    seed=int(row["seed"]),
                    train_acc=float(row["train_acc"]),
                    test_acc=None if row["test_acc"] == "n/a" else float(row["test_acc"]),
                    train_seqs=int(row["train_seqs"]),
                    test_seqs=int(row["test_seqs"]),
                    seconds=float(row["seconds"]),
                )
            )
    return records


def _grouped(records: list[TrialRecord], split: str):
    """Per model: sorted feature values with mean and stdev accuracy."""
    models = list(dict.fromkeys(r.model for r in records))
    values = sorted({r.feature_value for r in records})
    out = {}
    for model in models:
        xs, means, stds = [], [], []
        for value in values:
            accs = [
                getattr(r, split)
                for r in records
                if r.model == model and r.feature_value == value and getattr(r, split) is not None
            ]
            if not accs:
                continue
            xs.append(value)
            means.append(float(np.mean(accs)))
            stds.append(float(np.std(accs)))
        if xs:
            out[model] = (xs, means, stds)
    return out


def _render_one(records, split: str, feature: str, path) -> bool:
    groups = _grouped(records, split)
    if not groups:
        return False
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for k, (model, (xs, means, stds)) in enumerate(groups.items()):
        ax.errorbar(
            xs, means, yerr=stds, marker=_MARKERS[k % len(_MARKERS)], capsize=3, label=model
        )
    ax.set_xlabel(feature)
    ax.set_ylabel(f"{split.split('_')[0]} accuracy")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"{feature} sweep: {split.split('_')[0]} accuracy")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def render_sweep_figures(records: list[TrialRecord], out_dir, stem: str = "sweep") -> list[str]:
    """Write train/test accuracy PNGs for one sweep; returns written paths."""
    if not records:
        return []
    feature = records[0].sweep
    written = []
    for split, suffix in (("train_acc", "train"), ("test_acc", "test")):
        path = os.path.join(out_dir, f"{stem}_{suffix}.png")
        if _render_one(records, split, feature, path):
            written.append(path)
    return written
