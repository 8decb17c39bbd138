"""Experiment harness: seeded trials, parameter sweeps, CSV and JSON output.

Seeds are derived, never reused: each (feature, value, trial) gets its own
dataset seed, and each model within a trial gets its own init/training
stream.  Given the same command line, every byte of the CSV output is
reproducible; wall-clock timings are kept out of the CSVs by default and
recorded in the metadata JSON instead.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .maze import ConfigError, Dataset, TaskConfig, generate_dataset
from .models import MODEL_NAMES, build_model

_MASK64 = (1 << 64) - 1

SEED_RULE = (
    "trial_seed = mix(base_seed, feature, value, trial); "
    "model_seed = mix(trial_seed, 'model', name); "
    "mix = splitmix64 chaining, strings hashed with FNV-1a 64"
)

FEATURES = ("doors", "maze-quantity", "maze-length")

DEFAULT_GRIDS = {
    "doors": list(range(2, 9)),
    "maze-quantity": list(range(2, 15, 2)),
    "maze-length": list(range(1, 9)),
}

TRIALS_CSV_HEADER = [
    "sweep",
    "feature_value",
    "model",
    "trial",
    "seed",
    "train_acc",
    "test_acc",
    "train_seqs",
    "test_seqs",
    "seconds",
]

SUMMARY_CSV_HEADER = [
    "sweep",
    "feature_value",
    "model",
    "trials",
    "train_mean",
    "train_std",
    "test_mean",
    "test_std",
]

METADATA_FORMAT = "mazemod-sweep-meta"
METADATA_VERSION = 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


def derive_seed(base: int, *parts) -> int:
    """Chain a base seed with string or integer labels into a fresh seed."""
    h = splitmix64(base & _MASK64)
    for part in parts:
        if isinstance(part, str):
            value = fnv1a64(part)
        else:
            value = int(part) & _MASK64
        h = splitmix64(h ^ value)
    return h


def apply_feature(config: TaskConfig, feature: str, value: int) -> TaskConfig:
    """Return a config with one swept feature set to the given value."""
    if feature == "doors":
        return config.with_values(num_doors=value)
    if feature == "maze-quantity":
        # Context-attached and independent counts move together.
        return config.with_values(num_context_mazes=value, num_independent_mazes=value)
    if feature == "maze-length":
        return config.with_values(maze_length=value)
    raise ConfigError(f"unknown sweep feature: {feature!r} (choose from {', '.join(FEATURES)})")


def evaluate_model(model, dataset: Dataset) -> tuple[float, float | None]:
    """All-steps-correct sequence accuracy on the train and test splits."""
    train_acc = score_sequences(model, dataset.train)
    test_acc = score_sequences(model, dataset.test) if dataset.test else None
    assert train_acc is not None
    return train_acc, test_acc


def score_sequences(model, sequences) -> float | None:
    """Fraction of sequences predicted perfectly at every step."""
    if not sequences:
        return None
    correct = 0
    for seq in sequences:
        if model.predict(seq.inputs()) == seq.target_indices():
            correct += 1
    return correct / len(sequences)


@dataclass(frozen=True)
class TrialRecord:
    """One (feature value, model, trial) measurement."""

    sweep: str
    feature_value: int
    model: str
    trial: int
    seed: int
    train_acc: float
    test_acc: float | None
    train_seqs: int
    test_seqs: int
    seconds: float


def run_trial(
    base_config: TaskConfig,
    feature: str,
    value: int,
    model_name: str,
    trial: int,
    base_seed: int,
    sweep_name: str | None = None,
) -> TrialRecord:
    """Generate the trial's dataset, train the model, score both splits."""
    trial_seed = derive_seed(base_seed, feature, value, trial)
    model_seed = derive_seed(trial_seed, "model", model_name)
    config = apply_feature(base_config, feature, value).with_values(rng_seed=trial_seed)
    started = time.perf_counter()
    dataset = generate_dataset(config)
    model = build_model(model_name, dataset, model_seed)
    model.train(dataset.train)
    train_acc, test_acc = evaluate_model(model, dataset)
    elapsed = time.perf_counter() - started
    return TrialRecord(
        sweep=sweep_name or feature,
        feature_value=value,
        model=model_name,
        trial=trial,
        seed=model_seed,
        train_acc=train_acc,
        test_acc=test_acc,
        train_seqs=len(dataset.train),
        test_seqs=len(dataset.test),
        seconds=elapsed,
    )


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: one feature over values, several models, many trials."""

    feature: str
    values: tuple[int, ...]
    base: TaskConfig = field(default_factory=TaskConfig)
    models: tuple[str, ...] = MODEL_NAMES
    trials: int = 25
    base_seed: int = 12345

    def validate(self) -> None:
        if self.feature not in FEATURES:
            raise ConfigError(f"unknown sweep feature: {self.feature!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one feature value")
        if any(a >= b for a, b in zip(self.values, self.values[1:])):
            raise ConfigError(f"sweep values must be strictly increasing, got {list(self.values)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        for name in self.models:
            if name not in MODEL_NAMES:
                raise ConfigError(f"unknown model name: {name!r}")
        for value in self.values:
            apply_feature(self.base, self.feature, value).validate()

    def tasks(self) -> list[tuple[int, str, int]]:
        return [
            (value, model, trial)
            for value in self.values
            for model in self.models
            for trial in range(self.trials)
        ]


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[TrialRecord]

    def summary(self) -> list[dict]:
        """Mean and stdev per (feature value, model), trial axis collapsed."""
        rows = []
        for value in self.spec.values:
            for model in self.spec.models:
                group = [
                    r for r in self.records if r.feature_value == value and r.model == model
                ]
                if not group:
                    continue
                train = [r.train_acc for r in group]
                test = [r.test_acc for r in group if r.test_acc is not None]
                rows.append(
                    {
                        "sweep": self.spec.feature,
                        "feature_value": value,
                        "model": model,
                        "trials": len(group),
                        "train_mean": statistics.fmean(train),
                        "train_std": statistics.pstdev(train),
                        "test_mean": statistics.fmean(test) if test else None,
                        "test_std": statistics.pstdev(test) if test else None,
                    }
                )
        return rows


def _run_task(args) -> TrialRecord:
    spec, value, model, trial = args
    return run_trial(spec.base, spec.feature, value, model, trial, spec.base_seed)


def run_sweep(spec: SweepSpec, jobs: int = 1, progress=None) -> SweepResult:
    """Run every (value, model, trial) task; order of records is fixed."""
    spec.validate()
    tasks = [(spec, value, model, trial) for value, model, trial in spec.tasks()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = []
            for record in pool.map(_run_task, tasks):
                records.append(record)
                if progress is not None:
                    progress(record)
    else:
        records = []
        for task in tasks:
            record = _run_task(task)
            records.append(record)
            if progress is not None:
                progress(record)
    return SweepResult(spec=spec, records=records)


def _format_acc(value: float | None) -> str:
    return "n/a" if value is None else repr(float(value))


def write_trials_csv(path, records: list[TrialRecord], include_timing: bool = False) -> None:
    """Per-trial rows.  Seconds are 0.0 unless timing is explicitly kept,
    so repeated runs of the same command produce identical bytes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIALS_CSV_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.sweep,
                    r.feature_value,
                    r.model,
                    r.trial,
                    r.seed,
                    _format_acc(r.train_acc),
                    _format_acc(r.test_acc),
                    r.train_seqs,
                    r.test_seqs,
                    repr(round(r.seconds, 3)) if include_timing else "0.0",
                ]
            )


def write_summary_csv(path, result: SweepResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_CSV_HEADER)
        for row in result.summary():
            writer.writerow(
                [
                    row["sweep"],
                    row["feature_value"],
                    row["model"],
                    row["trials"],
                    _format_acc(row["train_mean"]),
                    _format_acc(row["train_std"]),
                    _format_acc(row["test_mean"]),
                    _format_acc(row["test_std"]),
                ]
            )


def write_metadata(path, result: SweepResult) -> None:
    """Sweep provenance: spec, seed rule, and real per-trial wall times."""
    spec = result.spec
    doc = {
        "format": METADATA_FORMAT,
        "version": METADATA_VERSION,
        "feature": spec.feature,
        "values": list(spec.values),
        "models": list(spec.models),
        "trials": spec.trials,
        "base_seed": spec.base_seed,
        "base_config": spec.base.to_dict(),
        "seed_rule": SEED_RULE,
        "timings": [
            {
                "feature_value": r.feature_value,
                "model": r.model,
                "trial": r.trial,
                "seconds": round(r.seconds, 6),
            }
            for r in result.records
        ],
        "total_seconds": round(sum(r.seconds for r in result.records), 6),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def default_sweep_spec(feature: str, base: TaskConfig | None = None, **overrides) -> SweepSpec:
    """Spec for one of the three stock sweeps at its default grid."""
    if feature not in DEFAULT_GRIDS:
        raise ConfigError(f"unknown sweep feature: {feature!r}")
    spec = SweepSpec(feature=feature, values=tuple(DEFAULT_GRIDS[feature]), base=base or TaskConfig())
    return replace(spec, **overrides) if overrides else spec
