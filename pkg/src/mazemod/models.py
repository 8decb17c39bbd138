"""Sequence predictors: dual-network arbitration, LSTM, and a rule oracle.

Every model consumes raw per-step room encodings and emits one response
index per step.  ``build_model`` constructs any of them by registry name
from a dataset's config; checkpoints round-trip through plain dicts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import EncodingDims, build_window, sequence_windows
from .maze import ConfigError, Dataset, MazeModule, Sequence, TaskConfig
from .neural import Lstm, Mlp, TrainReport

MODEL_FORMAT = "mazemod-model"
MODEL_VERSION = 1

MODEL_NAMES = ("morphognosis", "lstm", "oracle")


@dataclass
class Prediction:
    """One arbitrated step: chosen index plus both networks' raw outputs."""

    index: int
    winner: str
    current_output: np.ndarray
    sequence_output: np.ndarray


def _steps_as_arrays(sequences: list[Sequence]) -> tuple[np.ndarray, np.ndarray]:
    xs = np.concatenate([seq.inputs() for seq in sequences])
    ts = np.concatenate([seq.targets() for seq in sequences])
    return xs, ts


class MorphognosisModel:
    """Two feedforward nets arbitrated by output confidence.

    The current-step net sees only the present room encoding; the sequence
    net sees a time-delay window over recent rooms.  At prediction time the
    sequence net's answer is taken only when its strongest output strictly
    exceeds the current-step net's; otherwise the current-step net decides.
    """

    name = "morphognosis"

    def __init__(self, dims: EncodingDims, config: TaskConfig, rng: np.random.Generator):
        self.dims = dims
        self.config = config
        self._rng = rng
        self.current_net = Mlp(dims.input_width, config.mlp_hidden, dims.output_width, rng)
        self.sequence_net = Mlp(dims.window_width, config.mlp_hidden, dims.output_width, rng)

    def train(self, sequences: list[Sequence]) -> dict[str, TrainReport]:
        if not sequences:
            raise ValueError("empty training set")
        xs, ts = _steps_as_arrays(sequences)
        windows = np.concatenate([sequence_windows(seq.inputs(), self.dims) for seq in sequences])
        cfg = self.config
        reports = {}
        reports["current"] = self.current_net.train(
            xs,
            ts,
            learning_rate=cfg.mlp_learning_rate,
            momentum=cfg.mlp_momentum,
            epochs=cfg.mlp_epochs,
            rng=self._rng,
        )
        reports["sequence"] = self.sequence_net.train(
            windows,
            ts,
            learning_rate=cfg.mlp_learning_rate,
            momentum=cfg.mlp_momentum,
            epochs=cfg.mlp_epochs,
            rng=self._rng,
        )
        return reports

    def predict_steps(self, inputs: np.ndarray) -> list[Prediction]:
        inputs = np.asarray(inputs, dtype=float)
        predictions = []
        for t in range(len(inputs)):
            cur = self.current_net.forward(inputs[t])
            seq = self.sequence_net.forward(build_window(inputs, t, self.dims))
            # Ties go to the current-step net.
            if float(seq.max()) > float(cur.max()):
                winner, chosen = "sequence", seq
            else:
                winner, chosen = "current", cur
            predictions.append(
                Prediction(
                    index=int(np.argmax(chosen)),
                    winner=winner,
                    current_output=cur,
                    sequence_output=seq,
                )
            )
        return predictions

    def predict(self, inputs: np.ndarray) -> list[int]:
        return [p.index for p in self.predict_steps(inputs)]

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "name": self.name,
            "config": self.config.to_dict(),
            "current_net": self.current_net.to_dict(),
            "sequence_net": self.sequence_net.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MorphognosisModel":
        config = TaskConfig.from_dict(doc["config"])
        model = cls.__new__(cls)
        model.dims = config.dims()
        model.config = config
        model._rng = np.random.default_rng(config.rng_seed)
        model.current_net = Mlp.from_dict(doc["current_net"])
        model.sequence_net = Mlp.from_dict(doc["sequence_net"])
        return model


class LstmModel:
    """Recurrent predictor: one LSTM read out with argmax at every step."""

    name = "lstm"

    def __init__(self, dims: EncodingDims, config: TaskConfig, rng: np.random.Generator):
        self.dims = dims
        self.config = config
        self._rng = rng
        self.net = Lstm(dims.input_width, config.lstm_hidden, dims.output_width, rng)

    def train(self, sequences: list[Sequence]) -> dict[str, TrainReport]:
        if not sequences:
            raise ValueError("empty training set")
        pairs = [(seq.inputs(), seq.targets()) for seq in sequences]
        report = self.net.train(
            pairs,
            learning_rate=self.config.lstm_learning_rate,
            epochs=self.config.lstm_epochs,
            rng=self._rng,
        )
        return {"lstm": report}

    def predict(self, inputs: np.ndarray) -> list[int]:
        outputs = self.net.forward(np.asarray(inputs, dtype=float))
        return [int(np.argmax(row)) for row in outputs]

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "name": self.name,
            "config": self.config.to_dict(),
            "net": self.net.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LstmModel":
        config = TaskConfig.from_dict(doc["config"])
        model = cls.__new__(cls)
        model.dims = config.dims()
        model.config = config
        model._rng = np.random.default_rng(config.rng_seed)
        model.net = Lstm.from_dict(doc["net"])
        return model


def oracle_predict(
    inputs: np.ndarray, dims: EncodingDims, doors_by_id: dict[int, tuple[int, ...]]
) -> list[int]:
    """Ground-truth responses for one encoded sequence.

    Tracks the door named by a context-begin room, looks maze entries up in
    the supplied door table, and steps through interior rooms by count.
    Raises ValueError for vectors that are not valid room encodings and
    KeyError for maze ids missing from the table.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != dims.input_width:
        raise ValueError(f"expected inputs of shape (T, {dims.input_width}), got {inputs.shape}")
    d = dims.num_doors
    responses = []
    pending_door = None
    doors: tuple[int, ...] = ()
    position = 0
    for t, x in enumerate(inputs):
        begin = x[: dims.entry_offset]
        entry = x[dims.entry_offset : dims.interior_offset]
        interior = x[dims.interior_offset]
        end = x[dims.end_offset :]
        begin_on = int(begin.sum())
        entry_on = int(entry.sum())
        end_on = int(end.sum())
        if begin_on == 1 and entry_on == 0 and interior == 0 and end_on == 0:
            pending_door = int(np.argmax(begin))
            responses.append(pending_door)
        elif entry_on == 1 and begin_on == 0 and interior == 0 and end_on == 0:
            maze_id = int(np.argmax(entry))
            if maze_id not in doors_by_id:
                raise KeyError(f"unknown maze id {maze_id} at step {t}")
            doors = doors_by_id[maze_id]
            position = 0
            responses.append(doors[position])
        elif interior == 1 and begin_on == 0 and entry_on == 0 and end_on == 0:
            position += 1
            if position >= len(doors):
                raise ValueError(f"interior room at step {t} without a maze in progress")
            responses.append(doors[position])
        elif end_on == d and begin_on == 0 and entry_on == 0 and interior == 0:
            if pending_door is None:
                raise ValueError(f"context-end room at step {t} without a context-begin")
            responses.append(pending_door)
        else:
            raise ValueError(f"malformed room encoding at step {t}")
    return responses


class OracleModel:
    """Rule-based upper bound that reads the generator's own maze table."""

    name = "oracle"

    def __init__(self, dims: EncodingDims, modules: list[MazeModule], config: TaskConfig):
        self.dims = dims
        self.config = config
        self.doors_by_id = {module.maze_id: module.doors for module in modules}

    def train(self, sequences: list[Sequence]) -> dict[str, TrainReport]:
        return {}

    def predict(self, inputs: np.ndarray) -> list[int]:
        return oracle_predict(inputs, self.dims, self.doors_by_id)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "name": self.name,
            "config": self.config.to_dict(),
            "doors": {str(k): list(v) for k, v in self.doors_by_id.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "OracleModel":
        config = TaskConfig.from_dict(doc["config"])
        model = cls.__new__(cls)
        model.dims = config.dims()
        model.config = config
        model.doors_by_id = {int(k): tuple(v) for k, v in doc["doors"].items()}
        return model


def build_model(name: str, dataset: Dataset, seed: int):
    """Construct a named model sized for the dataset, seeded for init/training."""
    dims = dataset.dims
    config = dataset.config
    if name == "morphognosis":
        return MorphognosisModel(dims, config, np.random.default_rng(seed))
    if name == "lstm":
        return LstmModel(dims, config, np.random.default_rng(seed))
    if name == "oracle":
        return OracleModel(dims, dataset.modules, config)
    raise ConfigError(f"unknown model name: {name!r} (choose from {', '.join(MODEL_NAMES)})")


def model_from_dict(doc: dict):
    """Restore a checkpointed model from its dict form."""
    if doc.get("format") != MODEL_FORMAT:
        raise ConfigError(f"not a model checkpoint: format={doc.get('format')!r}")
    if doc.get("version") != MODEL_VERSION:
        raise ConfigError(f"unsupported model checkpoint version: {doc.get('version')!r}")
    name = doc.get("name")
    if name == "morphognosis":
        return MorphognosisModel.from_dict(doc)
    if name == "lstm":
        return LstmModel.from_dict(doc)
    if name == "oracle":
        return OracleModel.from_dict(doc)
    raise ConfigError(f"unknown model name in checkpoint: {name!r}")
