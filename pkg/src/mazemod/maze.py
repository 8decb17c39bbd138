"""Domain types and the seeded generator for the modular maze task.

A trial's world is a set of maze modules, each a fixed door sequence behind a
unique entry mark.  Training material comes in three kinds: bare door
associations (context begin + context end), context mazes (a door association
wrapped around a context-attached module), and standalone independent modules.
The test set pairs every door with every independent module - compositions
that never occur in training, which is what makes the test modular.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .encoding import (
    CONTEXT_BEGIN,
    CONTEXT_END,
    MAZE_ENTRY,
    MAZE_INTERIOR,
    EncodingDims,
    encode_response,
    encode_room,
)

DOOR_ASSOCIATION = "door-association"
CONTEXT_MAZE = "context-maze"
INDEPENDENT_MAZE = "independent-maze"
TEST_COMPOSITE = "test-composite"

SEQUENCE_KINDS = (DOOR_ASSOCIATION, CONTEXT_MAZE, INDEPENDENT_MAZE, TEST_COMPOSITE)

ROLE_CONTEXT = "context-attached"
ROLE_INDEPENDENT = "independent"

DATASET_FORMAT = "mazemod-dataset"
DATASET_VERSION = 1


class ConfigError(ValueError):
    """Raised for an invalid task configuration."""


@dataclass(frozen=True)
class TaskConfig:
    """All generation, model, and training parameters for one trial."""

    num_doors: int = 5
    maze_length: int = 5
    num_context_mazes: int = 10
    num_independent_mazes: int = 10
    rng_seed: int = 12345
    mlp_hidden: int = 50
    mlp_learning_rate: float = 0.1
    mlp_momentum: float = 0.2
    mlp_epochs: int = 5000
    lstm_hidden: int = 128
    lstm_learning_rate: float = 0.001
    lstm_epochs: int = 1000

    def validate(self) -> None:
        if self.num_doors < 2:
            raise ConfigError(f"num_doors must be >= 2, got {self.num_doors}")
        if self.maze_length < 0:
            raise ConfigError(f"maze_length must be >= 0, got {self.maze_length}")
        if self.num_context_mazes < 0:
            raise ConfigError(f"num_context_mazes must be >= 0, got {self.num_context_mazes}")
        if self.num_independent_mazes < 0:
            raise ConfigError(
                f"num_independent_mazes must be >= 0, got {self.num_independent_mazes}"
            )
        if self.mlp_hidden < 1 or self.lstm_hidden < 1:
            raise ConfigError("hidden widths must be >= 1")
        if self.mlp_epochs < 0 or self.lstm_epochs < 0:
            raise ConfigError("epoch counts must be >= 0")
        if self.mlp_learning_rate < 0 or self.lstm_learning_rate <= 0:
            raise ConfigError("learning rates must be positive")
        if not 0 <= self.mlp_momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.mlp_momentum}")

    def dims(self) -> EncodingDims:
        return EncodingDims(
            num_doors=self.num_doors,
            num_mazes=self.num_context_mazes + self.num_independent_mazes,
            maze_length=self.maze_length,
        )

    def with_values(self, **kwargs) -> "TaskConfig":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        return {
            "num_doors": self.num_doors,
            "maze_length": self.maze_length,
            "num_context_mazes": self.num_context_mazes,
            "num_independent_mazes": self.num_independent_mazes,
            "rng_seed": self.rng_seed,
            "mlp_hidden": self.mlp_hidden,
            "mlp_learning_rate": self.mlp_learning_rate,
            "mlp_momentum": self.mlp_momentum,
            "mlp_epochs": self.mlp_epochs,
            "lstm_hidden": self.lstm_hidden,
            "lstm_learning_rate": self.lstm_learning_rate,
            "lstm_epochs": self.lstm_epochs,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TaskConfig":
        return cls(**doc)


@dataclass(frozen=True)
class MazeModule:
    """One maze: its unique id, role, and correct door sequence.

    ``doors`` has maze_length + 1 entries: the entry-room choice followed by
    one choice per interior room.
    """

    maze_id: int
    role: str
    doors: tuple[int, ...]


@dataclass(eq=False)
class Step:
    input: np.ndarray
    target: np.ndarray
    room_kind: str


@dataclass(frozen=True)
class Provenance:
    """Which door and/or maze a sequence was built from."""

    door: int | None = None
    maze_id: int | None = None


@dataclass(eq=False)
class Sequence:
    steps: list[Step]
    kind: str
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.steps)

    def inputs(self) -> np.ndarray:
        return np.stack([s.input for s in self.steps])

    def targets(self) -> np.ndarray:
        return np.stack([s.target for s in self.steps])

    def target_indices(self) -> list[int]:
        return [int(np.argmax(s.target)) for s in self.steps]


@dataclass(eq=False)
class Dataset:
    train: list[Sequence]
    test: list[Sequence]
    dims: EncodingDims
    config: TaskConfig
    modules: list[MazeModule] = field(default_factory=list)


def generate_maze_modules(config: TaskConfig, rng: np.random.Generator) -> list[MazeModule]:
    """Draw every maze module's door sequence uniformly at random.

    Ids 0..num_context_mazes-1 are context-attached; the rest independent.
    """
    config.validate()
    modules = []
    total = config.num_context_mazes + config.num_independent_mazes
    for maze_id in range(total):
        role = ROLE_CONTEXT if maze_id < config.num_context_mazes else ROLE_INDEPENDENT
        doors = tuple(
            int(d) for d in rng.integers(0, config.num_doors, size=config.maze_length + 1)
        )
        modules.append(MazeModule(maze_id=maze_id, role=role, doors=doors))
    return modules


def door_association_sequence(door: int, dims: EncodingDims) -> Sequence:
    """Two steps: the marked door in the begin room, the same door at the end."""
    steps = [
        Step(encode_room(CONTEXT_BEGIN, door, dims), encode_response(door, dims), CONTEXT_BEGIN),
        Step(encode_room(CONTEXT_END, None, dims), encode_response(door, dims), CONTEXT_END),
    ]
    return Sequence(steps=steps, kind=DOOR_ASSOCIATION, provenance=Provenance(door=door))


def context_maze_sequence(
    door: int, module: MazeModule, dims: EncodingDims, kind: str = CONTEXT_MAZE
) -> Sequence:
    """Door association wrapped around one maze module (train or test kind)."""
    steps = [
        Step(encode_room(CONTEXT_BEGIN, door, dims), encode_response(door, dims), CONTEXT_BEGIN),
        Step(
            encode_room(MAZE_ENTRY, module.maze_id, dims),
            encode_response(module.doors[0], dims),
            MAZE_ENTRY,
        ),
    ]
    for interior_door in module.doors[1:]:
        steps.append(
            Step(
                encode_room(MAZE_INTERIOR, None, dims),
                encode_response(interior_door, dims),
                MAZE_INTERIOR,
            )
        )
    steps.append(
        Step(encode_room(CONTEXT_END, None, dims), encode_response(door, dims), CONTEXT_END)
    )
    return Sequence(
        steps=steps, kind=kind, provenance=Provenance(door=door, maze_id=module.maze_id)
    )


def independent_maze_sequence(module: MazeModule, dims: EncodingDims) -> Sequence:
    """A maze module on its own: entry room plus interior rooms."""
    steps = [
        Step(
            encode_room(MAZE_ENTRY, module.maze_id, dims),
            encode_response(module.doors[0], dims),
            MAZE_ENTRY,
        )
    ]
    for interior_door in module.doors[1:]:
        steps.append(
            Step(
                encode_room(MAZE_INTERIOR, None, dims),
                encode_response(interior_door, dims),
                MAZE_INTERIOR,
            )
        )
    return Sequence(
        steps=steps, kind=INDEPENDENT_MAZE, provenance=Provenance(maze_id=module.maze_id)
    )


def generate_dataset(config: TaskConfig) -> Dataset:
    """Build the full train/test split for one seeded configuration.

    Train: one door association per door, one context maze per
    (door, context-attached module) pair, one sequence per independent module.
    Test: one composite per (door, independent module) pair.
    """
    config.validate()
    dims = config.dims()
    if dims.input_width <= 0:
        raise ConfigError("derived input width is zero")
    rng = np.random.default_rng(config.rng_seed)
    modules = generate_maze_modules(config, rng)
    context_modules = [m for m in modules if m.role == ROLE_CONTEXT]
    independent_modules = [m for m in modules if m.role == ROLE_INDEPENDENT]

    train: list[Sequence] = []
    for door in range(config.num_doors):
        train.append(door_association_sequence(door, dims))
    for door in range(config.num_doors):
        for module in context_modules:
            train.append(context_maze_sequence(door, module, dims))
    for module in independent_modules:
        train.append(independent_maze_sequence(module, dims))

    test: list[Sequence] = []
    for door in range(config.num_doors):
        for module in independent_modules:
            test.append(context_maze_sequence(door, module, dims, kind=TEST_COMPOSITE))

    return Dataset(train=train, test=test, dims=dims, config=config, modules=modules)


# ---------------------------------------------------------------------------
# JSON serialization.  Mark vectors hold only 0.0/1.0, so int round-trips are
# bit-exact.


def _sequence_to_dict(seq: Sequence) -> dict:
    return {
        "kind": seq.kind,
        "provenance": {"door": seq.provenance.door, "maze_id": seq.provenance.maze_id},
        "steps": [
            {
                "input": [int(v) for v in s.input],
                "target": [int(v) for v in s.target],
                "room_kind": s.room_kind,
            }
            for s in seq.steps
        ],
    }


def _sequence_from_dict(doc: dict) -> Sequence:
    steps = [
        Step(
            input=np.asarray(s["input"], dtype=float),
            target=np.asarray(s["target"], dtype=float),
            room_kind=s["room_kind"],
        )
        for s in doc["steps"]
    ]
    prov = doc["provenance"]
    return Sequence(
        steps=steps, kind=doc["kind"], provenance=Provenance(prov["door"], prov["maze_id"])
    )


def dataset_to_dict(dataset: Dataset) -> dict:
    return {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "config": dataset.config.to_dict(),
        "dims": {
            "input_width": dataset.dims.input_width,
            "output_width": dataset.dims.output_width,
            "window_steps": dataset.dims.window_steps,
        },
        "modules": [
            {"maze_id": m.maze_id, "role": m.role, "doors": list(m.doors)}
            for m in dataset.modules
        ],
        "train": [_sequence_to_dict(s) for s in dataset.train],
        "test": [_sequence_to_dict(s) for s in dataset.test],
    }


def dataset_from_dict(doc: dict) -> Dataset:
    if doc.get("format") != DATASET_FORMAT:
        raise ValueError(f"not a {DATASET_FORMAT} document")
    config = TaskConfig.from_dict(doc["config"])
    modules = [
        MazeModule(maze_id=m["maze_id"], role=m["role"], doors=tuple(m["doors"]))
        for m in doc["modules"]
    ]
    return Dataset(
        train=[_sequence_from_dict(s) for s in doc["train"]],
        test=[_sequence_from_dict(s) for s in doc["test"]],
        dims=config.dims(),
        config=config,
        modules=modules,
    )


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(dataset), indent=1))


def load_dataset(path: str | Path) -> Dataset:
    return dataset_from_dict(json.loads(Path(path).read_text()))
