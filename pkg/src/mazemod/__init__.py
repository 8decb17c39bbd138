"""Modular maze benchmark: dataset generator, sequence learners, sweep harness."""

from .encoding import EncodingDims, build_window, encode_response, encode_room, sequence_windows
from .maze import (
    ConfigError,
    Dataset,
    MazeModule,
    Sequence,
    TaskConfig,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from .models import (
    LstmModel,
    MorphognosisModel,
    OracleModel,
    build_model,
    model_from_dict,
    oracle_predict,
)
from .neural import Lstm, Mlp, TrainingDivergedError, TrainReport
from .harness import SweepSpec, SweepResult, TrialRecord, derive_seed, run_sweep, run_trial

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "Dataset",
    "EncodingDims",
    "Lstm",
    "LstmModel",
    "MazeModule",
    "Mlp",
    "MorphognosisModel",
    "OracleModel",
    "Sequence",
    "SweepResult",
    "SweepSpec",
    "TaskConfig",
    "TrainReport",
    "TrainingDivergedError",
    "TrialRecord",
    "build_model",
    "build_window",
    "derive_seed",
    "encode_response",
    "encode_room",
    "generate_dataset",
    "load_dataset",
    "model_from_dict",
    "oracle_predict",
    "run_sweep",
    "run_trial",
    "save_dataset",
    "sequence_windows",
    "__version__",
]
