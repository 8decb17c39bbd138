"""Arbitration model, LSTM wrapper, rule oracle, and checkpointing."""

import json

import numpy as np
import pytest

from mazemod.encoding import CONTEXT_END, MAZE_INTERIOR, EncodingDims
from mazemod.harness import evaluate_model, score_sequences
from mazemod.maze import ConfigError, TaskConfig, generate_dataset
from mazemod.models import (
    LstmModel,
    MorphognosisModel,
    OracleModel,
    build_model,
    model_from_dict,
    oracle_predict,
)

TINY = TaskConfig(
    num_doors=2,
    maze_length=1,
    num_context_mazes=2,
    num_independent_mazes=2,
    mlp_hidden=20,
    mlp_epochs=400,
    lstm_hidden=16,
    lstm_learning_rate=0.01,
    lstm_epochs=300,
)

# hand-built room vectors for num_doors=2, num_mazes=2, maze_length=1
# layout: [begin0 begin1 | entry0 entry1 | interior | end0 end1]
HAND_DIMS = EncodingDims(num_doors=2, num_mazes=2, maze_length=1)
BEGIN0 = [1, 0, 0, 0, 0, 0, 0]
BEGIN1 = [0, 1, 0, 0, 0, 0, 0]
ENTRY0 = [0, 0, 1, 0, 0, 0, 0]
ENTRY1 = [0, 0, 0, 1, 0, 0, 0]
INTERIOR = [0, 0, 0, 0, 1, 0, 0]
END = [0, 0, 0, 0, 0, 1, 1]

DOORS = {0: (1, 0), 1: (0, 1)}


def _dims():
    return HAND_DIMS


def test_oracle_walks_composite():
    inputs = np.array([BEGIN1, ENTRY0, INTERIOR, END], dtype=float)
    assert oracle_predict(inputs, _dims(), DOORS) == [1, 1, 0, 1]


def test_oracle_bare_association():
    inputs = np.array([BEGIN0, END], dtype=float)
    assert oracle_predict(inputs, _dims(), DOORS) == [0, 0]


def test_oracle_independent_maze():
    inputs = np.array([ENTRY1, INTERIOR], dtype=float)
    assert oracle_predict(inputs, _dims(), DOORS) == [0, 1]


def test_oracle_rejects_malformed_rooms():
    dims = _dims()
    with pytest.raises(KeyError):
        oracle_predict(np.array([ENTRY1], dtype=float), dims, {0: (1, 0)})
    with pytest.raises(ValueError):
        oracle_predict(np.array([INTERIOR], dtype=float), dims, DOORS)
    with pytest.raises(ValueError):
        oracle_predict(np.array([END], dtype=float), dims, DOORS)
    two_sections = np.array(BEGIN0, dtype=float) + np.array(INTERIOR, dtype=float)
    with pytest.raises(ValueError):
        oracle_predict(two_sections[None, :], dims, DOORS)
    with pytest.raises(ValueError):
        oracle_predict(np.zeros((1, 7)), dims, DOORS)
    with pytest.raises(ValueError):
        oracle_predict(np.zeros((1, 6)), dims, DOORS)


def test_oracle_runs_past_the_maze_end():
    # a second interior room after a length-1 maze has no door to report
    inputs = np.array([ENTRY0, INTERIOR, INTERIOR], dtype=float)
    with pytest.raises(ValueError):
        oracle_predict(inputs, _dims(), DOORS)


def test_oracle_model_perfect_on_generated_data():
    for seed in (0, 1, 2):
        ds = generate_dataset(TINY.with_values(rng_seed=seed))
        oracle = build_model("oracle", ds, seed)
        assert evaluate_model(oracle, ds) == (1.0, 1.0)


class _Stub:
    def __init__(self, vec):
        self.vec = np.asarray(vec, dtype=float)

    def forward(self, x):
        return self.vec.copy()


def _stubbed_morpho(current, sequence):
    ds = generate_dataset(TINY)
    model = build_model("morphognosis", ds, 0)
    model.current_net = _Stub(current)
    model.sequence_net = _Stub(sequence)
    return model


def test_arbitration_current_wins_on_higher_max():
    model = _stubbed_morpho([0.9, 0.1, 0.0], [0.2, 0.7, 0.0])
    [p] = model.predict_steps(np.zeros((1, TINY.dims().input_width)))
    assert p.winner == "current" and p.index == 0


def test_arbitration_sequence_wins_on_strictly_higher_max():
    model = _stubbed_morpho([0.2, 0.7, 0.0], [0.9, 0.1, 0.0])
    [p] = model.predict_steps(np.zeros((1, TINY.dims().input_width)))
    assert p.winner == "sequence" and p.index == 0


def test_arbitration_tie_goes_to_current():
    model = _stubbed_morpho([0.5, 0.2, 0.0], [0.1, 0.5, 0.2])
    [p] = model.predict_steps(np.zeros((1, TINY.dims().input_width)))
    assert p.winner == "current" and p.index == 0


def test_predictions_are_causal():
    ds = generate_dataset(TINY)
    model = build_model("morphognosis", ds, 3)  # untrained weights suffice
    inputs = ds.test[0].inputs()
    full = model.predict(inputs)
    for t in range(1, len(inputs) + 1):
        assert model.predict(inputs[:t]) == full[:t]


def test_morphognosis_associations_only_trains_perfectly():
    cfg = TaskConfig(
        num_doors=3, maze_length=1, num_context_mazes=0, num_independent_mazes=0,
        mlp_hidden=20, mlp_epochs=300)
    ds = generate_dataset(cfg)
    model = build_model("morphognosis", ds, 5)
    reports = model.train(ds.train)
    assert set(reports) == {"current", "sequence"}
    train_acc, test_acc = evaluate_model(model, ds)
    assert train_acc == 1.0
    assert test_acc is None  # no independent mazes, no test set


def test_morphognosis_interior_responses_are_depressed():
    # the interior mark maps to conflicting doors across mazes, so the
    # current-step net cannot answer it confidently
    ds = generate_dataset(TINY.with_values(rng_seed=7))
    model = build_model("morphognosis", ds, 7)
    model.train(ds.train)
    interior, begin = [], []
    for seq in ds.test:
        for pred, step in zip(model.predict_steps(seq.inputs()), seq.steps):
            peak = float(pred.current_output.max())
            if step.room_kind == MAZE_INTERIOR:
                interior.append(peak)
            elif step.room_kind == CONTEXT_END:
                continue
            else:
                begin.append(peak)
    assert np.mean(interior) < np.mean(begin)


def test_morphognosis_sequence_net_wins_composite_end_steps():
    ds = generate_dataset(TINY.with_values(rng_seed=7))
    model = build_model("morphognosis", ds, 7)
    model.train(ds.train)
    winners = [
        pred.winner
        for seq in ds.test
        for pred, step in zip(model.predict_steps(seq.inputs()), seq.steps)
        if step.room_kind == CONTEXT_END
    ]
    assert winners and all(w == "sequence" for w in winners)


def test_lstm_zero_params_chooses_index_zero():
    ds = generate_dataset(TINY)
    model = build_model("lstm", ds, 1)
    for _, p in model.net.parameters():
        p[:] = 0.0
    assert model.predict(ds.train[0].inputs()) == [0, 0]


def test_lstm_model_memorizes_single_sequence():
    ds = generate_dataset(TINY)
    model = build_model("lstm", ds, 99)
    seq = ds.train[-1]
    model.train([seq])
    assert model.predict(seq.inputs()) == seq.target_indices()


def test_models_reject_empty_training_set():
    ds = generate_dataset(TINY)
    for name in ("morphognosis", "lstm"):
        with pytest.raises(ValueError):
            build_model(name, ds, 0).train([])


def test_prediction_indices_in_range():
    ds = generate_dataset(TINY)
    for name in ("morphognosis", "lstm"):
        model = build_model(name, ds, 2)
        for seq in ds.test:
            for idx in model.predict(seq.inputs()):
                assert 0 <= idx <= ds.dims.num_doors


def test_build_model_rejects_unknown_name():
    ds = generate_dataset(TINY)
    with pytest.raises(ConfigError):
        build_model("transformer", ds, 0)


@pytest.mark.parametrize("name", ["morphognosis", "lstm", "oracle"])
def test_checkpoint_roundtrip(name):
    cfg = TINY.with_values(mlp_epochs=30, lstm_epochs=10)
    ds = generate_dataset(cfg)
    model = build_model(name, ds, 4)
    model.train(ds.train)
    restored = model_from_dict(json.loads(json.dumps(model.to_dict())))
    assert restored.name == name
    for seq in ds.train + ds.test:
        assert restored.predict(seq.inputs()) == model.predict(seq.inputs())


def test_model_from_dict_rejects_bad_documents():
    with pytest.raises(ConfigError):
        model_from_dict({"format": "something-else"})
    ds = generate_dataset(TINY)
    doc = build_model("oracle", ds, 0).to_dict()
    doc["version"] = 99
    with pytest.raises(ConfigError):
        model_from_dict(doc)
    doc = build_model("oracle", ds, 0).to_dict()
    doc["name"] = "transformer"
    with pytest.raises(ConfigError):
        model_from_dict(doc)


def test_score_sequences_matches_manual_count():
    ds = generate_dataset(TINY)
    oracle = build_model("oracle", ds, 0)
    assert score_sequences(oracle, ds.train) == 1.0
    assert score_sequences(oracle, []) is None
