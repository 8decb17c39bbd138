"""Room/response encodings and the time-delay window builder."""

import numpy as np
import pytest

from mazemod.encoding import (
    CONTEXT_BEGIN,
    CONTEXT_END,
    MAZE_ENTRY,
    MAZE_INTERIOR,
    EncodingDims,
    build_window,
    decode_response,
    encode_response,
    encode_room,
    sequence_windows,
)

DIMS = EncodingDims(num_doors=3, num_mazes=6, maze_length=3)


def test_dims_arithmetic():
    assert DIMS.input_width == 3 + 6 + 1 + 3
    assert DIMS.output_width == 4
    assert DIMS.wait_index == 3
    assert DIMS.entry_offset == 3
    assert DIMS.interior_offset == 9
    assert DIMS.end_offset == 10
    assert DIMS.window_steps == 6
    assert DIMS.window_width == 6 * 13


def test_encode_room_layouts():
    assert encode_room(CONTEXT_BEGIN, 0, DIMS).tolist() == [
        1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]
    assert encode_room(MAZE_ENTRY, 3, DIMS).tolist() == [
        0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0]
    assert encode_room(MAZE_INTERIOR, None, DIMS).tolist() == [
        0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0]
    assert encode_room(CONTEXT_END, None, DIMS).tolist() == [
        0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1]


def test_encode_room_single_section():
    d = DIMS
    for kind, index in [(CONTEXT_BEGIN, 2), (MAZE_ENTRY, 5), (MAZE_INTERIOR, None)]:
        vec = encode_room(kind, index, d)
        assert vec.sum() == 1.0
    assert encode_room(CONTEXT_END, None, d).sum() == d.num_doors


def test_encode_room_errors():
    with pytest.raises(ValueError):
        encode_room(CONTEXT_BEGIN, 3, DIMS)
    with pytest.raises(ValueError):
        encode_room(CONTEXT_BEGIN, None, DIMS)
    with pytest.raises(ValueError):
        encode_room(MAZE_ENTRY, 6, DIMS)
    with pytest.raises(ValueError):
        encode_room(MAZE_ENTRY, -1, DIMS)
    with pytest.raises(ValueError):
        encode_room("hallway", 0, DIMS)


def test_encode_response_onehot_and_wait():
    assert encode_response(2, DIMS).tolist() == [0, 0, 1, 0]
    assert encode_response(DIMS.wait_index, DIMS).tolist() == [0, 0, 0, 1]
    with pytest.raises(ValueError):
        encode_response(4, DIMS)
    with pytest.raises(ValueError):
        encode_response(-1, DIMS)


def test_decode_response_roundtrip_and_ties():
    for k in range(DIMS.output_width):
        assert decode_response(encode_response(k, DIMS)) == k
    # argmax ties break toward the lowest index
    assert decode_response(np.array([0.5, 0.5, 0.1, 0.1])) == 0


def small_sequence(dims, steps):
    rng = np.random.default_rng(0)
    return rng.uniform(size=(steps, dims.input_width))


def test_build_window_recent_alignment():
    dims = EncodingDims(num_doors=2, num_mazes=2, maze_length=1)
    w = dims.input_width
    inputs = small_sequence(dims, 3)
    zero = np.zeros(w)

    w0 = build_window(inputs, 0, dims)
    assert np.array_equal(w0[:w], inputs[0])
    assert np.array_equal(w0[w:], np.zeros(dims.window_width - w))

    w2 = build_window(inputs, 2, dims)
    # tap j holds the input from j steps back
    assert np.array_equal(w2[0:w], inputs[2])
    assert np.array_equal(w2[w:2 * w], inputs[1])
    assert np.array_equal(w2[2 * w:3 * w], inputs[0])
    assert np.array_equal(w2[3 * w:], zero)


def test_build_window_shift_property():
    dims = EncodingDims(num_doors=3, num_mazes=4, maze_length=2)
    w = dims.input_width
    inputs = small_sequence(dims, dims.window_steps)
    for t in range(1, len(inputs)):
        prev = build_window(inputs, t - 1, dims)
        cur = build_window(inputs, t, dims)
        # advancing one step shifts every tap one slot deeper
        assert np.array_equal(cur[w:], prev[:-w])


def test_build_window_history_position_independent():
    # the same recent inputs produce the same leading taps regardless of
    # what came before them
    dims = EncodingDims(num_doors=2, num_mazes=3, maze_length=2)
    w = dims.input_width
    tail = small_sequence(dims, 2)
    bare = build_window(tail, 1, dims)
    prefixed = np.concatenate([small_sequence(dims, 2) + 1.0, tail])
    shifted = build_window(prefixed, 3, dims)
    assert np.array_equal(bare[: 2 * w], shifted[: 2 * w])


def test_build_window_errors():
    dims = EncodingDims(num_doors=2, num_mazes=2, maze_length=1)
    inputs = small_sequence(dims, 3)
    with pytest.raises(ValueError):
        build_window(inputs[:, :-1], 0, dims)
    with pytest.raises(ValueError):
        build_window(inputs, 3, dims)
    with pytest.raises(ValueError):
        build_window(inputs, -1, dims)
    too_long = small_sequence(dims, dims.window_steps + 1)
    with pytest.raises(ValueError):
        build_window(too_long, 0, dims)


def test_sequence_windows_stacks_every_step():
    dims = EncodingDims(num_doors=2, num_mazes=2, maze_length=2)
    inputs = small_sequence(dims, 4)
    windows = sequence_windows(inputs, dims)
    assert windows.shape == (4, dims.window_width)
    for t in range(4):
        assert np.array_equal(windows[t], build_window(inputs, t, dims))
