"""Bit-vector encodings for maze rooms, door responses, and time-delay windows.

Every room is presented to a learner as a fixed-layout mark vector with four
sections, in this order:

    [context-begin marks (d)] [maze-entry marks (m)] [interior mark (1)] [context-end marks (d)]

where d is the number of doors and m the total number of maze modules.
Responses are one-hot vectors of width d+1; the last slot is the reserved
"wait" response.  The window builder stacks per-step inputs into the
time-delay input consumed by the sequence network: tap j of the window holds
the input observed j steps before the current one, zero-padded before the
start of the sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONTEXT_BEGIN = "context-begin"
MAZE_ENTRY = "maze-entry"
MAZE_INTERIOR = "maze-interior"
CONTEXT_END = "context-end"

ROOM_KINDS = (CONTEXT_BEGIN, MAZE_ENTRY, MAZE_INTERIOR, CONTEXT_END)


@dataclass(frozen=True)
class EncodingDims:
    """Vector widths derived from a task shape.

    num_mazes counts every maze module, context-attached and independent
    alike; each module owns one entry-mark bit.
    """

    num_doors: int
    num_mazes: int
    maze_length: int

    @property
    def input_width(self) -> int:
        return 2 * self.num_doors + self.num_mazes + 1

    @property
    def output_width(self) -> int:
        return self.num_doors + 1

    @property
    def wait_index(self) -> int:
        return self.num_doors

    @property
    def entry_offset(self) -> int:
        return self.num_doors

    @property
    def interior_offset(self) -> int:
        return self.num_doors + self.num_mazes

    @property
    def end_offset(self) -> int:
        return self.num_doors + self.num_mazes + 1

    @property
    def window_steps(self) -> int:
        # Longest generated sequence: begin + entry + interiors + end.
        return self.maze_length + 3

    @property
    def window_width(self) -> int:
        return self.window_steps * self.input_width


def encode_room(room_kind: str, index: int | None, dims: EncodingDims) -> np.ndarray:
    """Encode one room as a mark vector.

    ``index`` is the door for a context-begin room, the maze id for a
    maze-entry room, and ignored (may be None) for interior and context-end
    rooms.
    """
    vec = np.zeros(dims.input_width)
    if room_kind == CONTEXT_BEGIN:
        if index is None or not 0 <= index < dims.num_doors:
            raise ValueError(f"door index {index} out of range [0, {dims.num_doors})")
        vec[index] = 1.0
    elif room_kind == MAZE_ENTRY:
        if index is None or not 0 <= index < dims.num_mazes:
            raise ValueError(f"maze id {index} out of range [0, {dims.num_mazes})")
        vec[dims.entry_offset + index] = 1.0
    elif room_kind == MAZE_INTERIOR:
        vec[dims.interior_offset] = 1.0
    elif room_kind == CONTEXT_END:
        vec[dims.end_offset:] = 1.0
    else:
        raise ValueError(f"unknown room kind {room_kind!r}")
    return vec


def encode_response(index: int, dims: EncodingDims) -> np.ndarray:
    """One-hot response vector; index == num_doors means wait."""
    if not 0 <= index <= dims.num_doors:
        raise ValueError(f"response index {index} out of range [0, {dims.num_doors}]")
    vec = np.zeros(dims.output_width)
    vec[index] = 1.0
    return vec


def decode_response(vec: np.ndarray) -> int:
    """Argmax decoding; ties break toward the lowest index."""
    return int(np.argmax(vec))


def build_window(inputs: np.ndarray, t: int, dims: EncodingDims) -> np.ndarray:
    """Time-delay window at step t.

    Tap j (slots ``j*input_width .. (j+1)*input_width``) holds the input of
    step ``t - j``; taps reaching before the first step are zero.  The window
    therefore depends only on inputs 0..t, and a maze's input history occupies
    the same taps whether or not earlier rooms preceded it.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != dims.input_width:
        raise ValueError(f"expected inputs of shape (T, {dims.input_width}), got {inputs.shape}")
    if inputs.shape[0] > dims.window_steps:
        raise ValueError(
            f"sequence of {inputs.shape[0]} steps exceeds window capacity {dims.window_steps}"
        )
    if not 0 <= t < inputs.shape[0]:
        raise ValueError(f"step {t} out of range [0, {inputs.shape[0]})")
    window = np.zeros(dims.window_width)
    width = dims.input_width
    for j in range(t + 1):
        window[j * width:(j + 1) * width] = inputs[t - j]
    return window


def sequence_windows(inputs: np.ndarray, dims: EncodingDims) -> np.ndarray:
    """Stack build_window over every step of a sequence, shape (T, window_width)."""
    inputs = np.asarray(inputs, dtype=float)
    return np.stack([build_window(inputs, t, dims) for t in range(inputs.shape[0])])
