"""Whole-trajectory translation by windowed generation and crossfade merging."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CheckpointMismatch, OverlapTooShort, ShapeMismatch
from .gan import N_CHANNELS, flatten_window, unflatten_window
from .motion import ChannelStats, MotionTrajectory, WindowSpec, compute_stats, denormalize, extract_windows, normalize
from .neural import MlpParams, forward


def crossfade_weights(overlap_len: int) -> np.ndarray:
    """Weights on the already-assembled data across an overlap.

    Linear from 1 (assembled only) at the first overlap sample down to 0
    (new window only) at the last.
    """
    if overlap_len < 2:
        raise OverlapTooShort(f"OverlapTooShort: overlap {overlap_len} < 2")
    k = np.arange(overlap_len)
    return (overlap_len - 1 - k) / (overlap_len - 1)


@dataclass
class MergeState:
    window_spec: WindowSpec
    assembled: np.ndarray = field(default_factory=lambda: np.empty((0, N_CHANNELS)))

    def __len__(self):
        return self.assembled.shape[0]


def merge_window(state: MergeState, new_window, start: int | None = None,
                 allow_short: bool = False) -> MergeState:
    """Blend ``new_window`` into the assembly and append its tail.

    ``start`` is the absolute index of the window's first sample; by default
    the window follows the previous one by ``d`` samples, giving an overlap of
    ``n - d``. The first window is copied verbatim.

    Overlaps shorter than 2 raise :class:`OverlapTooShort` unless
    ``allow_short`` is set: then an empty overlap concatenates and a
    single-sample overlap keeps the assembled sample.
    """
    spec = state.window_spec
    win = np.asarray(new_window, dtype=float)
    if win.ndim == 1:
        win = win[:, None]
    if win.shape[0] != spec.n or (len(state) and win.shape[1] != state.assembled.shape[1]):
        raise ShapeMismatch(f"ShapeMismatch: window {win.shape}, expected ({spec.n}, channels)")
    if len(state) == 0:
        return MergeState(spec, win.copy())

    assembled = state.assembled
    if start is None:
        start = len(state) - spec.overlap
    overlap = len(state) - start
    if overlap >= spec.n:
        raise ShapeMismatch(f"window starting at {start} adds no new samples")
    if overlap < 0:
        raise ShapeMismatch(f"window starting at {start} leaves a gap after sample {len(state)}")
    if overlap < 2 and allow_short:
        w = np.ones((overlap, 1))
    else:
        w = crossfade_weights(overlap)[:, None]
    blended = w * assembled[start:] + (1.0 - w) * win[:overlap]
    out = np.concatenate([assembled[:start], blended, win[overlap:]], axis=0)
    return MergeState(spec, out)


def merge_windows(windows, starts, spec: WindowSpec, allow_short: bool = False) -> np.ndarray:
    state = MergeState(spec)
    for win, s in zip(windows, starts):
        state = merge_window(state, win, s if len(state) else None, allow_short)
    return state.assembled


def generate_windows(generator: MlpParams, windows) -> list[np.ndarray]:
    """Eval-mode generator forward over a batch of ``(n, 6)`` windows."""
    batch = np.array([flatten_window(w) for w in windows])
    out, _ = forward(generator, batch, "eval")
    return [unflatten_window(row) for row in out]


def translate_trajectory(generator: MlpParams, traj: MotionTrajectory, spec: WindowSpec,
                         stats: ChannelStats | None = None, rescale: str = "stats") -> MotionTrajectory:
    """Translate a physical-unit trajectory of any length >= ``spec.n``.

    The input is normalized with ``stats`` (the training corpus min/max; the
    input's own min/max when omitted), windowed, translated and merged.
    ``rescale="stats"`` maps the result back with the same ``stats``;
    ``rescale="input"`` stretches it onto the input's own min/max instead.
    Overlaps shorter than two samples are merged without blending. Output
    keeps the input's timestamps.
    """
    if rescale not in ("stats", "input"):
        raise ValueError(f"rescale must be 'stats' or 'input', got {rescale!r}")
    width = N_CHANNELS * spec.n
    if generator.layer_dims[0] != width or generator.layer_dims[-1] != width:
        raise CheckpointMismatch(
            f"CheckpointMismatch: generator maps {generator.layer_dims[0]} -> {generator.layer_dims[-1]} "
            f"values, window n={spec.n} needs {width}"
        )
    own = compute_stats(traj)
    if stats is None:
        stats = own
    norm = normalize(traj, stats)
    windows, starts = extract_windows(norm, spec)
    merged = merge_windows(generate_windows(generator, windows), starts, spec, allow_short=True)
    return denormalize(traj.with_values(merged), own if rescale == "input" else stats)
