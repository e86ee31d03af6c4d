import numpy as np
import pytest

from conftest import make_traj
from oracles import enumerate_window_starts
from motion_translate.errors import CheckpointMismatch, OverlapTooShort, ShapeMismatch, TrajectoryShorterThanWindow
from motion_translate.motion import ChannelStats, WindowSpec, denormalize, normalize
from motion_translate.neural import MlpParams, forward, init_mlp
from motion_translate.reconstruct import (
    MergeState,
    crossfade_weights,
    merge_window,
    merge_windows,
    translate_trajectory,
)

KNOTS = np.arange(1, 16) / 16.0


def identity_generator(n):
    """ReLU/sigmoid network with output == input on the grid ``KNOTS``.

    The hidden layer interpolates logit(x) piecewise-linearly between knots,
    so sigmoid of the output pre-activation returns x exactly at each knot.
    """
    width = 6 * n
    k = len(KNOTS)
    logit = np.log(KNOTS / (1 - KNOTS))
    slopes = np.diff(logit) / np.diff(KNOTS)
    coef = np.concatenate([[slopes[0]], np.diff(slopes), [0.0]])
    w1 = np.zeros((width * k, width))
    b1 = np.zeros(width * k)
    w2 = np.zeros((width, width * k))
    for i in range(width):
        rows = slice(i * k, (i + 1) * k)
        w1[rows, i] = 1.0
        b1[rows] = -KNOTS
        w2[i, rows] = coef
    b2 = np.full(width, logit[0])
    return MlpParams([width, width * k, width], [w1, w2], [b1, b2])


STATS = ChannelStats([-1.0, 0.0, 2.0, -5.0, -5.0, 0.0], [3.0, 0.16, 2.5, 5.0, 5.0, 8.0])


def grid_traj(rng, length):
    levels = rng.integers(0, len(KNOTS), size=(length, 6))
    return denormalize(make_traj(KNOTS[levels]), STATS)


def test_crossfade_weights():
    assert crossfade_weights(2).tolist() == [1.0, 0.0]
    assert crossfade_weights(3).tolist() == [1.0, 0.5, 0.0]
    assert crossfade_weights(5).tolist() == [1.0, 0.75, 0.5, 0.25, 0.0]
    with pytest.raises(OverlapTooShort):
        crossfade_weights(1)


def test_merge_hand_example():
    spec = WindowSpec(4, 1)
    state = MergeState(spec, np.array([[5.0], [2.0], [2.0], [2.0]]))
    out = merge_window(state, np.array([[0.0], [0.0], [0.0], [7.0]]))
    assert out.assembled[:, 0].tolist() == [5.0, 2.0, 1.0, 0.0, 7.0]


def test_merge_first_window_verbatim(rng):
    win = rng.normal(size=(5, 6))
    state = merge_window(MergeState(WindowSpec(5, 2)), win)
    assert np.array_equal(state.assembled, win)


def test_merge_agreeing_windows_is_identity(rng):
    signal = rng.normal(size=(40, 6))
    spec = WindowSpec(8, 3)
    starts = enumerate_window_starts(40, 8, 3)
    merged = merge_windows([signal[s:s + 8] for s in starts], starts, spec)
    assert np.allclose(merged, signal, atol=1e-12)


def test_merge_grows_by_d(rng):
    spec = WindowSpec(6, 2)
    state = MergeState(spec)
    for k in range(5):
        state = merge_window(state, rng.normal(size=(6, 6)))
        assert len(state) == 6 + 2 * k


def test_merge_errors():
    spec = WindowSpec(4, 1)
    state = merge_window(MergeState(spec), np.zeros((4, 6)))
    with pytest.raises(ShapeMismatch):
        merge_window(state, np.zeros((3, 6)))
    with pytest.raises(ShapeMismatch):
        merge_window(state, np.zeros((4, 5)))
    short = merge_window(MergeState(WindowSpec(4, 3)), np.zeros((4, 6)))
    with pytest.raises(OverlapTooShort):
        merge_window(short, np.ones((4, 6)))
    assert merge_window(short, np.ones((4, 6)), allow_short=True).assembled[:, 0].tolist() == [0, 0, 0, 0, 1, 1, 1]


@pytest.mark.parametrize("a,b,L", [(0.0, 1.0, 2), (2.0, -1.0, 4), (0.3, 0.7, 9)])
def test_constant_windows_step_exactly(a, b, L):
    n = L + 3
    spec = WindowSpec(n, n - L)
    state = merge_window(MergeState(spec), np.full((n, 1), a))
    out = merge_window(state, np.full((n, 1), b)).assembled[:, 0]
    steps = np.abs(np.diff(out))
    nonzero = steps[steps > 0]
    assert np.allclose(nonzero, abs(a - b) / (L - 1), atol=1e-12)
    assert len(nonzero) == L - 1
    assert out.min() >= min(a, b) and out.max() <= max(a, b)


def test_merge_convex_random(rng):
    for _ in range(200):
        n = int(rng.integers(3, 12))
        d = int(rng.integers(1, n - 1))
        length = int(rng.integers(n, 4 * n))
        spec = WindowSpec(n, d)
        starts = enumerate_window_starts(length, n, d)
        windows = [rng.normal(size=(n, 2)) for _ in starts]
        lo = np.full((length, 2), np.inf)
        hi = np.full((length, 2), -np.inf)
        for s, w in zip(starts, windows):
            lo[s:s + n] = np.minimum(lo[s:s + n], w)
            hi[s:s + n] = np.maximum(hi[s:s + n], w)
        merged = merge_windows(windows, starts, spec)
        assert merged.shape == (length, 2)
        assert np.all(merged >= lo - 1e-12) and np.all(merged <= hi + 1e-12)


def test_identity_generator_probe_is_exact(rng):
    gen = identity_generator(4)
    x = KNOTS[rng.integers(0, 15, size=(7, 24))]
    out, _ = forward(gen, x)
    assert np.max(np.abs(out - x)) < 1e-12


@pytest.mark.parametrize("length,n,d", [(10, 4, 3), (4, 4, 2), (23, 6, 2), (17, 5, 5), (30, 8, 3)])
def test_translate_identity(rng, length, n, d):
    traj = grid_traj(rng, length)
    out = translate_trajectory(identity_generator(n), traj, WindowSpec(n, d), STATS)
    assert len(out) == length
    assert np.array_equal(out.t, traj.t)
    assert np.max(np.abs(out.values - traj.values)) < 1e-6


def test_translate_single_window_is_generator_output(rng):
    n = 5
    traj = make_traj(rng.normal(size=(n, 6)))
    gen = init_mlp([6 * n, 16, 6 * n], seed=2)
    out = translate_trajectory(gen, traj, WindowSpec(n, 2), STATS)
    raw, _ = forward(gen, normalize(traj, STATS).values.reshape(-1))
    expected = denormalize(traj.with_values(raw.reshape(n, 6)), STATS)
    assert np.allclose(out.values, expected.values, atol=1e-12)


def test_translate_rescale_input(rng):
    traj = grid_traj(rng, 12)
    out = translate_trajectory(identity_generator(4), traj, WindowSpec(4, 2), STATS, rescale="input")
    g = normalize(traj, STATS).values
    lo, hi = traj.values.min(axis=0), traj.values.max(axis=0)
    assert np.allclose(out.values, lo + g * (hi - lo), atol=1e-9)


def test_translate_errors(rng):
    traj = make_traj(rng.normal(size=(3, 6)))
    with pytest.raises(TrajectoryShorterThanWindow):
        translate_trajectory(init_mlp([24, 4, 24]), traj, WindowSpec(4, 2), STATS)
    with pytest.raises(CheckpointMismatch):
        translate_trajectory(init_mlp([30, 4, 30]), make_traj(np.zeros((9, 6))), WindowSpec(4, 2), STATS)
    with pytest.raises(ValueError):
        translate_trajectory(init_mlp([24, 4, 24]), make_traj(np.zeros((9, 6))), WindowSpec(4, 2), STATS, rescale="x")
