"""Trajectory data model, CSV I/O, min-max normalization and windowing.

A trajectory is stored column-wise: a time vector ``t`` of shape ``(N,)`` and
a value matrix of shape ``(N, 6)`` whose columns follow :data:`CHANNELS`.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import (
    InvalidTrajectory,
    IoFailure,
    MalformedRow,
    MissingFile,
    NonMonotonicTime,
    TooShort,
    TrajectoryShorterThanWindow,
)

CHANNELS = ("x", "y", "z", "fx", "fy", "fz")
CSV_HEADER = "t," + ",".join(CHANNELS)
POSITION = (0, 1, 2)
FORCE = (3, 4, 5)
XY = (0, 1)

_RATE_TOL = 1e-9


class MotionSample(NamedTuple):
    t: float
    x: float
    y: float
    z: float
    fx: float
    fy: float
    fz: float


@dataclass(frozen=True, eq=False)
class MotionTrajectory:
    """Uniformly sampled 6-channel motion (x, y, z in m; fx, fy, fz in N)."""

    t: np.ndarray
    values: np.ndarray
    rate_hz: float

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or v.shape != (t.shape[0], len(CHANNELS)):
            raise InvalidTrajectory(
                f"expected t of shape (N,) and values of shape (N, 6), got {t.shape} and {v.shape}"
            )
        if t.shape[0] < 2:
            raise TooShort(f"trajectory needs at least 2 samples, got {t.shape[0]}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InvalidTrajectory("non-finite sample value")
        if not (self.rate_hz > 0 and math.isfinite(self.rate_hz)):
            raise InvalidTrajectory(f"rate_hz must be positive, got {self.rate_hz}")
        if t[0] < 0:
            raise InvalidTrajectory("timestamps must be non-negative")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise InvalidTrajectory("timestamps must be strictly increasing")
        step = 1.0 / self.rate_hz
        tol = _RATE_TOL + 1e-12 * abs(t[-1])
        if np.max(np.abs(dt - step)) > tol:
            raise InvalidTrajectory(f"timestamps inconsistent with rate_hz={self.rate_hz}")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "rate_hz", float(self.rate_hz))

    @classmethod
    def from_values(cls, values, rate_hz: float = 100.0, t0: float = 0.0) -> "MotionTrajectory":
        """Build a trajectory with timestamps ``t0 + k / rate_hz``."""
        values = np.asarray(values, dtype=float)
        t = t0 + np.arange(values.shape[0]) / rate_hz
        return cls(t, values, rate_hz)

    def with_values(self, values) -> "MotionTrajectory":
        """Same time base, new channel values."""
        return MotionTrajectory(self.t, values, self.rate_hz)

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def samples(self) -> list[MotionSample]:
        return [MotionSample(float(ti), *map(float, row)) for ti, row in zip(self.t, self.values)]

    def channel(self, name: str) -> np.ndarray:
        return self.values[:, CHANNELS.index(name)]

    def __eq__(self, other):
        if not isinstance(other, MotionTrajectory):
            return NotImplemented
        return (
            self.rate_hz == other.rate_hz
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel minimum and maximum, each a length-6 array."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo = np.array(self.min, dtype=float).reshape(-1)
        hi = np.array(self.max, dtype=float).reshape(-1)
        if lo.shape != (len(CHANNELS),) or hi.shape != (len(CHANNELS),):
            raise InvalidTrajectory("ChannelStats needs 6 minima and 6 maxima")
        if np.any(hi < lo):
            raise InvalidTrajectory("ChannelStats max must be >= min for every channel")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    def to_dict(self) -> dict:
        return {c: [float(a), float(b)] for c, a, b in zip(CHANNELS, self.min, self.max)}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelStats":
        return cls([d[c][0] for c in CHANNELS], [d[c][1] for c in CHANNELS])

    def __eq__(self, other):
        if not isinstance(other, ChannelStats):
            return NotImplemented
        return np.array_equal(self.min, other.min) and np.array_equal(self.max, other.max)

    __hash__ = None


@dataclass(frozen=True)
class WindowSpec:
    n: int
    d: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.d) != self.d:
            raise InvalidTrajectory("window sizes must be integers")
        if self.n < 2 or not 1 <= self.d <= self.n:
            raise InvalidTrajectory(f"invalid WindowSpec(n={self.n}, d={self.d}); need n >= 2, 1 <= d <= n")

    @property
    def overlap(self) -> int:
        return self.n - self.d


# --------------------------------------------------------------------- CSV


def _format(v: float) -> str:
    s = f"{v:.9f}"
    return "0.000000000" if s == "-0.000000000" else s


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.chmod(tmp, 0o644)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoFailure(f"IoFailure writing {path}: {exc}") from exc


def load_csv(path) -> MotionTrajectory:
    """Read a ``t,x,y,z,fx,fy,fz`` CSV file.

    The sampling rate is inferred from the median timestamp delta.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"MissingFile: {path}")
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"IoFailure reading {path}: {exc}") from exc
    if not lines or lines[0].strip() != CSV_HEADER:
        raise MalformedRow(1, f"expected header {CSV_HEADER!r}")

    rows = []
    prev_t = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 7:
            raise MalformedRow(lineno, f"expected 7 fields, got {len(fields)}")
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise MalformedRow(lineno, str(exc)) from None
        if not all(math.isfinite(v) for v in row):
            raise MalformedRow(lineno, "non-finite value")
        if row[0] < 0:
            raise MalformedRow(lineno, "negative timestamp")
        if prev_t is not None and row[0] <= prev_t:
            raise NonMonotonicTime(lineno)
        prev_t = row[0]
        rows.append(row)
    if len(rows) < 2:
        raise TooShort(f"TooShort: {path} has {len(rows)} data rows, need >= 2")

    data = np.array(rows)
    rate = 1.0 / float(np.median(np.diff(data[:, 0])))
    # Snap to the nearest value representable at CSV precision.
    rounded = round(rate, 6)
    if abs(rounded - rate) < 1e-6 * rate:
        rate = rounded
    return MotionTrajectory(data[:, 0], data[:, 1:], rate)


def trajectory_to_csv(traj: MotionTrajectory) -> str:
    lines = [CSV_HEADER]
    for ti, row in zip(traj.t, traj.values):
        lines.append(",".join([_format(ti)] + [_format(v) for v in row]))
    return "\n".join(lines) + "\n"


def save_csv(traj: MotionTrajectory, path) -> None:
    atomic_write_text(path, trajectory_to_csv(traj))


# ----------------------------------------------------------- normalization


def compute_stats(traj: MotionTrajectory) -> ChannelStats:
    return ChannelStats(traj.values.min(axis=0), traj.values.max(axis=0))


def corpus_stats(trajectories) -> ChannelStats:
    """Channel-wise min/max over several trajectories."""
    stats = [compute_stats(tr) for tr in trajectories]
    return ChannelStats(
        np.min([s.min for s in stats], axis=0),
        np.max([s.max for s in stats], axis=0),
    )


def normalize(traj: MotionTrajectory, stats: ChannelStats) -> MotionTrajectory:
    """Map each channel to [0, 1]; flat channels (max == min) map to 0.5."""
    span = stats.max - stats.min
    flat = span == 0
    out = (traj.values - stats.min) / np.where(flat, 1.0, span)
    out[:, flat] = 0.5
    return traj.with_values(out)


def denormalize(traj: MotionTrajectory, stats: ChannelStats) -> MotionTrajectory:
    return traj.with_values(stats.min + traj.values * (stats.max - stats.min))


# --------------------------------------------------------------- windowing


def window_starts(length: int, spec: WindowSpec) -> list[int]:
    """Regular starts ``0, d, 2d, ...`` plus a tail window anchored at ``length - n``."""
    if length < spec.n:
        raise TrajectoryShorterThanWindow(
            f"TrajectoryShorterThanWindow: length {length} < window {spec.n}"
        )
    starts = list(range(0, length - spec.n + 1, spec.d))
    if starts[-1] + spec.n < length:
        starts.append(length - spec.n)
    return starts


def extract_windows(traj: MotionTrajectory, spec: WindowSpec) -> tuple[list[np.ndarray], list[int]]:
    """Cut fixed-size ``(n, 6)`` windows; returns ``(windows, starts)``."""
    starts = window_starts(len(traj), spec)
    return [traj.values[s:s + spec.n] for s in starts], starts
