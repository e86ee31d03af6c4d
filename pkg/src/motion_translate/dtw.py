"""Dynamic time warping and construction of aligned training pairs.

Step pattern is the symmetric ``{(1,0), (0,1), (1,1)}`` with unit weights and
no band. The accumulated-cost table is filled one anti-diagonal at a time so
the inner recurrence runs vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyChannelSet, EmptyList, EmptySequence, InvalidTrajectory
from .motion import XY, MotionTrajectory

COSTS = ("euclidean", "manhattan")


@dataclass(frozen=True)
class WarpPath:
    steps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        steps = tuple((int(i), int(j)) for i, j in self.steps)
        if not steps or steps[0] != (0, 0):
            raise InvalidTrajectory("warp path must start at (0, 0)")
        for (i0, j0), (i1, j1) in zip(steps, steps[1:]):
            if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1), (1, 1)):
                raise InvalidTrajectory(f"illegal warp step {(i0, j0)} -> {(i1, j1)}")
        object.__setattr__(self, "steps", steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True)
class AlignedPair:
    """Equal-length normalized (non-expert, expert) trajectories."""

    source: MotionTrajectory
    target: MotionTrajectory

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise InvalidTrajectory("aligned source and target lengths differ")
        for side in (self.source, self.target):
            if side.values.min() < 0.0 or side.values.max() > 1.0:
                raise InvalidTrajectory("aligned pair values must be normalized to [0, 1]")

    def __len__(self):
        return len(self.source)


def _as_2d(seq) -> np.ndarray:
    if isinstance(seq, MotionTrajectory):
        arr = seq.values
    else:
        arr = np.asarray(seq, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] == 0:
        raise EmptySequence("EmptySequence: DTW needs non-empty sequences")
    return arr


def cost_matrix(a, b, channels: Sequence[int] | None = None, cost: str = "euclidean") -> np.ndarray:
    """Pairwise per-step cost between every sample of ``a`` and of ``b``."""
    a = _as_2d(a)
    b = _as_2d(b)
    if channels is None:
        channels = range(a.shape[1])
    channels = list(channels)
    if not channels:
        raise EmptyChannelSet("EmptyChannelSet: select at least one channel")
    diff = a[:, None, channels] - b[None, :, channels]
    if cost == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=2))
    if cost == "manhattan":
        return np.sum(np.abs(diff), axis=2)
    raise ValueError(f"unknown cost {cost!r}; expected one of {COSTS}")


def accumulated_cost(c: np.ndarray) -> np.ndarray:
    """Accumulated DTW table with a leading row/column of ``inf``.

    ``D[i+1, j+1] = c[i, j] + min(D[i, j], D[i, j+1], D[i+1, j])``.
    """
    la, lb = c.shape
    D = np.full((la + 1, lb + 1), np.inf)
    D[0, 0] = 0.0
    for k in range(la + lb - 1):
        i = np.arange(max(0, k - lb + 1), min(k, la - 1) + 1)
        j = k - i
        prev = np.minimum(np.minimum(D[i, j], D[i, j + 1]), D[i + 1, j])
        D[i + 1, j + 1] = c[i, j] + prev
    return D


def dtw_distance(a, b, channels: Sequence[int] | None = None, cost: str = "euclidean") -> float:
    """Minimum summed per-step cost over all monotone warping paths."""
    c = cost_matrix(a, b, channels, cost)
    return float(accumulated_cost(c)[-1, -1])


def dtw_path(a, b, channels: Sequence[int] | None = None, cost: str = "euclidean") -> tuple[float, WarpPath]:
    """Distance plus the optimal path.

    Backtracking prefers the diagonal predecessor on ties, then ``(i-1, j)``,
    then ``(i, j-1)``, so paths are reproducible.
    """
    c = cost_matrix(a, b, channels, cost)
    D = accumulated_cost(c)
    i, j = c.shape[0] - 1, c.shape[1] - 1
    steps = [(i, j)]
    while i > 0 or j > 0:
        # D is offset by one: cell (i, j) lives at D[i+1, j+1].
        diag, up, left = D[i, j], D[i, j + 1], D[i + 1, j]
        best = min(diag, up, left)
        if diag == best:
            i, j = i - 1, j - 1
        elif up == best:
            i -= 1
        else:
            j -= 1
        steps.append((i, j))
    steps.reverse()
    return float(D[-1, -1]), WarpPath(tuple(steps))


def distance_matrix(non_experts, experts, channels=XY, cost: str = "euclidean") -> np.ndarray:
    return np.array([[dtw_distance(ne, ex, channels, cost) for ex in experts] for ne in non_experts])


def match_demonstrations(non_experts, experts, channels=XY, cost: str = "euclidean") -> list[tuple[int, int]]:
    """Pair every non-expert with the expert at minimum x/y DTW distance.

    Several non-experts may share an expert. Ties go to the lower expert index.
    """
    if not non_experts or not experts:
        raise EmptyList("EmptyList: need at least one non-expert and one expert trajectory")
    dist = distance_matrix(non_experts, experts, channels, cost)
    return [(k, int(np.argmin(row))) for k, row in enumerate(dist)]


def align_pair(source: MotionTrajectory, target: MotionTrajectory, channels=XY, cost: str = "euclidean") -> AlignedPair:
    """Warp ``source`` and ``target`` onto their common x/y DTW path.

    One output sample is emitted per path step, so both sides have the path
    length and are re-stamped at the source rate.
    """
    _, path = dtw_path(source, target, channels, cost)
    idx = np.array(path.steps)
    src = MotionTrajectory.from_values(source.values[idx[:, 0]], source.rate_hz)
    tgt = MotionTrajectory.from_values(target.values[idx[:, 1]], source.rate_hz)
    return AlignedPair(src, tgt)
