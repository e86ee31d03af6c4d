"""Per-channel DTW evaluation and SVG trajectory rendering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dtw import dtw_distance
from .motion import CHANNELS, MotionTrajectory, atomic_write_text

LABELS = ("x", "y", "z", "Fx", "Fy", "Fz")
FORCE_THRESHOLD_N = 0.1
BLUE = "#1f4fd8"
RED = "#d81f1f"


@dataclass(frozen=True)
class EvalReport:
    """DTW distance to the expert, per channel, in native units (m or N)."""

    nonexpert: tuple
    generated: tuple

    def rows(self):
        return list(zip(LABELS, self.nonexpert, self.generated))

    def to_csv(self) -> str:
        lines = ["channel,nonexpert_dtw,generated_dtw"]
        lines += [f"{c},{a:.9g},{b:.9g}" for c, a, b in self.rows()]
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        lines = [f"{'channel':<8}{'non-expert':>14}{'generated':>14}"]
        lines += [f"{c:<8}{a:>14.4g}{b:>14.4g}" for c, a, b in self.rows()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "EvalReport":
        rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
        return cls(tuple(float(r[1]) for r in rows), tuple(float(r[2]) for r in rows))


def evaluate(non_expert: MotionTrajectory, generated: MotionTrajectory, expert: MotionTrajectory,
             cost: str = "euclidean") -> EvalReport:
    """Single-channel DTW of non-expert and generated data against the expert."""
    ne, gen = [], []
    for c in range(len(CHANNELS)):
        ne.append(dtw_distance(non_expert, expert, [c], cost))
        gen.append(dtw_distance(generated, expert, [c], cost))
    return EvalReport(tuple(ne), tuple(gen))


def segment_colors(traj: MotionTrajectory, threshold: float = FORCE_THRESHOLD_N) -> list[str]:
    """Colour of each x-y segment, decided by the segment's starting Fz."""
    fz = traj.channel("fz")[:-1]
    return [RED if f > threshold else BLUE for f in fz]


def render_svg_text(traj: MotionTrajectory, width: int = 600, height: int = 600,
                    threshold: float = FORCE_THRESHOLD_N) -> str:
    xy = traj.values[:, :2]
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    lo = lo - 0.05 * span
    span = span * 1.1
    scale = min(width / span[0], height / span[1])
    # SVG y grows downward.
    px = (xy[:, 0] - lo[0]) * scale
    py = (lo[1] + span[1] - xy[:, 1]) * scale
    vw, vh = span[0] * scale, span[1] * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{vw:.2f}" height="{vh:.2f}" viewBox="0 0 {vw:.3f} {vh:.3f}">',
        f'<title>x-y trajectory (red: Fz &gt; {threshold:g} N)</title>',
        f'<rect x="0" y="0" width="{vw:.3f}" height="{vh:.3f}" fill="white"/>',
        '<g stroke-width="1.5" stroke-linecap="round">',
    ]
    for k, color in enumerate(segment_colors(traj, threshold)):
        out.append(
            f'<line x1="{px[k]:.3f}" y1="{py[k]:.3f}" x2="{px[k + 1]:.3f}" y2="{py[k + 1]:.3f}" stroke="{color}"/>'
        )
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def render_svg(traj: MotionTrajectory, path, threshold: float = FORCE_THRESHOLD_N) -> None:
    atomic_write_text(path, render_svg_text(traj, threshold=threshold))
