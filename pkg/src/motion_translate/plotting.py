"""Matplotlib figures written next to the CSV reports.

Everything renders through the Agg backend to PNG with version metadata
stripped, so repeated runs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from .evaluate import BLUE, FORCE_THRESHOLD_N, LABELS, RED, EvalReport  # noqa: E402
from .motion import MotionTrajectory  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 120,
    "path.simplify": False,
}
UNITS = ("m", "m", "m", "N", "N", "N")
SERIES_COLORS = {"non-expert": "0.55", "expert": "k", "generated": "tab:red"}


def _save(fig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)


def plot_channels(series: dict[str, MotionTrajectory], path) -> None:
    """Six stacked panels, one per channel, every series against time."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(6, 1, figsize=(6.5, 8.0), sharex=True)
        for name, traj in series.items():
            color = SERIES_COLORS.get(name)
            for c, ax in enumerate(axes):
                ax.plot(traj.t, traj.values[:, c], color=color, label=name)
        for c, ax in enumerate(axes):
            ax.set_ylabel(f"{LABELS[c]} [{UNITS[c]}]")
        axes[0].legend(loc="upper right", ncol=len(series), frameon=False)
        axes[-1].set_xlabel("time [s]")
        fig.align_ylabels(axes)
        fig.tight_layout()
        _save(fig, path)


def plot_xy_force(traj: MotionTrajectory, path, threshold: float = FORCE_THRESHOLD_N, title: str | None = None) -> None:
    """x-y path, red where the segment starts above ``threshold`` newtons of Fz."""
    xy = traj.values[:, :2] * 1e3
    segs = np.stack([xy[:-1], xy[1:]], axis=1)
    colors = [RED if f > threshold else BLUE for f in traj.channel("fz")[:-1]]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        ax.add_collection(LineCollection(segs, colors=colors, linewidths=1.5))
        ax.autoscale()
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x [mm]")
        ax.set_ylabel("y [mm]")
        ax.set_title(title or f"Fz > {threshold:g} N in red")
        fig.tight_layout()
        _save(fig, path)


def plot_dtw_report(report: EvalReport, path) -> None:
    """Grouped bars of per-channel DTW distance, log scale."""
    x = np.arange(len(LABELS))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 3.2))
        ax.bar(x - 0.2, report.nonexpert, 0.4, color=SERIES_COLORS["non-expert"], label="non-expert")
        ax.bar(x + 0.2, report.generated, 0.4, color=SERIES_COLORS["generated"], label="generated")
        ax.set_xticks(x, LABELS)
        ax.set_yscale("log")
        ax.set_ylabel("DTW distance to expert")
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_loss_history(history, path, smooth: int = 25) -> None:
    """Generator and discriminator loss terms per step, with a moving average."""
    def ma(v):
        v = np.asarray(v, dtype=float)
        if len(v) < smooth:
            return v
        return np.convolve(v, np.ones(smooth) / smooth, mode="valid")

    with plt.rc_context(STYLE):
        fig, (ax_g, ax_d) = plt.subplots(2, 1, figsize=(6.0, 4.5), sharex=True)
        ax_g.plot(ma(history.g_l1), label="L1")
        ax_g.plot(ma(history.g_bce), label="adversarial")
        ax_g.set_yscale("log")
        ax_g.set_ylabel("generator")
        ax_g.legend(frameon=False)
        ax_d.plot(ma(history.d_real), label="real pairs")
        ax_d.plot(ma(history.d_fake), label="fake pairs")
        ax_d.set_ylabel("discriminator")
        ax_d.set_xlabel("step")
        ax_d.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_replay(leader: MotionTrajectory, follower: MotionTrajectory, path) -> None:
    """Leader vs follower position and tracking error per axis."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(3, 2, figsize=(7.5, 5.5), sharex=True)
        for k in range(3):
            axes[k, 0].plot(leader.t, leader.values[:, k] * 1e3, "k", label="leader")
            axes[k, 0].plot(follower.t, follower.values[:, k] * 1e3, "--", color="tab:red", label="follower")
            axes[k, 0].set_ylabel(f"{LABELS[k]} [mm]")
            axes[k, 1].plot(leader.t, (leader.values[:, k] - follower.values[:, k]) * 1e3, color="tab:blue")
            axes[k, 1].set_ylabel("error [mm]")
        axes[0, 0].legend(frameon=False)
        axes[-1, 0].set_xlabel("time [s]")
        axes[-1, 1].set_xlabel("time [s]")
        fig.tight_layout()
        _save(fig, path)
