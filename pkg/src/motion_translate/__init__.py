"""Paired-GAN translation of non-expert motion (position + force) into expert-like motion."""

__version__ = "0.1.0"

from .dtw import AlignedPair, WarpPath, align_pair, dtw_distance, dtw_path, match_demonstrations
from .evaluate import EvalReport, evaluate, render_svg
from .gan import TrainConfig, TrainRecord, bce_loss, discriminator_loss, generator_loss, l1_loss, train
from .motion import (
    ChannelStats,
    MotionSample,
    MotionTrajectory,
    WindowSpec,
    compute_stats,
    denormalize,
    extract_windows,
    load_csv,
    normalize,
    save_csv,
)
from .reconstruct import crossfade_weights, merge_window, translate_trajectory
from .replay import ControllerParams, replay

__all__ = [
    "AlignedPair", "WarpPath", "align_pair", "dtw_distance", "dtw_path", "match_demonstrations",
    "EvalReport", "evaluate", "render_svg",
    "TrainConfig", "TrainRecord", "bce_loss", "discriminator_loss", "generator_loss", "l1_loss", "train",
    "ChannelStats", "MotionSample", "MotionTrajectory", "WindowSpec", "compute_stats", "denormalize",
    "extract_windows", "load_csv", "normalize", "save_csv",
    "crossfade_weights", "merge_window", "translate_trajectory",
    "ControllerParams", "replay",
]
