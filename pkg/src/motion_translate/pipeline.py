"""In-process composition of the corpus → align → train → translate → eval chain."""

from __future__ import annotations

from dataclasses import dataclass

from .dtw import AlignedPair, align_pair, match_demonstrations
from .evaluate import EvalReport, evaluate
from .gan import TrainConfig, TrainResult, train
from .motion import ChannelStats, MotionTrajectory, corpus_stats, normalize
from .reconstruct import translate_trajectory
from .synth import Degradation, StrokeParams, make_corpus


def prepare_pairs(non_experts: list[MotionTrajectory], experts: list[MotionTrajectory],
                  stats: ChannelStats | None = None):
    """Normalize with corpus-wide min/max, match and align.

    Returns ``(pairs, matches, stats)``.
    """
    if stats is None:
        stats = corpus_stats([*non_experts, *experts])
    ne_norm = [normalize(t, stats) for t in non_experts]
    ex_norm = [normalize(t, stats) for t in experts]
    matches = match_demonstrations(ne_norm, ex_norm)
    pairs = [align_pair(ne_norm[i], ex_norm[j]) for i, j in matches]
    return pairs, matches, stats


@dataclass
class Experiment:
    experts: list[MotionTrajectory]
    nonexperts: list[MotionTrajectory]
    pairs: list[AlignedPair]
    result: TrainResult
    generated: MotionTrajectory
    report: EvalReport


def run_experiment(config: TrainConfig, corpus_seed: int, n_experts: int = 3, n_nonexperts: int = 6,
                   base: StrokeParams | None = None, degradation: Degradation | None = None, rescale: str = "stats") -> Experiment:
    """Train on all but the hold-outs, translate the held-out non-expert, evaluate."""
    experts, nonexperts = make_corpus(n_experts, n_nonexperts, base, corpus_seed, degradation)
    train_ex = experts[:-1] or experts
    train_ne = nonexperts[:-1] or nonexperts
    pairs, _, stats = prepare_pairs(train_ne, train_ex)
    result = train(pairs, config)
    generated = translate_trajectory(result.generator, nonexperts[-1], config.window_spec, stats, rescale)
    report = evaluate(nonexperts[-1], generated, experts[-1])
    return Experiment(experts, nonexperts, pairs, result, generated, report)
