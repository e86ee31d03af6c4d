"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 runtime
failure (training divergence, unstable simulation).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .dtw import AlignedPair, dtw_distance
from .errors import DataError, EmptyList, InvalidTrajectory, MissingFile, MotionError, RuntimeFailure
from .evaluate import evaluate, render_svg
from .gan import TrainConfig, train
from .motion import CHANNELS, XY, ChannelStats, atomic_write_text, load_csv, normalize, save_csv
from .pipeline import prepare_pairs
from .reconstruct import translate_trajectory
from .replay import ControllerParams, PlantParams, replay
from .synth import Degradation, StrokeParams, make_corpus

PROG = "motion-translate"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n\n{self.format_usage()}")


def _csv_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFile(f"MissingFile: directory {directory}")
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise EmptyList(f"EmptyList: no CSV files in {directory}")
    return files


def _stats_to_csv(stats: ChannelStats) -> str:
    lines = ["channel,min,max"]
    lines += [f"{c},{lo!r},{hi!r}" for c, lo, hi in zip(CHANNELS, stats.min.tolist(), stats.max.tolist())]
    return "\n".join(lines) + "\n"


def _stats_from_csv(path: Path) -> ChannelStats:
    if not path.is_file():
        raise MissingFile(f"MissingFile: {path}")
    rows = {}
    for line in path.read_text(encoding="utf-8").strip().splitlines()[1:]:
        name, lo, hi = line.split(",")
        rows[name] = (float(lo), float(hi))
    try:
        return ChannelStats([rows[c][0] for c in CHANNELS], [rows[c][1] for c in CHANNELS])
    except KeyError as exc:
        raise InvalidTrajectory(f"{path}: missing channel {exc}") from None


# ------------------------------------------------------------ subcommands


def cmd_synth(args) -> str:
    base = StrokeParams()
    deg = Degradation(noise_amplitude_m=args.noise)
    experts, nonexperts = make_corpus(args.experts, args.nonexperts, base, args.seed, deg)
    out = Path(args.out)
    train_ex = experts[:-1] or experts
    train_ne = nonexperts[:-1] or nonexperts
    for k, tr in enumerate(train_ex):
        save_csv(tr, out / "experts" / f"expert_{k:02d}.csv")
    for k, tr in enumerate(train_ne):
        save_csv(tr, out / "nonexperts" / f"nonexpert_{k:02d}.csv")
    save_csv(experts[-1], out / "holdout" / "expert.csv")
    save_csv(nonexperts[-1], out / "holdout" / "nonexpert.csv")
    return (f"synth: {len(train_ex)} expert + {len(train_ne)} non-expert training trajectories "
            f"and 2 hold-outs written to {out}")


def cmd_align(args) -> str:
    ex_files = _csv_files(args.experts)
    ne_files = _csv_files(args.nonexperts)
    experts = [load_csv(f) for f in ex_files]
    nonexperts = [load_csv(f) for f in ne_files]
    pairs, matches, stats = prepare_pairs(nonexperts, experts)
    out = Path(args.out)
    lines = ["pair,nonexpert,expert,dtw_xy,length"]
    for k, ((i, j), pair) in enumerate(zip(matches, pairs)):
        save_csv(pair.source, out / f"pair_{k:02d}_source.csv")
        save_csv(pair.target, out / f"pair_{k:02d}_target.csv")
        d = dtw_distance(normalize(nonexperts[i], stats), normalize(experts[j], stats), XY)
        lines.append(f"{k},{ne_files[i].name},{ex_files[j].name},{d:.9g},{len(pair)}")
    atomic_write_text(out / "matches.csv", "\n".join(lines) + "\n")
    atomic_write_text(out / "stats.csv", _stats_to_csv(stats))
    return f"align: {len(pairs)} aligned pairs written to {out}"


def _load_pairs(directory) -> list[AlignedPair]:
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFile(f"MissingFile: directory {directory}")
    sources = sorted(directory.glob("pair_*_source.csv"))
    if not sources:
        raise EmptyList(f"EmptyList: no pair_*_source.csv files in {directory}")
    pairs = []
    for src in sources:
        tgt = src.with_name(src.name.replace("_source.csv", "_target.csv"))
        pairs.append(AlignedPair(load_csv(src), load_csv(tgt)))
    return pairs


def cmd_train(args) -> str:
    config = TrainConfig()
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise MissingFile(f"MissingFile: {path}")
        config = TrainConfig.from_text(path.read_text(encoding="utf-8"))
    if args.seed is not None:
        config = TrainConfig.from_text(config.to_text() + f"seed={args.seed}\n")
    pairs = _load_pairs(args.pairs)
    stats = _stats_from_csv(Path(args.pairs) / "stats.csv")

    def log(step, history):
        print(f"step {step}: g_l1={history.g_l1[-1]:.5f} g_bce={history.g_bce[-1]:.4f} "
              f"d_real={history.d_real[-1]:.4f} d_fake={history.d_fake[-1]:.4f}", file=sys.stderr)

    result = train(pairs, config, log=log if args.verbose else None)
    ckpt = Checkpoint(result.generator, result.discriminator, stats, config.window_spec,
                      config.seed, result.steps, config)
    out = Path(args.out)
    loss_path = Path(args.loss_csv) if args.loss_csv else out.with_name(out.stem + "_loss.csv")
    result.history.save_csv(loss_path)
    save_checkpoint(ckpt, out)
    if args.figure:
        from .plotting import plot_loss_history
        plot_loss_history(result.history, args.figure)
    return (f"train: {result.steps} steps, final L1 {result.history.g_l1[-1]:.5f}; "
            f"checkpoint {out}, losses {loss_path}")


def cmd_translate(args) -> str:
    ckpt = load_checkpoint(args.model)
    traj = load_csv(args.input)
    out = translate_trajectory(ckpt.generator, traj, ckpt.window_spec, ckpt.corpus_stats, args.rescale)
    save_csv(out, args.out)
    if args.figure:
        from .plotting import plot_channels
        plot_channels({"non-expert": traj, "generated": out}, args.figure)
    return f"translate: {len(out)} samples written to {args.out}"


def cmd_simulate(args) -> str:
    leader = load_csv(args.leader)
    controller = ControllerParams(ts=args.ts, kp=args.kp, kd=args.kd, g_pd=args.g_pd, g_f=args.g_f)
    plant = PlantParams(mass=args.mass, friction=args.friction)
    report = replay(leader, controller, plant=plant, hold=args.hold)
    save_csv(report.follower, args.out)
    atomic_write_text(args.report, report.to_text())
    if args.figure:
        from .plotting import plot_replay
        plot_replay(leader, report.follower, args.figure)
    rms = ", ".join(f"{a}={v * 1e3:.4f} mm" for a, v in zip("xyz", report.rms_error))
    return f"simulate: follower written to {args.out}; RMS error {rms}"


def cmd_eval(args) -> str:
    expert = load_csv(args.expert)
    nonexpert = load_csv(args.nonexpert)
    generated = load_csv(args.generated)
    report = evaluate(nonexpert, generated, expert)
    atomic_write_text(args.out, report.to_csv())
    if args.table:
        print(report.to_table(), end="")
    if args.figure:
        from .plotting import plot_dtw_report
        plot_dtw_report(report, args.figure)
    if args.channels_figure:
        from .plotting import plot_channels
        plot_channels({"non-expert": nonexpert, "expert": expert, "generated": generated}, args.channels_figure)
    better = sum(g < n for n, g in zip(report.nonexpert[:2], report.generated[:2]))
    return f"eval: report written to {args.out}; generated closer to expert on {better}/2 of x, y"


def cmd_plot(args) -> str:
    traj = load_csv(args.input)
    render_svg(traj, args.out, threshold=args.threshold)
    if args.png:
        from .plotting import plot_xy_force
        plot_xy_force(traj, args.png, threshold=args.threshold)
    return f"plot: {len(traj) - 1} segments written to {args.out}"


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Translate non-expert motion into expert-like motion with a paired GAN.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    s = sub.add_parser("synth", help="write a seeded synthetic expert/non-expert corpus",
                       description="Writes OUT/experts/*.csv, OUT/nonexperts/*.csv (training) and "
                                   "OUT/holdout/{expert,nonexpert}.csv. CSV header: t,x,y,z,fx,fy,fz.")
    s.add_argument("--out", required=True)
    s.add_argument("--experts", type=int, default=3)
    s.add_argument("--nonexperts", type=int, default=6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", type=float, default=Degradation().noise_amplitude_m,
                   help="non-expert positional jitter amplitude in m")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("align", help="match and DTW-align non-expert/expert demonstrations",
                       description="Writes OUT/pair_NN_{source,target}.csv (normalized), "
                                   "OUT/matches.csv (pair,nonexpert,expert,dtw_xy,length) and "
                                   "OUT/stats.csv (channel,min,max).")
    s.add_argument("--experts", required=True, help="directory of expert CSVs")
    s.add_argument("--nonexperts", required=True, help="directory of non-expert CSVs")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_align)

    s = sub.add_parser("train", help="train the generator/discriminator pair",
                       description="Config file: key=value lines (lambda_l1, epochs, batch_size, lr_g, lr_d, "
                                   "window_n, window_d, seed, d_steps, g_hidden, d_hidden, dropout). "
                                   "Loss CSV: step,g_bce,g_l1,g_total,d_real,d_fake.")
    s.add_argument("--pairs", required=True, help="directory written by 'align'")
    s.add_argument("--config", help="key=value training config file")
    s.add_argument("--out", required=True, help="checkpoint JSON path")
    s.add_argument("--loss-csv", help="loss history path (default: <out>_loss.csv)")
    s.add_argument("--seed", type=int, help="override the config seed")
    s.add_argument("--figure", help="optional PNG of the loss curves")
    s.add_argument("-v", "--verbose", action="store_true", help="print losses every 100 steps to stderr")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("translate", help="translate a trajectory with a trained checkpoint")
    s.add_argument("--model", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--rescale", choices=("stats", "input"), default="stats",
                   help="map output back with the checkpoint's corpus min/max or the input's own")
    s.add_argument("--figure", help="optional PNG comparing input and output channels")
    s.set_defaults(func=cmd_translate)

    c = ControllerParams()
    pl = PlantParams()
    s = sub.add_parser("simulate", help="replay a leader trajectory on the simulated PD follower",
                       description="Writes the follower CSV (positions + low-passed forces) and a "
                                   "key=value metrics report (rms_x_m=..., max_x_m=...).")
    s.add_argument("--leader", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--ts", type=float, default=c.ts)
    s.add_argument("--kp", type=float, default=c.kp)
    s.add_argument("--kd", type=float, default=c.kd)
    s.add_argument("--g-pd", type=float, default=c.g_pd)
    s.add_argument("--g-f", type=float, default=c.g_f)
    s.add_argument("--mass", type=float, default=pl.mass)
    s.add_argument("--friction", type=float, default=pl.friction)
    s.add_argument("--hold", choices=("linear", "zoh"), default="linear")
    s.add_argument("--figure", help="optional PNG of leader/follower tracking")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("eval", help="per-channel DTW distances to the expert",
                       description="Report CSV: channel,nonexpert_dtw,generated_dtw.")
    s.add_argument("--expert", required=True)
    s.add_argument("--nonexpert", required=True)
    s.add_argument("--generated", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--table", action="store_true", help="also print an aligned table to stdout")
    s.add_argument("--figure", help="optional PNG bar chart of the report")
    s.add_argument("--channels-figure", help="optional PNG of all channels over time")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("plot", help="render the x-y path as SVG, red where Fz > threshold")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--threshold", type=float, default=0.1, help="Fz threshold in N (default 0.1)")
    s.add_argument("--png", help="optional matplotlib PNG of the same view")
    s.set_defaults(func=cmd_plot)
    return p


def _describe(command: str, exc: BaseException) -> str:
    name = type(exc).__name__
    msg = str(exc)
    if not msg.startswith(name):
        msg = f"{name}: {msg}"
    return f"{PROG} {command}: {msg}"


def run(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        print(parser.format_help(), file=sys.stderr)
        return 1
    try:
        summary = args.func(args)
    except RuntimeFailure as exc:
        print(_describe(args.command, exc), file=sys.stderr)
        return 3
    except (DataError, MotionError, OSError) as exc:
        print(_describe(args.command, exc), file=sys.stderr)
        return 2
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
