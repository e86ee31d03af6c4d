"""Drives the full CLI chain into a directory; shared by CLI and acceptance tests."""

from pathlib import Path

from motion_translate.cli import run

SMALL_CONFIG = """\
epochs=2
batch_size=32
window_n=16
window_d=4
g_hidden=64,64
d_hidden=32
"""


def run_pipeline(root, seed=42, experts=3, nonexperts=6, figures=True):
    """Run synth, align, train, translate, simulate, eval and plot. Returns (exit codes, output files)."""
    root = Path(root)
    cfg = root / "train.cfg"
    cfg.parent.mkdir(parents=True, exist_ok=True)
    cfg.write_text(SMALL_CONFIG)
    data, pairs, out = root / "data", root / "pairs", root / "out"

    def fig(name):
        return ["--figure", str(out / name)] if figures else []

    steps = [
        ["synth", "--out", str(data), "--experts", str(experts), "--nonexperts", str(nonexperts), "--seed", str(seed)],
        ["align", "--experts", str(data / "experts"), "--nonexperts", str(data / "nonexperts"), "--out", str(pairs)],
        ["train", "--pairs", str(pairs), "--config", str(cfg), "--out", str(out / "model.json"), "--seed", str(seed)]
        + fig("loss.png"),
        ["translate", "--model", str(out / "model.json"), "--in", str(data / "holdout" / "nonexpert.csv"),
         "--out", str(out / "generated.csv")] + fig("translate.png"),
        ["simulate", "--leader", str(out / "generated.csv"), "--out", str(out / "follower.csv"),
         "--report", str(out / "replay.txt")] + fig("replay.png"),
        ["eval", "--expert", str(data / "holdout" / "expert.csv"), "--nonexpert", str(data / "holdout" / "nonexpert.csv"),
         "--generated", str(out / "generated.csv"), "--out", str(out / "report.csv")] + fig("report.png"),
        ["plot", "--in", str(out / "generated.csv"), "--out", str(out / "generated.svg")]
        + (["--png", str(out / "generated.png")] if figures else []),
    ]
    codes = [run(argv) for argv in steps]
    files = sorted(p for p in root.rglob("*") if p.is_file())
    return codes, files
