import json

import numpy as np
import pytest

from cli_pipeline import run_pipeline
from motion_translate.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from motion_translate.cli import run
from motion_translate.errors import CheckpointMismatch
from motion_translate.gan import TrainConfig, init_networks
from motion_translate.motion import ChannelStats, load_csv


def test_no_subcommand(capsys):
    assert run([]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_usage_errors(capsys):
    assert run(["bogus"]) == 1
    assert run(["plot", "--in", "a.csv", "--out", "b.svg", "--nope"]) == 1
    assert run(["plot", "--in", "a.csv"]) == 1


def test_help_and_version(capsys):
    assert run(["--version"]) == 0
    assert run(["train", "--help"]) == 0
    assert "g_hidden" in capsys.readouterr().out


def test_missing_file(tmp_path, capsys):
    code = run(["plot", "--in", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x.svg")])
    err = capsys.readouterr().err
    assert code == 2
    assert "MissingFile" in err and err.startswith("motion-translate plot:")
    assert not (tmp_path / "x.svg").exists()


def test_malformed_csv_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x,y,z,fx,fy,fz\n0,1,2,3,4,5,6\n0.01,1,2,3\n")
    assert run(["plot", "--in", str(bad), "--out", str(tmp_path / "x.svg")]) == 2
    assert "MalformedRow at line 3" in capsys.readouterr().err


def test_unstable_exit_3(tmp_path, capsys):
    leader = tmp_path / "leader.csv"
    leader.write_text("t,x,y,z,fx,fy,fz\n" + "".join(f"{k / 100:.2f},{0.01 * (k > 0)},0,0,0,0,0\n" for k in range(50)))
    code = run(["simulate", "--leader", str(leader), "--out", str(tmp_path / "f.csv"),
                "--report", str(tmp_path / "r.txt"), "--ts", "1e-3", "--kp", "1e7", "--kd", "1e5"])
    assert code == 3
    assert "UnstableSimulation" in capsys.readouterr().err
    assert not (tmp_path / "f.csv").exists()


def _synth_and_align(tmp_path):
    data, pairs = tmp_path / "data", tmp_path / "pairs"
    assert run(["synth", "--out", str(data), "--experts", "2", "--nonexperts", "2", "--seed", "1"]) == 0
    assert run(["align", "--experts", str(data / "experts"), "--nonexperts", str(data / "nonexperts"),
                "--out", str(pairs)]) == 0
    return data, pairs


def test_synth_layout(tmp_path, capsys):
    data, pairs = _synth_and_align(tmp_path)
    assert sorted(p.name for p in (data / "experts").iterdir()) == ["expert_00.csv"]
    assert sorted(p.name for p in (data / "holdout").iterdir()) == ["expert.csv", "nonexpert.csv"]
    assert (pairs / "matches.csv").read_text().splitlines()[0] == "pair,nonexpert,expert,dtw_xy,length"
    src = load_csv(pairs / "pair_00_source.csv")
    tgt = load_csv(pairs / "pair_00_target.csv")
    assert len(src) == len(tgt) and src.values.min() >= 0 and src.values.max() <= 1
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("synth:") and lines[1].startswith("align:")


def test_train_zero_lr_matches_init(tmp_path):
    _, pairs = _synth_and_align(tmp_path)
    cfg_text = "epochs=1\nlr_g=0\nlr_d=0\nwindow_n=8\nwindow_d=4\ng_hidden=16\nd_hidden=8\nseed=7\n"
    (tmp_path / "cfg").write_text(cfg_text)
    model = tmp_path / "model.json"
    assert run(["train", "--pairs", str(pairs), "--config", str(tmp_path / "cfg"), "--out", str(model)]) == 0
    ckpt = load_checkpoint(model)
    gen0, disc0 = init_networks(TrainConfig.from_text(cfg_text))
    assert all(np.array_equal(a, b) for a, b in zip(ckpt.generator.arrays(), gen0.arrays()))
    assert all(np.array_equal(a, b) for a, b in zip(ckpt.discriminator.arrays(), disc0.arrays()))
    loss = (tmp_path / "model_loss.csv").read_text().splitlines()
    assert loss[0] == "step,g_bce,g_l1,g_total,d_real,d_fake"
    assert len(loss) == 1 + ckpt.train_step


def test_checkpoint_round_trip(tmp_path):
    cfg = TrainConfig(window_n=4, window_d=2, g_hidden=(5,), d_hidden=(3,), seed=3)
    gen, disc = init_networks(cfg)
    stats = ChannelStats(np.arange(6) * 0.1, np.arange(6) * 0.1 + 1 / 3)
    ckpt = Checkpoint(gen, disc, stats, cfg.window_spec, 3, 12, cfg)
    save_checkpoint(ckpt, tmp_path / "m.json")
    back = load_checkpoint(tmp_path / "m.json")
    assert all(np.array_equal(a, b) for a, b in zip(back.generator.arrays(), gen.arrays()))
    assert back.corpus_stats == stats and back.window_spec == cfg.window_spec
    assert back.config == cfg and back.train_step == 12
    doc = json.loads((tmp_path / "m.json").read_text())
    doc["window_spec"]["n"] = 5
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    with pytest.raises(CheckpointMismatch):
        load_checkpoint(tmp_path / "bad.json")


def test_full_pipeline(tmp_path, capsys):
    codes, files = run_pipeline(tmp_path, seed=42)
    assert codes == [0] * 7
    names = {p.name for p in files}
    for name in ("model.json", "model_loss.csv", "generated.csv", "follower.csv", "replay.txt",
                 "report.csv", "generated.svg", "loss.png", "report.png", "generated.png"):
        assert name in names
    gen = load_csv(tmp_path / "out" / "generated.csv")
    held = load_csv(tmp_path / "data" / "holdout" / "nonexpert.csv")
    assert len(gen) == len(held) and np.array_equal(gen.t, held.t)
    out_lines = capsys.readouterr().out.strip().splitlines()
    assert len(out_lines) == 7
