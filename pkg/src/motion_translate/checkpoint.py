"""Self-describing JSON model checkpoint."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import CheckpointMismatch, IoFailure, MissingFile
from .gan import N_CHANNELS, TrainConfig
from .motion import ChannelStats, WindowSpec, atomic_write_text
from .neural import MlpParams

FORMAT = "motion-translate/checkpoint"
VERSION = 1


@dataclass
class Checkpoint:
    generator: MlpParams
    discriminator: MlpParams | None
    corpus_stats: ChannelStats
    window_spec: WindowSpec
    seed: int
    train_step: int
    config: TrainConfig | None = None

    def to_dict(self) -> dict:
        # Generator fields live at the top level; the discriminator is nested.
        d = {"format": FORMAT, "version": VERSION}
        d.update(self.generator.to_dict())
        d["corpus_stats"] = self.corpus_stats.to_dict()
        d["window_spec"] = {"n": self.window_spec.n, "d": self.window_spec.d}
        d["seed"] = int(self.seed)
        d["train_step"] = int(self.train_step)
        if self.config is not None:
            cfg = asdict(self.config)
            d["config"] = {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()}
        if self.discriminator is not None:
            d["discriminator"] = self.discriminator.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Checkpoint":
        if d.get("format") != FORMAT:
            raise CheckpointMismatch(f"CheckpointMismatch: not a {FORMAT} document")
        try:
            gen = MlpParams.from_dict(d)
            disc = MlpParams.from_dict(d["discriminator"]) if "discriminator" in d else None
            spec = WindowSpec(int(d["window_spec"]["n"]), int(d["window_spec"]["d"]))
            stats = ChannelStats.from_dict(d["corpus_stats"])
            config = TrainConfig(**d["config"]) if "config" in d else None
        except (KeyError, TypeError, ValueError) as exc:
            raise CheckpointMismatch(f"CheckpointMismatch: malformed checkpoint ({exc})") from None
        width = N_CHANNELS * spec.n
        if gen.layer_dims[0] != width or gen.layer_dims[-1] != width:
            raise CheckpointMismatch(
                f"CheckpointMismatch: generator dims {gen.layer_dims} do not fit window n={spec.n} x {N_CHANNELS} channels"
            )
        return cls(gen, disc, stats, spec, int(d["seed"]), int(d["train_step"]), config)


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    atomic_write_text(path, json.dumps(ckpt.to_dict(), separators=(",", ":")) + "\n")


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"MissingFile: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"IoFailure reading {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CheckpointMismatch(f"CheckpointMismatch: {path} is not valid JSON ({exc})") from None
    return Checkpoint.from_dict(data)
