"""Conditional adversarial training of the window translator.

The generator maps a flattened normalized non-expert window (``6n`` values) to
an expert-like window. The discriminator scores the concatenation
``source || candidate`` (``12n`` values) as real (1) or generated (0).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .dtw import AlignedPair
from .errors import DivergenceDetected, EmptyTrainingSet, InvalidConfig, ShapeMismatch
from .motion import WindowSpec, atomic_write_text, window_starts
from .neural import AdamState, MlpParams, adam_step, backward, forward, init_mlp, rng_stream

CLAMP = 1e-7
N_CHANNELS = 6


# ------------------------------------------------------------------ losses


def _clamp(p, eps: float = CLAMP):
    return np.clip(np.asarray(p, dtype=float), eps, 1.0 - eps)


def bce_loss(prediction, label, eps: float = CLAMP) -> float:
    """Binary cross entropy, averaged when given arrays.

    ``prediction`` is clamped to ``[eps, 1 - eps]`` before the log.
    """
    p = _clamp(prediction, eps)
    t = np.asarray(label, dtype=float)
    return float(np.mean(-(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))))


def bce_grad(prediction, label, eps: float = CLAMP) -> np.ndarray:
    """d(mean bce)/d(prediction); zero where the clamp is active."""
    raw = np.asarray(prediction, dtype=float)
    p = _clamp(raw, eps)
    t = np.asarray(label, dtype=float)
    g = -(t / p) + (1.0 - t) / (1.0 - p)
    g = np.where((raw < eps) | (raw > 1.0 - eps), 0.0, g)
    return g / max(g.size, 1)


def l1_loss(generated, target) -> float:
    """Mean absolute element-wise difference."""
    g = np.asarray(generated, dtype=float)
    t = np.asarray(target, dtype=float)
    if g.shape != t.shape:
        raise ShapeMismatch(f"ShapeMismatch: {g.shape} vs {t.shape}")
    return float(np.mean(np.abs(g - t)))


def l1_grad(generated, target) -> np.ndarray:
    g = np.asarray(generated, dtype=float)
    t = np.asarray(target, dtype=float)
    return np.sign(g - t) / g.size


def generator_loss(d_output_on_fake, generated, target, lambda_l1: float, eps: float = CLAMP):
    """Return ``(total, bce_term, l1_term)`` with ``total = bce + lambda * l1``.

    The adversarial term is the non-saturating ``bce(D(G(x)), 1)``.
    """
    bce = bce_loss(d_output_on_fake, 1.0, eps)
    l1 = l1_loss(generated, target)
    return bce + lambda_l1 * l1, bce, l1


def discriminator_loss(d_on_real_pair, d_on_fake_pair, eps: float = CLAMP) -> float:
    return bce_loss(d_on_real_pair, 1.0, eps) + bce_loss(d_on_fake_pair, 0.0, eps)


# ------------------------------------------------ losses through the networks


def discriminator_step_grads(disc: MlpParams, source, real, fake, rng=None, eps: float = CLAMP):
    """Discriminator loss on a batch and its parameter gradients.

    Returns ``(loss, d_real_term, d_fake_term, grads)`` where ``grads`` is the
    list of weight then bias arrays.
    """
    real_in = np.concatenate([source, real], axis=1)
    fake_in = np.concatenate([source, fake], axis=1)
    mode = "train" if rng is not None else "eval"
    d_real, c_real = forward(disc, real_in, mode, rng)
    d_fake, c_fake = forward(disc, fake_in, mode, rng)
    d_real_term = bce_loss(d_real, 1.0, eps)
    d_fake_term = bce_loss(d_fake, 0.0, eps)
    g_real = backward(disc, c_real, bce_grad(d_real, 1.0, eps))
    g_fake = backward(disc, c_fake, bce_grad(d_fake, 0.0, eps))
    grads = [a + b for a, b in zip(g_real.arrays(), g_fake.arrays())]
    return d_real_term + d_fake_term, d_real_term, d_fake_term, grads


def generator_step_grads(gen: MlpParams, disc: MlpParams, source, target, lambda_l1: float,
                         g_rng=None, d_rng=None, eps: float = CLAMP, gen_out=None):
    """Generator loss on a batch and its parameter gradients.

    ``gen_out`` may carry a previous ``(fake, cache)`` forward result so the
    same dropout masks are used for the discriminator and generator updates.
    Returns ``(total, bce, l1, grads, fake)``.
    """
    if gen_out is None:
        gen_out = forward(gen, source, "train" if g_rng is not None else "eval", g_rng)
    fake, g_cache = gen_out
    fake_in = np.concatenate([source, fake], axis=1)
    d_fake, d_cache = forward(disc, fake_in, "train" if d_rng is not None else "eval", d_rng)
    total, bce, l1 = generator_loss(d_fake, fake, target, lambda_l1, eps)
    d_grads = backward(disc, d_cache, bce_grad(d_fake, 1.0, eps))
    dfake = d_grads.input[:, source.shape[1]:] + lambda_l1 * l1_grad(fake, target)
    grads = backward(gen, g_cache, dfake).arrays()
    return total, bce, l1, grads, fake


# ------------------------------------------------------------------ config


@dataclass
class TrainConfig:
    lambda_l1: float = 100.0
    epochs: int = 60
    batch_size: int = 32
    lr_g: float = 2e-4
    lr_d: float = 2e-4
    window_n: int = 32
    window_d: int = 4
    seed: int = 0
    d_steps: int = 1
    g_hidden: tuple = (256, 256)
    d_hidden: tuple = (128, 128)
    dropout: float = 0.1
    beta1: float = 0.5
    beta2: float = 0.999
    clamp: float = CLAMP

    def __post_init__(self):
        self.g_hidden = tuple(int(h) for h in self.g_hidden)
        self.d_hidden = tuple(int(h) for h in self.d_hidden)
        if self.lambda_l1 < 0:
            raise InvalidConfig("lambda_l1 must be >= 0")
        if self.epochs < 1 or self.batch_size < 1 or self.d_steps < 1:
            raise InvalidConfig("epochs, batch_size and d_steps must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise InvalidConfig("dropout must be in [0, 1)")
        if self.lr_g < 0 or self.lr_d < 0:
            raise InvalidConfig("learning rates must be >= 0")
        if not 0 < self.clamp < 0.5:
            raise InvalidConfig("clamp must be in (0, 0.5)")
        try:
            self.window_spec
        except Exception as exc:
            raise InvalidConfig(str(exc)) from None

    @property
    def window_spec(self) -> WindowSpec:
        return WindowSpec(self.window_n, self.window_d)

    @classmethod
    def from_text(cls, text: str) -> "TrainConfig":
        """Parse flat ``key=value`` lines; ``#`` starts a comment.

        List-valued keys (``g_hidden``, ``d_hidden``) take comma-separated ints.
        """
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfig(f"config line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise InvalidConfig(f"config line {lineno}: unknown key {key!r}")
            try:
                if key in ("g_hidden", "d_hidden"):
                    kwargs[key] = tuple(int(v) for v in value.split(",") if v.strip())
                elif types[key] in ("int", int):
                    kwargs[key] = int(value)
                else:
                    kwargs[key] = float(value)
            except ValueError:
                raise InvalidConfig(f"config line {lineno}: bad value for {key}: {value!r}") from None
        return cls(**kwargs)

    def to_text(self) -> str:
        lines = []
        for k, v in asdict(self).items():
            if isinstance(v, (tuple, list)):
                v = ",".join(str(x) for x in v)
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- training


def flatten_window(window: np.ndarray) -> np.ndarray:
    """``(n, 6)`` window to a sample-major vector of length ``6n``."""
    return np.ascontiguousarray(window, dtype=float).reshape(-1)


def unflatten_window(vec: np.ndarray) -> np.ndarray:
    return np.asarray(vec, dtype=float).reshape(-1, N_CHANNELS)


def build_training_set(pairs: list[AlignedPair], spec: WindowSpec) -> tuple[np.ndarray, np.ndarray]:
    """Cut windows at identical starts from both sides of every pair.

    Returns ``(sources, targets)``, each of shape ``(n_windows, 6n)``.
    """
    src, tgt = [], []
    for pair in pairs:
        for s in window_starts(len(pair), spec):
            src.append(flatten_window(pair.source.values[s:s + spec.n]))
            tgt.append(flatten_window(pair.target.values[s:s + spec.n]))
    width = N_CHANNELS * spec.n
    if not src:
        return np.empty((0, width)), np.empty((0, width))
    return np.array(src), np.array(tgt)


@dataclass
class TrainRecord:
    """Per-step losses; all lists have one entry per optimizer step."""

    g_bce: list = field(default_factory=list)
    g_l1: list = field(default_factory=list)
    g_total: list = field(default_factory=list)
    d_real: list = field(default_factory=list)
    d_fake: list = field(default_factory=list)

    def __len__(self):
        return len(self.g_total)

    def append(self, g_bce, g_l1, g_total, d_real, d_fake):
        for name, v in zip(("g_bce", "g_l1", "g_total", "d_real", "d_fake"), (g_bce, g_l1, g_total, d_real, d_fake)):
            getattr(self, name).append(float(v))

    def to_csv(self) -> str:
        lines = ["step,g_bce,g_l1,g_total,d_real,d_fake"]
        for k, row in enumerate(zip(self.g_bce, self.g_l1, self.g_total, self.d_real, self.d_fake)):
            lines.append(",".join([str(k)] + [repr(v) for v in row]))
        return "\n".join(lines) + "\n"

    def save_csv(self, path) -> None:
        atomic_write_text(path, self.to_csv())


@dataclass
class TrainResult:
    generator: MlpParams
    discriminator: MlpParams
    history: TrainRecord
    steps: int


def init_networks(config: TrainConfig) -> tuple[MlpParams, MlpParams]:
    width = N_CHANNELS * config.window_n
    g_dims = [width, *config.g_hidden, width]
    d_dims = [2 * width, *config.d_hidden, 1]
    gen = init_mlp(g_dims, [config.dropout] * len(config.g_hidden), seed=config.seed)
    disc = init_mlp(d_dims, [0.0] * len(config.d_hidden), seed=config.seed ^ 0x5A5A5A5A)
    return gen, disc


def train(pairs: list[AlignedPair], config: TrainConfig, log=None) -> TrainResult:
    """Alternate discriminator and generator Adam updates over shuffled batches.

    ``log`` is an optional callable receiving ``(step, TrainRecord)`` every
    100 steps.
    """
    sources, targets = build_training_set(pairs, config.window_spec)
    if len(sources) == 0:
        raise EmptyTrainingSet("EmptyTrainingSet: no windows to train on")
    gen, disc = init_networks(config)
    g_state = AdamState.fresh(gen, config.lr_g, config.beta1, config.beta2)
    d_state = AdamState.fresh(disc, config.lr_d, config.beta1, config.beta2)
    shuffle_rng = rng_stream(config.seed, "shuffle")
    g_rng = rng_stream(config.seed, "dropout/generator")
    d_rng = rng_stream(config.seed, "dropout/discriminator")
    history = TrainRecord()
    eps = config.clamp

    step = 0
    n = len(sources)
    for _ in range(config.epochs):
        order = shuffle_rng.permutation(n)
        for lo in range(0, n, config.batch_size):
            idx = order[lo:lo + config.batch_size]
            src, tgt = sources[idx], targets[idx]
            gen_out = forward(gen, src, "train", g_rng)
            fake = gen_out[0]

            for _ in range(config.d_steps):
                _, d_real, d_fake, d_grads = discriminator_step_grads(disc, src, tgt, fake, d_rng, eps)
                disc, d_state = adam_step(disc, d_grads, d_state)

            total, bce, l1, g_grads, _ = generator_step_grads(
                gen, disc, src, tgt, config.lambda_l1, d_rng=d_rng, eps=eps, gen_out=gen_out
            )
            if not all(math.isfinite(v) for v in (total, bce, l1, d_real, d_fake)):
                raise DivergenceDetected(step)
            gen, g_state = adam_step(gen, g_grads, g_state)
            history.append(bce, l1, total, d_real, d_fake)
            step += 1
            if log is not None and step % 100 == 0:
                log(step, history)
    return TrainResult(gen, disc, history, step)
