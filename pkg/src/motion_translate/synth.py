"""Seeded synthetic brush-stroke demonstrations.

Expert strokes follow a smooth spline with a minimum-jerk speed profile, dip
in z while writing, and press with an attack-sustain-taper force. Non-expert
strokes trace the same shape at a different tempo with smoothed positional
jitter and a weaker, untapered force.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InvalidParams
from .motion import MotionTrajectory
from .neural import rng_stream

DEFAULT_POINTS = (
    (0.000, 0.000),
    (0.020, 0.012),
    (0.045, 0.010),
    (0.060, -0.010),
    (0.050, -0.035),
    (0.080, -0.050),
)


@dataclass(frozen=True)
class StrokeParams:
    control_points: tuple = DEFAULT_POINTS
    duration_s: float = 8.0
    rate_hz: float = 100.0
    speed_profile: str = "min_jerk"
    pen_height_m: float = 0.02
    dip_depth_m: float = 0.01
    write_start: float = 0.12        # fraction of duration
    write_end: float = 0.85
    ramp_s: float = 0.25
    taper_s: float = 1.2
    force_peak_n: float = 2.0
    drag_coeff: float = 0.3
    seed: int = 0

    def validate(self) -> None:
        pts = np.asarray(self.control_points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise InvalidParams("control_points must be a non-empty list of (x, y)")
        if self.duration_s <= 0 or self.rate_hz <= 0 or self.ramp_s <= 0 or self.taper_s <= 0:
            raise InvalidParams("durations and rate must be positive")
        if self.force_peak_n < 0 or self.dip_depth_m < 0 or self.drag_coeff < 0:
            raise InvalidParams("force peak, dip depth and drag must be >= 0")
        if not 0 <= self.write_start < self.write_end <= 1:
            raise InvalidParams("need 0 <= write_start < write_end <= 1")
        if self.speed_profile not in ("min_jerk", "linear"):
            raise InvalidParams(f"unknown speed profile {self.speed_profile!r}")
        writing = (self.write_end - self.write_start) * self.duration_s
        if 2 * self.ramp_s > writing or self.taper_s + self.ramp_s > writing:
            raise InvalidParams("ramps and taper do not fit in the writing phase")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.rate_hz))


@dataclass(frozen=True)
class Degradation:
    noise_amplitude_m: float = 0.003
    tempo: float = 1.25
    noise_window: int = 15
    force_flatten: float = 1.0       # 0 keeps the expert force profile
    force_scale: float = 0.6         # peak multiplier at full flattening

    @classmethod
    def none(cls) -> "Degradation":
        return cls(noise_amplitude_m=0.0, tempo=1.0, force_flatten=0.0)

    def validate(self) -> None:
        if self.noise_amplitude_m < 0 or self.tempo <= 0 or self.noise_window < 1:
            raise InvalidParams("noise amplitude >= 0, tempo > 0 and noise_window >= 1 required")
        if not 0 <= self.force_flatten <= 1 or self.force_scale < 0:
            raise InvalidParams("force_flatten must be in [0, 1] and force_scale >= 0")


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _path(params: StrokeParams):
    """Spline through the control points, parametrized by arc fraction in [0, 1]."""
    pts = np.asarray(params.control_points, dtype=float)
    if len(pts) == 1 or np.allclose(pts, pts[0]):
        return lambda s: np.repeat(pts[:1], np.size(s), axis=0)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep = np.concatenate([[True], seg > 0])
    pts = pts[keep]
    knots = np.concatenate([[0.0], np.cumsum(seg[seg > 0])])
    knots /= knots[-1]
    if len(pts) == 2:
        return lambda s: pts[0] + np.asarray(s)[:, None] * (pts[1] - pts[0])
    spline = CubicSpline(knots, pts, bc_type="natural")
    return lambda s: spline(np.clip(s, 0.0, 1.0))


def _progress(params: StrokeParams, tau):
    if params.speed_profile == "linear":
        return tau
    return tau ** 3 * (10.0 - 15.0 * tau + 6.0 * tau * tau)


def _envelopes(params: StrokeParams, t):
    """Return ``(dip, force_tapered, force_flat)`` envelopes in [0, 1]."""
    ta = params.write_start * params.duration_s
    tb = params.write_end * params.duration_s
    attack = _smoothstep((t - ta) / params.ramp_s)
    release = 1.0 - _smoothstep((t - (tb - params.ramp_s)) / params.ramp_s)
    dip = attack * release
    taper = 1.0 - _smoothstep((t - (tb - params.taper_s)) / params.taper_s)
    return dip, attack * taper, dip


def _stroke(params: StrokeParams, t, force_mix: float = 0.0, force_scale: float = 1.0):
    """Evaluate the stroke at (possibly warped) expert times ``t``."""
    tau = np.clip(t / params.duration_s, 0.0, 1.0)
    xy = _path(params)(_progress(params, tau))
    dip, tapered, flat = _envelopes(params, t)
    z = params.pen_height_m - params.dip_depth_m * dip
    peak = params.force_peak_n * (1.0 - force_mix * (1.0 - force_scale))
    fz = peak * ((1.0 - force_mix) * tapered + force_mix * flat)

    vel = np.gradient(xy, axis=0) if len(t) > 1 else np.zeros_like(xy)
    speed = np.linalg.norm(vel, axis=1, keepdims=True)
    ref = max(float(np.max(speed)), 1e-12) * 0.05
    direction = vel / (speed + ref)
    fxy = -params.drag_coeff * fz[:, None] * direction
    return np.column_stack([xy, z, fxy, fz])


def synth_expert(params: StrokeParams | None = None) -> MotionTrajectory:
    params = params or StrokeParams()
    params.validate()
    n = params.n_samples
    if n < 2:
        raise InvalidParams("stroke needs at least 2 samples")
    t = np.arange(n) / params.rate_hz
    return MotionTrajectory.from_values(_stroke(params, t), params.rate_hz)


def smoothed_noise(rng: np.random.Generator, n: int, window: int, channels: int = 3) -> np.ndarray:
    """Moving-average Gaussian noise scaled to unit standard deviation."""
    raw = rng.standard_normal((n + window - 1, channels))
    kernel = np.ones(window) / window
    out = np.column_stack([np.convolve(raw[:, c], kernel, mode="valid") for c in range(channels)])
    return out * np.sqrt(window)


def synth_nonexpert(expert_params: StrokeParams | None = None, degradation: Degradation | None = None) -> MotionTrajectory:
    """Degraded rendition of the expert stroke.

    Length is ``round(tempo * expert length)``; the expert's time axis is
    stretched uniformly onto it.
    """
    params = expert_params or StrokeParams()
    deg = degradation or Degradation()
    params.validate()
    deg.validate()
    n = params.n_samples
    m = int(round(deg.tempo * n))
    if m < 2:
        raise InvalidParams("degraded stroke would have fewer than 2 samples")
    t_expert = np.arange(m) * ((n - 1) / (m - 1)) / params.rate_hz
    values = _stroke(params, t_expert, deg.force_flatten, deg.force_scale)
    if deg.noise_amplitude_m > 0:
        rng = rng_stream(params.seed, "nonexpert-noise")
        values[:, :3] += deg.noise_amplitude_m * smoothed_noise(rng, m, deg.noise_window)
    return MotionTrajectory.from_values(values, params.rate_hz)


def jitter_params(base: StrokeParams, rng: np.random.Generator, point_m: float = 0.001,
                  force_frac: float = 0.05, seed: int = 0) -> StrokeParams:
    pts = np.asarray(base.control_points, dtype=float)
    pts = pts + rng.uniform(-point_m, point_m, size=pts.shape)
    peak = base.force_peak_n * (1.0 + rng.uniform(-force_frac, force_frac))
    return replace(base, control_points=tuple(map(tuple, pts.tolist())), force_peak_n=float(peak), seed=seed)


def make_corpus(n_experts: int = 3, n_nonexperts: int = 6, base: StrokeParams | None = None,
                seed: int = 0, degradation: Degradation | None = None,
                tempo_range: tuple = (1.1, 1.35)):
    """Return ``(experts, nonexperts)``; the last item of each list is the hold-out."""
    if n_experts < 1 or n_nonexperts < 1:
        raise InvalidParams("corpus needs at least one expert and one non-expert")
    base = base or StrokeParams()
    deg = degradation or Degradation()
    rng = rng_stream(seed, "corpus")
    seeds = rng.integers(0, 2**63 - 1, size=n_experts + n_nonexperts)
    experts = [
        synth_expert(jitter_params(base, rng, seed=int(seeds[k]))) for k in range(n_experts)
    ]
    nonexperts = []
    for k in range(n_nonexperts):
        params = jitter_params(base, rng, seed=int(seeds[n_experts + k]))
        tempo = float(rng.uniform(*tempo_range))
        nonexperts.append(synth_nonexpert(params, replace(deg, tempo=tempo)))
    return experts, nonexperts
