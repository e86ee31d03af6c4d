"""Simulated motion-copying replay.

A saved (or generated) trajectory acts as the virtual leader; a PD-controlled
point mass per axis follows it at the control period ``ts``. The leader's
force channels are passed through the force low-pass filter and logged.
The point-mass plant is a stand-in for real hardware.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, UnstableSimulation
from .motion import FORCE, POSITION, MotionTrajectory

POSITION_LIMIT = 10.0


@dataclass(frozen=True)
class ControllerParams:
    ts: float = 1e-4
    kp: float = 1200.0
    kd: float = 70.0
    g_pd: float = 40.0
    g_f: float = 20.0

    def __post_init__(self):
        if min(self.ts, self.kp, self.kd, self.g_pd, self.g_f) <= 0:
            raise InvalidParams("controller parameters must be strictly positive")
        if self.ts > 1e-3:
            raise InvalidParams(f"control period {self.ts} s exceeds 1 ms")


@dataclass(frozen=True)
class PlantParams:
    mass: float = 1.0
    friction: float = 5.0

    def __post_init__(self):
        if self.mass <= 0 or self.friction < 0:
            raise InvalidParams("plant mass must be > 0 and friction >= 0")


@dataclass
class PlantState:
    position: np.ndarray
    velocity: np.ndarray

    @classmethod
    def at(cls, position, velocity=None) -> "PlantState":
        p = np.array(position, dtype=float).reshape(-1)
        v = np.zeros_like(p) if velocity is None else np.array(velocity, dtype=float).reshape(-1)
        return cls(p, v)


@dataclass
class FilterState:
    prev_input: float | None = None
    output: float = 0.0


def pseudo_derivative(x: float, state: FilterState, g: float, ts: float) -> tuple[float, FilterState]:
    """Backward-Euler ``g s / (s + g)``.

    ``y_k = (y_{k-1} + g (x_k - x_{k-1})) / (1 + g ts)``. The first call
    seeds the previous input with ``x`` so the estimate starts at zero.
    """
    prev = x if state.prev_input is None else state.prev_input
    y = (state.output + g * (x - prev)) / (1.0 + g * ts)
    return y, FilterState(x, y)


def lowpass(x: float, state: FilterState, g: float, ts: float) -> tuple[float, FilterState]:
    """Backward-Euler ``g / (s + g)``; unit DC gain."""
    y = (state.output + g * ts * x) / (1.0 + g * ts)
    return y, FilterState(x, y)


def pd_control(position_ref: float, position: float, velocity_est: float, velocity_ref_est: float,
               params: ControllerParams) -> float:
    """Acceleration command ``kp (ref - pos) + kd (vref - vel)``."""
    return params.kp * (position_ref - position) + params.kd * (velocity_ref_est - velocity_est)


def step_plant(position: float, velocity: float, accel_cmd: float, plant: PlantParams, ts: float) -> tuple[float, float]:
    """Semi-implicit Euler step of a point mass with viscous friction.

    The command is an acceleration reference; the actuator applies
    ``mass * accel_cmd`` so the nominal model is exact.
    """
    accel = accel_cmd - plant.friction / plant.mass * velocity
    velocity = velocity + accel * ts
    position = position + velocity * ts
    return position, velocity


@dataclass
class ReplayReport:
    follower: MotionTrajectory
    rms_error: np.ndarray
    max_error: np.ndarray
    filtered_force: np.ndarray
    error: np.ndarray

    def to_text(self) -> str:
        lines = []
        for name, k in zip("xyz", range(3)):
            lines.append(f"rms_{name}_m={self.rms_error[k]:.9e}")
        for name, k in zip("xyz", range(3)):
            lines.append(f"max_{name}_m={self.max_error[k]:.9e}")
        lines.append(f"samples={len(self.follower)}")
        return "\n".join(lines) + "\n"


def replay(leader: MotionTrajectory, controller: ControllerParams | None = None,
           initial: PlantState | None = None, plant: PlantParams | None = None,
           hold: str = "linear") -> ReplayReport:
    """Track ``leader`` with the PD-controlled plant.

    Between leader samples the reference is linearly interpolated
    (``hold="linear"``) or held (``hold="zoh"``). Outputs are logged at the
    leader's sample instants: the follower trajectory carries the plant
    positions and the low-passed leader forces.
    """
    controller = controller or ControllerParams()
    plant = plant or PlantParams()
    if hold not in ("linear", "zoh"):
        raise InvalidParams(f"hold must be 'linear' or 'zoh', got {hold!r}")
    ref = leader.values[:, list(POSITION)]
    forces = leader.values[:, list(FORCE)]
    if initial is None:
        initial = PlantState.at(ref[0])
    if initial.position.shape != (3,):
        raise InvalidParams("initial plant state needs three axes")

    substeps = max(1, int(round(1.0 / (leader.rate_hz * controller.ts))))
    ts = controller.ts
    n = len(leader)
    follow = np.empty((n, 3))
    ffilt = np.empty((n, 3))
    g_pd, g_f = controller.g_pd, controller.g_f
    kp, kd = controller.kp, controller.kd
    fr = plant.friction / plant.mass
    a_pd = 1.0 / (1.0 + g_pd * ts)
    a_f = 1.0 / (1.0 + g_f * ts)

    # Per-axis scalar loops; the three axes are decoupled.
    for ax in range(3):
        pos = float(initial.position[ax])
        vel = float(initial.velocity[ax])
        r = ref[:, ax].tolist()
        fin = forces[:, ax].tolist()
        v_est, prev_pos = 0.0, pos
        vr_est, prev_ref = 0.0, r[0]
        f_out = fin[0]
        step = 0
        for k in range(n):
            follow[k, ax] = pos
            ffilt[k, ax] = f_out
            if k == n - 1:
                break
            r0, r1 = r[k], r[k + 1]
            fk = fin[k]
            for s in range(substeps):
                f_out = (f_out + g_f * ts * fk) * a_f
                rk = r0 + (r1 - r0) * s / substeps if hold == "linear" else r0
                v_est = (v_est + g_pd * (pos - prev_pos)) * a_pd
                prev_pos = pos
                vr_est = (vr_est + g_pd * (rk - prev_ref)) * a_pd
                prev_ref = rk
                u = kp * (rk - pos) + kd * (vr_est - v_est)
                vel += (u - fr * vel) * ts
                pos += vel * ts
                step += 1
                if not abs(pos) <= POSITION_LIMIT:
                    raise UnstableSimulation(step)

    values = np.concatenate([follow, ffilt], axis=1)
    err = ref - follow
    return ReplayReport(
        follower=leader.with_values(values),
        rms_error=np.sqrt(np.mean(err ** 2, axis=0)),
        max_error=np.max(np.abs(err), axis=0),
        filtered_force=ffilt,
        error=err,
    )
