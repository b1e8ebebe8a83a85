"""Fixed-step closed-loop simulation of plant + filter + observer + control.

Classical RK4 with the control input and every delayed sample frozen over
the step; delays are exact multiples of the step so no interpolation is
involved.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .control import ControllerConfig, control
from .filters import FilterConfig, filter_derivative
from .observers import (DelayDiffConfig, HgoConfig, HistoryBuffer, ModHgoConfig,
                        delay_diff_estimates, steps_per_delay)
from .plant import PlantModel, plant_derivative, relative_degree
from .signals import Signal, Zero, max_frequency

Observer = Union[DelayDiffConfig, HgoConfig, ModHgoConfig]

CHUNK = 1 << 15


class DivergenceError(RuntimeError):
    def __init__(self, time: float, trajectory: Optional["Trajectory"] = None):
        super().__init__(f"non-finite state at t={time:.6g}")
        self.time = time
        self.trajectory = trajectory


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_end: float
    record_stride: int = 1
    steady_window_start: float = 0.0
    dt_policy: str = "reject"  # or "warn"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if not 0 <= self.steady_window_start <= self.t_end:
            raise ValueError("steady_window_start must lie in [0, t_end]")
        if self.dt_policy not in ("reject", "warn"):
            raise ValueError("dt_policy must be 'reject' or 'warn'")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class ClosedLoopSystem:
    plant: PlantModel
    x0: tuple[float, ...]
    controller: ControllerConfig
    observer: Observer
    filter: Optional[FilterConfig] = None
    disturbance: Signal = Zero()
    noise: Signal = Zero()

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if len(self.x0) != self.plant.order:
            raise ValueError(f"x0 must have length {self.plant.order}")
        gamma = relative_degree(self.plant)
        if self.controller.gamma != gamma:
            raise ValueError(f"controller has {self.controller.gamma} coefficients, "
                             f"plant relative degree is {gamma}")
        if self.observer.gamma != gamma:
            raise ValueError(f"observer produces {self.observer.gamma} estimates, need {gamma}")

    @property
    def gamma(self) -> int:
        return self.controller.gamma

    @property
    def ode_observer(self) -> bool:
        return not isinstance(self.observer, DelayDiffConfig)

    @property
    def layout(self) -> dict[str, slice]:
        n = self.plant.order
        r = self.filter.r if self.filter is not None else 0
        m = self.observer.state_size if self.ode_observer else 0
        return {"plant": slice(0, n), "filter": slice(n, n + r),
                "observer": slice(n + r, n + r + m)}

    @property
    def state_size(self) -> int:
        return self.layout["observer"].stop

    def initial_state(self) -> np.ndarray:
        X = np.zeros(self.state_size)
        X[self.layout["plant"]] = self.x0
        return X

    def scaled(self, s: float) -> "ClosedLoopSystem":
        """Same loop with initial state, disturbance and noise multiplied by ``s``."""
        return ClosedLoopSystem(self.plant, tuple(s * v for v in self.x0), self.controller,
                                self.observer, self.filter, self.disturbance.scaled(s),
                                self.noise.scaled(s))


def check_step(sys: ClosedLoopSystem, cfg: SimConfig) -> None:
    """Grid and resolution requirements on ``dt``."""
    if isinstance(sys.observer, DelayDiffConfig):
        steps_per_delay(sys.observer.h, cfg.dt)
    limits = []
    if sys.filter is not None:
        limits.append(min(sys.filter.time_constants) / 10)
    wmax = max(max_frequency(sys.noise), max_frequency(sys.disturbance))
    if wmax > 0:
        limits.append(2 * math.pi / (20 * wmax))
    if limits and cfg.dt > min(limits) * (1 + 1e-12):
        msg = f"dt={cfg.dt} does not resolve the fastest dynamics (limit {min(limits):.3g})"
        if cfg.dt_policy == "reject":
            raise ValueError(msg)
        warnings.warn(msg)


def loop_derivative(sys: ClosedLoopSystem, X, u: float, f: float, w: float) -> np.ndarray:
    """Right-hand side of the interconnection for frozen ``u``."""
    lay = sys.layout
    X = np.asarray(X, dtype=float)
    out = np.empty_like(X)
    x = X[lay["plant"]]
    out[lay["plant"]] = plant_derivative(sys.plant, x, u, f)
    y = x[0] + w
    v = y
    if sys.filter is not None:
        xi = X[lay["filter"]]
        out[lay["filter"]] = filter_derivative(sys.filter, xi, y)
        v = xi[-1]
    if sys.ode_observer:
        out[lay["observer"]] = sys.observer.derivative(X[lay["observer"]], v)
    return out


def rk4(sys: ClosedLoopSystem, X, u: float, fs, ws, dt: float) -> np.ndarray:
    """One RK4 step; ``fs`` and ``ws`` hold the exogenous values at
    ``t``, ``t + dt/2`` and ``t + dt``."""
    k1 = loop_derivative(sys, X, u, fs[0], ws[0])
    k2 = loop_derivative(sys, X + 0.5 * dt * k1, u, fs[1], ws[1])
    k3 = loop_derivative(sys, X + 0.5 * dt * k2, u, fs[1], ws[1])
    k4 = loop_derivative(sys, X + dt * k3, u, fs[2], ws[2])
    return X + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class LoopState:
    t: float
    X: np.ndarray
    buffer: Optional[HistoryBuffer] = None


def observer_input(sys: ClosedLoopSystem, X, t: float) -> float:
    """Signal seen by the observer: filter output, or raw measurement without a filter."""
    if sys.filter is not None:
        return float(X[sys.layout["filter"]][-1])
    return float(X[0] + sys.noise.eval(t))


def start(sys: ClosedLoopSystem, dt: float) -> LoopState:
    X = sys.initial_state()
    buf = None
    if isinstance(sys.observer, DelayDiffConfig):
        buf = HistoryBuffer(sys.observer.h, dt, sys.gamma)
        buf.push(observer_input(sys, X, 0.0))
    return LoopState(0.0, X, buf)


def estimates(sys: ClosedLoopSystem, state: LoopState) -> np.ndarray:
    if state.buffer is not None:
        return delay_diff_estimates(state.buffer, sys.observer)
    return sys.observer.outputs(state.X[sys.layout["observer"]])


def step(sys: ClosedLoopSystem, state: LoopState, dt: float) -> LoopState:
    """Advance the loop by one step (reference path built on the module
    derivative functions)."""
    t = state.t
    u = control(sys.controller, estimates(sys, state))
    times = (t, t + 0.5 * dt, t + dt)
    fs = [sys.disturbance.eval(s) for s in times]
    ws = [sys.noise.eval(s) for s in times]
    X = rk4(sys, state.X, u, fs, ws, dt)
    t_new = t + dt
    if not np.all(np.isfinite(X)):
        raise DivergenceError(t_new)
    if state.buffer is not None:
        state.buffer.push(observer_input(sys, X, t_new))
    return LoopState(t_new, X, state.buffer)


def propagator(sys: ClosedLoopSystem, dt: float):
    """Matrices of the RK4 step, obtained by probing it with unit inputs.

    Returns ``(Phi, g_u, G_f, G_w)`` so that
    ``rk4(X, u, fs, ws) == Phi @ X + g_u * u + G_f @ fs + G_w @ ws``.
    """
    N = sys.state_size
    zero3 = (0.0, 0.0, 0.0)
    Phi = np.column_stack([rk4(sys, e, 0.0, zero3, zero3, dt) for e in np.eye(N)])
    zx = np.zeros(N)
    g_u = rk4(sys, zx, 1.0, zero3, zero3, dt)
    unit3 = np.eye(3)
    G_f = np.column_stack([rk4(sys, zx, 0.0, e, zero3, dt) for e in unit3])
    G_w = np.column_stack([rk4(sys, zx, 0.0, zero3, e, dt) for e in unit3])
    return Phi, g_u, G_f, G_w


@dataclass
class Trajectory:
    columns: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["t"])

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def to_csv(self, path) -> None:
        names = self.names
        data = np.column_stack([self.columns[n] for n in names])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            for row in data:
                writer.writerow([format(v, ".17g") for v in row])

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            names = next(reader)
            rows = np.array([[float(v) for v in row] for row in reader])
        rows = rows.reshape(-1, len(names))
        return cls({n: rows[:, i] for i, n in enumerate(names)})


@dataclass
class Metrics:
    """Sup statistics over ``[window_start, t_end]`` on the full integration grid."""

    window_start: float
    t_end: float
    errors: list[float] = field(default_factory=list)   # sup |z^(i) - ybar^(i)|
    peaks: list[float] = field(default_factory=list)    # sup |z^(i)|

    def as_row(self) -> dict[str, float]:
        row = {f"e{i}": v for i, v in enumerate(self.errors)}
        row.update({f"zmax{i}": v for i, v in enumerate(self.peaks)})
        return row


@dataclass
class RunResult:
    trajectory: Trajectory
    metrics: Metrics


def sup_error(traj: Trajectory, order: int, window: tuple[float, float]) -> float:
    """Largest ``|z^(order) - ybar^(order)|`` over recorded samples in ``window``."""
    zname, bname = f"z{order}", f"ybar{order}"
    if zname not in traj.columns:
        raise KeyError(f"trajectory has no true derivative column {zname}")
    t = traj["t"]
    lo, hi = window
    mask = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    if not mask.any():
        raise ValueError(f"window {window} holds no samples")
    return float(np.max(np.abs(traj[zname][mask] - traj[bname][mask])))


def run(sys: ClosedLoopSystem, cfg: SimConfig) -> RunResult:
    """Integrate from 0 to ``t_end``; deterministic for identical inputs."""
    check_step(sys, cfg)
    dt = cfg.dt
    n_steps = cfg.n_steps
    lay = sys.layout
    gamma = sys.gamma
    derivs = sys.plant.num.degree == 0
    n_z = sys.plant.order if derivs else 1
    Phi, g_u, G_f, G_w = propagator(sys, dt)

    delay = isinstance(sys.observer, DelayDiffConfig)
    if delay:
        stride = steps_per_delay(sys.observer.h, dt)
        weights = sys.controller.history_weights(sys.observer.h)
        est_weights = sys.observer.binomial_weights()
        pad = (gamma - 1) * stride
    else:
        stride = 0
        pad = 0
        C_obs = sys.observer.output_matrix()
        K = np.zeros(sys.state_size)
        K[lay["observer"]] = sys.controller.gain_row() @ C_obs
    lags = [pad - j * stride for j in range(gamma)]
    weights_list = [float(c) for c in weights] if delay else []

    vi = lay["filter"].stop - 1 if sys.filter is not None else None
    # observer-input history, zero before t = 0
    vhist = np.zeros(pad + n_steps + 1)
    U = np.zeros(n_steps + 1)

    rec_idx = np.arange(0, n_steps + 1, cfg.record_stride)
    rec_cols: dict[str, list] = {"t": [], **{f"z{i}": [] for i in range(n_z)}, "y": []}
    if sys.filter is not None:
        rec_cols["yhat"] = []
    rec_cols.update({f"ybar{i}": [] for i in range(gamma)})
    rec_cols["u"] = []

    n_cmp = min(n_z, gamma)
    err = np.zeros(n_cmp)
    peak = np.zeros(n_z)
    w_start = int(math.ceil(cfg.steady_window_start / dt - 1e-9))

    X = sys.initial_state()
    diverged_at = None
    for c0 in range(0, n_steps + 1, CHUNK):
        c1 = min(c0 + CHUNK, n_steps + 1)
        idx = np.arange(c0, c1)
        t0 = idx * dt
        th = t0 + 0.5 * dt
        t1 = t0 + dt
        W0 = sys.noise.eval(t0)
        E = (np.outer(sys.disturbance.eval(t0), G_f[:, 0])
             + np.outer(sys.disturbance.eval(th), G_f[:, 1])
             + np.outer(sys.disturbance.eval(t1), G_f[:, 2])
             + np.outer(W0, G_w[:, 0])
             + np.outer(sys.noise.eval(th), G_w[:, 1])
             + np.outer(sys.noise.eval(t1), G_w[:, 2]))
        Xc = np.empty((c1 - c0, sys.state_size))
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(c1 - c0):
                n = c0 + k
                if vi is not None:
                    v = X[vi]
                else:
                    v = X[0] + W0[k]
                vhist[pad + n] = v
                if delay:
                    u = 0.0
                    for c, lag in zip(weights_list, lags):
                        u += c * vhist[lag + n]
                else:
                    u = K @ X
                U[n] = u
                Xc[k] = X
                X = Phi @ X + g_u * u + E[k]
        bad = ~np.all(np.isfinite(Xc), axis=1)
        if bad.any():
            first = int(np.argmax(bad))
            diverged_at = (c0 + first) * dt
            Xc = Xc[:first]
            idx = idx[:first]
            t0 = t0[:first]
            W0 = W0[:first]

        # estimates on this chunk
        if delay:
            ests = np.column_stack([
                sum(est_weights[i, j] * vhist[pad + idx - j * stride] for j in range(i + 1))
                for i in range(gamma)]) if len(idx) else np.zeros((0, gamma))
        else:
            ests = Xc[:, lay["observer"]] @ C_obs.T
        zs = Xc[:, :n_z] if derivs else Xc[:, :1]

        in_win = idx >= w_start
        if in_win.any():
            diff = np.abs(zs[in_win, :n_cmp] - ests[in_win, :n_cmp])
            err = np.maximum(err, diff.max(axis=0))
            peak = np.maximum(peak, np.abs(zs[in_win]).max(axis=0))

        sel = (idx % cfg.record_stride) == 0
        rec_cols["t"].append(t0[sel])
        for i in range(n_z):
            rec_cols[f"z{i}"].append(zs[sel, i])
        rec_cols["y"].append(Xc[sel, 0] + W0[sel])
        if sys.filter is not None:
            rec_cols["yhat"].append(Xc[sel, vi])
        for i in range(gamma):
            rec_cols[f"ybar{i}"].append(ests[sel, i])
        rec_cols["u"].append(U[idx[sel]])
        if diverged_at is not None:
            break

    traj = Trajectory({k: np.concatenate(v) if v else np.zeros(0) for k, v in rec_cols.items()})
    if diverged_at is not None:
        raise DivergenceError(diverged_at, traj)
    metrics = Metrics(cfg.steady_window_start, n_steps * dt, err.tolist(), peak.tolist())
    return RunResult(traj, metrics)


def simulate_plant(plant: PlantModel, x0, dt: float, t_end: float,
                   u: Signal = Zero(), f: Signal = Zero()):
    """Open-loop RK4 integration of the plant alone, inputs evaluated at the
    stage times. Returns ``(t, X)`` with one state row per grid point."""
    n_steps = int(round(t_end / dt))
    X = np.empty((n_steps + 1, plant.order))
    X[0] = x0
    x = np.asarray(x0, dtype=float)
    for k in range(n_steps):
        t = k * dt
        th, t1 = t + 0.5 * dt, t + dt
        k1 = plant_derivative(plant, x, u.eval(t), f.eval(t))
        k2 = plant_derivative(plant, x + 0.5 * dt * k1, u.eval(th), f.eval(th))
        k3 = plant_derivative(plant, x + 0.5 * dt * k2, u.eval(th), f.eval(th))
        k4 = plant_derivative(plant, x + dt * k3, u.eval(t1), f.eval(t1))
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        X[k + 1] = x
    return np.arange(n_steps + 1) * dt, X
