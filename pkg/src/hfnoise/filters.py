"""Cascade of r first-order low-pass stages with a small time scale mu,
and the closed-form steady-state attenuation of sinusoidal noise."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import SinusoidSum


@dataclass(frozen=True)
class FilterConfig:
    mu: float
    sigma: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(float(s) for s in self.sigma))
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.sigma:
            raise ValueError("sigma must list at least one stage")
        if any(not s > 0 for s in self.sigma):
            raise ValueError("every sigma must be positive")

    @classmethod
    def uniform(cls, mu: float, r: int, sigma: float = 1.0) -> "FilterConfig":
        return cls(mu, (sigma,) * r)

    @property
    def r(self) -> int:
        return len(self.sigma)

    @property
    def time_constants(self) -> np.ndarray:
        return self.mu * np.asarray(self.sigma)

    def matrices(self):
        """``(A, b)`` of ``xi' = A xi + b y`` (the cascade already divided by mu)."""
        tau = self.time_constants
        A = np.diag(-1.0 / tau)
        A[np.arange(1, self.r), np.arange(self.r - 1)] = 1.0 / tau[1:]
        b = np.zeros(self.r)
        b[0] = 1.0 / tau[0]
        return A, b


def initial_state(cfg: FilterConfig) -> np.ndarray:
    return np.zeros(cfg.r)


def filter_derivative(cfg: FilterConfig, xi, y: float) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    upstream = np.empty_like(xi)
    upstream[0] = y
    upstream[1:] = xi[:-1]
    return (upstream - xi) / cfg.time_constants


def filter_output(cfg: FilterConfig, xi) -> float:
    return float(xi[cfg.r - 1])


def stage_gain_phase(cfg: FilterConfig, stage: int, omega: float) -> tuple[float, float]:
    """Steady-state amplitude ratio and phase lag of stage ``stage`` (1-based)
    for a sinusoid at ``omega`` rad/s."""
    if not 1 <= stage <= cfg.r:
        raise IndexError(f"stage must be in 1..{cfg.r}")
    if omega < 0:
        raise ValueError("omega must be >= 0")
    gain = 1.0 / math.sqrt(1.0 + (omega * cfg.mu * cfg.sigma[stage - 1]) ** 2)
    return gain, math.acos(min(gain, 1.0))


def cascade_gain(cfg: FilterConfig, omega: float, stages: int | None = None) -> float:
    stages = cfg.r if stages is None else stages
    return math.prod(stage_gain_phase(cfg, j, omega)[0] for j in range(1, stages + 1))


def attenuation_bound(cfg: FilterConfig, noise: SinusoidSum) -> float:
    """Upper bound on the steady-state noise part of ``|yhat - z|``."""
    return sum(term.amplitude * cascade_gain(cfg, term.frequency) for term in noise.terms)


def simulate_filter(cfg: FilterConfig, signal, dt: float, t_end: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 response of the cascade to ``signal`` from rest.

    ``signal`` is anything with a vectorised ``eval(t)`` (see ``signals``).
    Returns ``(t, xi)`` with one row of stage states per grid point.
    """
    n = int(round(t_end / dt))
    A, b = cfg.matrices()
    # one RK4 step of a linear system is Phi x + c0 y(t) + cm y(t+dt/2) + c1 y(t+dt)
    Ah = A * dt
    I = np.eye(cfg.r)
    Phi = I + Ah @ (I + Ah / 2 @ (I + Ah / 3 @ (I + Ah / 4)))
    bh = b * dt
    Ah2 = Ah @ Ah
    c0 = (I + Ah + Ah2 / 2 + Ah2 @ Ah / 4) @ bh / 6
    cm = (4 * I + 2 * Ah + Ah2 / 2) @ bh / 6
    c1 = bh / 6
    t = np.arange(n + 1) * dt
    y0 = np.asarray(signal.eval(t), dtype=float)
    ym = np.asarray(signal.eval(t[:-1] + 0.5 * dt), dtype=float)
    drive = np.outer(y0[:-1], c0) + np.outer(ym, cm) + np.outer(y0[1:], c1)
    out = np.empty((n + 1, cfg.r))
    out[0] = initial_state(cfg)
    PhiT = Phi.T
    for k in range(n):
        out[k + 1] = out[k] @ PhiT + drive[k]
    return t, out
