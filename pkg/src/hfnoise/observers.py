"""Derivative estimators feeding the control law.

* delayed finite differences of the filtered output (grid-aligned delays),
* the classical high-gain observer,
* the limited-gain-power (cascaded 2-state) high-gain observer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRID_TOL = 1e-9


def binomial(i: int, j: int) -> int:
    if not (isinstance(i, int) and isinstance(j, int)) or i < 0 or not 0 <= j <= i:
        raise ValueError(f"binomial({i}, {j}) needs integers 0 <= j <= i")
    return math.comb(i, j)


def steps_per_delay(h: float, dt: float) -> int:
    """Number of integration steps in one delay ``h``; ``h`` must sit on the grid."""
    if not (h > 0 and dt > 0):
        raise ValueError("h and dt must be positive")
    s = round(h / dt)
    if s < 1 or abs(s * dt - h) > GRID_TOL * h:
        raise ValueError(f"delay h={h} is not an integer multiple of dt={dt}")
    return int(s)


@dataclass(frozen=True)
class DelayDiffConfig:
    h: float
    gamma: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")

    def binomial_weights(self) -> np.ndarray:
        """``W[i, j]`` with ``ybar_i = sum_j W[i, j] yhat(t - j h)``."""
        W = np.zeros((self.gamma, self.gamma))
        for i in range(self.gamma):
            for j in range(i + 1):
                W[i, j] = (-1) ** j * binomial(i, j) / self.h ** i
        return W


class HistoryBuffer:
    """Ring of grid-aligned samples of the filtered output.

    Holds ``(gamma - 1) * h/dt + 1`` samples; anything older than ``t = 0``
    reads as zero.
    """

    def __init__(self, h: float, dt: float, gamma: int):
        self.h = h
        self.dt = dt
        self.gamma = gamma
        self.stride = steps_per_delay(h, dt)
        self.size = (gamma - 1) * self.stride + 1
        self._ring = np.zeros(self.size)
        self._head = -1
        self.count = 0

    @property
    def time(self) -> float:
        """Time stamp of the newest sample."""
        return (self.count - 1) * self.dt

    def push(self, value: float) -> None:
        self._head = (self._head + 1) % self.size
        self._ring[self._head] = value
        self.count += 1

    def back(self, k: int) -> float:
        """Sample ``k`` grid steps before the newest one."""
        if not 0 <= k < self.size:
            raise IndexError(f"lag {k} outside buffer of {self.size}")
        if k >= self.count:
            return 0.0
        return float(self._ring[(self._head - k) % self.size])

    def delayed(self) -> np.ndarray:
        """``[yhat(t), yhat(t - h), ..., yhat(t - (gamma-1) h)]``."""
        return np.array([self.back(j * self.stride) for j in range(self.gamma)])


def _check_time(buf: HistoryBuffer, t):
    if buf.count == 0:
        raise ValueError("history buffer is empty")
    if t is not None and abs(t - buf.time) > GRID_TOL * max(1.0, abs(t)):
        raise ValueError(f"buffer holds t={buf.time}, asked for t={t}")


def delay_diff_estimates(buf: HistoryBuffer, cfg: DelayDiffConfig, t=None) -> np.ndarray:
    """Estimates of ``yhat`` and its first ``gamma - 1`` derivatives from
    alternating binomial sums of delayed samples."""
    _check_time(buf, t)
    return cfg.binomial_weights() @ buf.delayed()


def delay_diff_recursive(buf: HistoryBuffer, cfg: DelayDiffConfig, t=None) -> np.ndarray:
    """Same estimates via repeated backward differences."""
    _check_time(buf, t)
    level = buf.delayed()
    out = [level[0]]
    for _ in range(1, cfg.gamma):
        level = (level[:-1] - level[1:]) / cfg.h
        out.append(level[0])
    return np.array(out)


def _default_hgo_gains():
    return (110.0, 110.0 ** 2 * 0.35, 110.0 ** 3 * 0.05, 110.0 ** 4 * 0.0024)


def _default_mod_hgo_gains():
    return ((110.0 * 0.5, 110.0 ** 2 * 0.16),
            (110.0 * 0.5, 110.0 ** 2 * 0.0525),
            (110.0 * 0.5, 110.0 ** 2 * 0.0171))


@dataclass(frozen=True)
class HgoConfig:
    gains: tuple[float, ...] = _default_hgo_gains()

    def __post_init__(self):
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        if not self.gains:
            raise ValueError("high-gain observer needs at least one gain")

    @property
    def gamma(self) -> int:
        return len(self.gains)

    @property
    def state_size(self) -> int:
        return len(self.gains)

    def derivative(self, xi, y):
        return hgo_derivative(self, xi, y)

    def outputs(self, xi) -> np.ndarray:
        return np.asarray(xi, dtype=float).copy()

    def output_matrix(self) -> np.ndarray:
        return np.eye(self.gamma)


def hgo_derivative(cfg: HgoConfig, xi, y: float) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (cfg.state_size,):
        raise ValueError(f"state must have length {cfg.state_size}")
    innovation = y - xi[0]
    out = np.empty_like(xi)
    out[:-1] = xi[1:]
    out[-1] = 0.0
    return out + np.asarray(cfg.gains) * innovation


@dataclass(frozen=True)
class ModHgoConfig:
    """Cascade of ``gamma - 1`` two-state blocks with gain pairs
    ``(l1, l2)`` per block."""

    block_gains: tuple[tuple[float, float], ...] = _default_mod_hgo_gains()

    def __post_init__(self):
        pairs = tuple((float(a), float(b)) for a, b in self.block_gains)
        if not pairs:
            raise ValueError("modified high-gain observer needs at least one block")
        object.__setattr__(self, "block_gains", pairs)

    @property
    def gamma(self) -> int:
        return len(self.block_gains) + 1

    @property
    def state_size(self) -> int:
        return 2 * len(self.block_gains)

    def derivative(self, eta, y):
        return mod_hgo_derivative(self, eta, y)

    def output_matrix(self) -> np.ndarray:
        nb = len(self.block_gains)
        C = np.zeros((self.gamma, self.state_size))
        for b in range(nb):
            C[b, 2 * b] = 1.0
        C[nb, 2 * nb - 1] = 1.0
        return C

    def outputs(self, eta) -> np.ndarray:
        return self.output_matrix() @ np.asarray(eta, dtype=float)


def mod_hgo_derivative(cfg: ModHgoConfig, eta, y: float) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (cfg.state_size,):
        raise ValueError(f"state must have length {cfg.state_size}")
    blocks = eta.reshape(-1, 2)
    nb = len(blocks)
    out = np.empty_like(blocks)
    drive = y
    for b, (l1, l2) in enumerate(cfg.block_gains):
        e = drive - blocks[b, 0]
        coupling = blocks[b + 1, 1] if b + 1 < nb else 0.0
        out[b, 0] = blocks[b, 1] + l1 * e
        out[b, 1] = coupling + l2 * e
        drive = blocks[b, 1]
    return out.reshape(-1)
