"""Static output-feedback law ``u = -alpha * sum_i d_i * ybar_i``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .observers import DelayDiffConfig, HistoryBuffer, binomial
from .plant import PlantModel, Polynomial, closed_loop_poly, is_hurwitz, relative_degree


@dataclass(frozen=True)
class ControllerConfig:
    alpha: float
    d: tuple[float, ...]  # ascending: d_0 .. d_{gamma-1}

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.d:
            raise ValueError("d must have at least one coefficient")
        if self.d[-1] == 0.0:
            raise ValueError("leading coefficient d_{gamma-1} must be nonzero")
        if len(self.d) > 1 and not is_hurwitz(self.poly):
            raise ValueError("D(lambda) must be Hurwitz")
        if len(self.d) == 1 and self.d[0] <= 0:
            raise ValueError("d_0 must be positive")

    @property
    def gamma(self) -> int:
        return len(self.d)

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self.d)

    def gain_row(self) -> np.ndarray:
        """Row vector ``c`` with ``u = c @ estimates``."""
        return -self.alpha * np.asarray(self.d)

    def history_weights(self, h: float) -> np.ndarray:
        """Weights ``c_j`` with ``u = sum_j c_j yhat(t - j h)``."""
        c = np.zeros(self.gamma)
        for i, di in enumerate(self.d):
            for j in range(i + 1):
                c[j] += di / h ** i * (-1) ** j * binomial(i, j)
        return -self.alpha * c


def control(cfg: ControllerConfig, estimates) -> float:
    estimates = np.asarray(estimates, dtype=float)
    if estimates.shape != (cfg.gamma,):
        raise ValueError(f"expected {cfg.gamma} estimates, got shape {estimates.shape}")
    return float(-cfg.alpha * np.dot(cfg.d, estimates))


def control_from_history(cfg: ControllerConfig, h: float, buf: HistoryBuffer, t=None) -> float:
    """The same law written directly on delayed samples of ``yhat``."""
    if buf.gamma != cfg.gamma:
        raise ValueError("buffer depth does not match the controller's gamma")
    if t is not None and abs(t - buf.time) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"buffer holds t={buf.time}, asked for t={t}")
    return float(np.dot(cfg.history_weights(h), buf.delayed()))


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)
    closed_loop: Polynomial | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        return [f"{name}: {'pass' if passed else 'FAIL'}" for name, passed in self.checks.items()]


def validate(cfg: ControllerConfig, plant: PlantModel) -> ValidationReport:
    return validate_gains(cfg.alpha, cfg.d, plant)


def validate_gains(alpha: float, d, plant: PlantModel) -> ValidationReport:
    """Report-style checks on a candidate ``(alpha, d)``; never raises on a
    failed check, so it also covers gains the constructor would refuse."""
    report = ValidationReport()
    gamma = relative_degree(plant)
    d = tuple(float(v) for v in d)
    poly = Polynomial(d)
    report.checks["alpha > 0"] = alpha > 0
    report.checks["deg D = gamma - 1"] = len(d) == gamma and d[-1] != 0.0
    report.checks["D Hurwitz"] = is_hurwitz(poly) if poly.degree >= 1 else poly.coeffs[0] > 0
    if report.checks["deg D = gamma - 1"]:
        report.closed_loop = closed_loop_poly(plant, alpha, poly)
        report.checks["F Hurwitz (nominal)"] = is_hurwitz(report.closed_loop)
    else:
        report.checks["F Hurwitz (nominal)"] = False
    return report
