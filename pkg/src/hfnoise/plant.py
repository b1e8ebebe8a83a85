"""Polynomials, the uncertain LTI plant ``Q(p) z = k R(p) u + f`` and
Hurwitz certification of closed-loop polynomials."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

REL_TOL = 1e-12


class DegreeZero(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class RelativeDegreeUnsupported(ValueError):
    """True derivatives of z are not readable from the state when deg R > 0."""


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with ascending coefficients (``coeffs[i]`` multiplies
    ``lam**i``). Trailing zeros are stripped on construction."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        if any(not math.isfinite(v) for v in c):
            raise ValueError("polynomial coefficients must be finite")
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if not c:
            c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def of(cls, *coeffs: float) -> "Polynomial":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, lam):
        acc = 0.0 * lam
        for c in reversed(self.coeffs):
            acc = acc * lam + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return Polynomial(tuple((a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0)
                                for i in range(size)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1.0)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def scale(self, s: float) -> "Polynomial":
        return Polynomial(tuple(s * c for c in self.coeffs))

    def roots(self) -> np.ndarray:
        return np.roots(self.coeffs[::-1])

    def isclose(self, other: "Polynomial", rel: float = REL_TOL) -> bool:
        if self.degree != other.degree:
            return False
        scale = max(max(abs(c) for c in self.coeffs), max(abs(c) for c in other.coeffs), 1e-300)
        return all(abs(a - b) <= rel * scale for a, b in zip(self.coeffs, other.coeffs))


def routh_first_column(p: Polynomial) -> list[float]:
    """First column of the Routh array of ``p``.

    Stops early (returning the partial column) when a zero pivot appears;
    the caller treats that as a failure of the Hurwitz test.
    """
    desc = list(p.coeffs[::-1])
    if desc[0] < 0:
        desc = [-c for c in desc]
    n = len(desc) - 1
    prev = desc[0::2]
    cur = desc[1::2]
    width = len(prev)
    prev = prev + [0.0] * (width - len(prev))
    cur = cur + [0.0] * (width - len(cur))
    column = [prev[0], cur[0]]
    for _ in range(n - 1):
        pivot = cur[0]
        if pivot == 0.0:
            return column
        nxt = [(pivot * prev[i + 1] - prev[0] * cur[i + 1]) / pivot for i in range(width - 1)]
        nxt.append(0.0)
        prev, cur = cur, nxt
        column.append(cur[0])
    return column


def is_hurwitz(p: Polynomial) -> bool:
    """True iff every root of ``p`` has strictly negative real part
    (Routh array, no root finding)."""
    if p.degree < 1:
        raise DegreeZero("Hurwitz test needs a polynomial of degree >= 1")
    column = routh_first_column(p)
    return len(column) == p.degree + 1 and all(c > 0.0 for c in column)


def is_hurwitz_by_roots(p: Polynomial) -> bool:
    """Root-finding oracle, independent of the Routh path."""
    if p.degree < 1:
        raise DegreeZero("Hurwitz test needs a polynomial of degree >= 1")
    return bool(np.all(p.roots().real < 0.0))


@dataclass(frozen=True)
class PlantModel:
    """``Q(p) z = k R(p) u + f`` with monic ``Q`` (degree n) and Hurwitz ``R``
    (degree m < n)."""

    den: Polynomial
    num: Polynomial
    gain: float

    def __post_init__(self):
        if self.den.degree < 1:
            raise ValueError("denominator must have degree >= 1")
        if abs(self.den.leading - 1.0) > REL_TOL:
            raise ValueError("denominator must be monic")
        if self.num.is_zero():
            raise ValueError("numerator must be nonzero")
        if self.num.degree >= self.den.degree:
            raise ValueError("numerator degree must be below denominator degree")
        if not self.gain > 0:
            raise ValueError("gain k must be positive")
        if self.num.degree >= 1 and not is_hurwitz(self.num):
            raise ValueError("numerator polynomial R must be Hurwitz")
        if self.num.degree == 0 and self.num.leading <= 0:
            # a constant R is trivially Hurwitz; its sign is folded into k's role
            raise ValueError("constant numerator must be positive")

    @classmethod
    def from_coeffs(cls, den: Sequence[float], num: Sequence[float] = (1.0,),
                    gain: float = 1.0) -> "PlantModel":
        return cls(Polynomial(tuple(den)), Polynomial(tuple(num)), float(gain))

    @property
    def order(self) -> int:
        return self.den.degree

    def state_space(self):
        """Return ``(A, b_u, b_f)`` with ``x' = A x + b_u u + b_f f`` and ``z = x[0]``.

        Controllable companion form when ``R`` is constant (state is the
        derivative chain of z), observer companion form otherwise.
        """
        n = self.order
        q = np.array(self.den.coeffs[:n])
        A = np.zeros((n, n))
        bu = np.zeros(n)
        bf = np.zeros(n)
        if self.num.degree == 0:
            A[np.arange(n - 1), np.arange(1, n)] = 1.0
            A[n - 1, :] = -q
            bu[n - 1] = self.gain * self.num.coeffs[0]
            bf[n - 1] = 1.0
        else:
            b = np.zeros(n)
            b[: self.num.degree + 1] = self.gain * np.array(self.num.coeffs)
            for i in range(n):
                A[i, 0] = -q[n - 1 - i]
                if i + 1 < n:
                    A[i, i + 1] = 1.0
                bu[i] = b[n - 1 - i]
            bf[n - 1] = 1.0
        return A, bu, bf


def relative_degree(plant: PlantModel) -> int:
    return plant.den.degree - plant.num.degree


def plant_derivative(plant: PlantModel, x, u: float, f: float) -> np.ndarray:
    A, bu, bf = plant.state_space()
    return A @ np.asarray(x, dtype=float) + bu * u + bf * f


def true_derivatives(plant: PlantModel, x) -> np.ndarray:
    """``(z, z', ..., z^(n-1))`` read off the state; needs constant ``R``."""
    if plant.num.degree > 0:
        raise RelativeDegreeUnsupported(
            "plant derivatives are only state-readable when R is constant")
    x = np.asarray(x, dtype=float)
    if x.shape != (plant.order,):
        raise ValueError(f"state must have length {plant.order}")
    return x.copy()


def closed_loop_poly(plant: PlantModel, alpha: float, d: Polynomial) -> Polynomial:
    """``F = Q + alpha k R D``."""
    return _closed_loop(plant.den, plant.num, plant.gain, alpha, d)


def _closed_loop(den: Polynomial, num: Polynomial, gain: float, alpha: float,
                 d: Polynomial) -> Polynomial:
    gamma = den.degree - num.degree
    if d.degree != gamma - 1:
        raise DegreeMismatch(f"deg D must equal relative degree - 1 = {gamma - 1}, got {d.degree}")
    return den + (num * d).scale(alpha * gain)


@dataclass(frozen=True)
class ParameterBox:
    """Interval box for the non-leading denominator coefficients (ascending),
    the gain k and optionally the numerator coefficients."""

    den: tuple[tuple[float, float], ...]
    gain: tuple[float, float] = (1.0, 1.0)
    num: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "den", tuple(tuple(map(float, iv)) for iv in self.den))
        object.__setattr__(self, "gain", tuple(map(float, self.gain)))
        if self.num is not None:
            object.__setattr__(self, "num", tuple(tuple(map(float, iv)) for iv in self.num))
        for name, ivs in (("den", self.den), ("gain", (self.gain,)), ("num", self.num or ())):
            for lo, hi in ivs:
                if not lo <= hi:
                    raise ValueError(f"{name}: empty interval [{lo}, {hi}]")
        if not self.gain[0] > 0:
            raise ValueError("gain interval must be strictly positive")

    def axes(self) -> list[tuple[str, tuple[float, float]]]:
        out = [(f"q{i}", iv) for i, iv in enumerate(self.den)]
        out.append(("k", self.gain))
        for i, iv in enumerate(self.num or ()):
            out.append((f"r{i}", iv))
        return out


@dataclass
class BoxReport:
    passed: int = 0
    failed: int = 0
    first_failure: Optional[dict] = None
    failures: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.passed + self.failed

    @property
    def all_pass(self) -> bool:
        return self.failed == 0 and self.passed > 0


def verify_over_box(box: ParameterBox, num: Polynomial, alpha: float, d: Polynomial,
                    grid_per_axis: int) -> BoxReport:
    """Hurwitz test of ``Q + alpha k R D`` on every vertex of a uniform grid
    over the box (interval endpoints included)."""
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be >= 2")
    axes = box.axes()
    grids = [np.linspace(lo, hi, grid_per_axis) if hi > lo else np.array([lo])
             for _, (lo, hi) in axes]
    n = len(box.den)
    n_num = len(box.num) if box.num is not None else 0
    report = BoxReport()
    for point in itertools.product(*grids):
        den = Polynomial(tuple(point[:n]) + (1.0,))
        k = point[n]
        r = Polynomial(tuple(point[n + 1:n + 1 + n_num])) if n_num else num
        ok = is_hurwitz(_closed_loop(den, r, k, alpha, d))
        if ok:
            report.passed += 1
        else:
            report.failed += 1
            params = {name: float(v) for (name, _), v in zip(axes, point)}
            report.failures.append(params)
            if report.first_failure is None:
                report.first_failure = params
    return report
