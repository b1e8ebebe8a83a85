"""Deterministic exogenous signals (disturbances and measurement noise).

Every signal is a pure function of time so the integrator can evaluate it
at intermediate stage times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float
    frequency: float  # rad/s
    phase: float = 0.0

    def __post_init__(self):
        if not self.amplitude >= 0.0:
            raise ValueError(f"amplitude must be nonnegative, got {self.amplitude}")
        if not self.frequency > 0.0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")


@dataclass(frozen=True)
class Zero:
    def eval(self, t):
        return 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else 0.0

    def eval_derivative(self, t, order: int):
        return self.eval(t)

    def scaled(self, s: float) -> "Zero":
        return self


@dataclass(frozen=True)
class Constant:
    value: float

    def eval(self, t):
        if np.ndim(t):
            return np.full(np.shape(t), float(self.value))
        return float(self.value)

    def eval_derivative(self, t, order: int):
        if order == 0:
            return self.eval(t)
        return Zero().eval(t)

    def scaled(self, s: float) -> "Constant":
        return Constant(self.value * s)


@dataclass(frozen=True)
class SinusoidSum:
    """Finite sum of sinusoids ``sum_i A_i sin(w_i t + phi_i)``."""

    terms: tuple[Sinusoid, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def of(cls, *triples: tuple[float, float, float]) -> "SinusoidSum":
        return cls(tuple(Sinusoid(*tr) for tr in triples))

    @property
    def peak(self) -> float:
        return sum(term.amplitude for term in self.terms)

    def eval(self, t):
        if np.ndim(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            for term in self.terms:
                out += term.amplitude * np.sin(term.frequency * t + term.phase)
            return out
        return sum(term.amplitude * math.sin(term.frequency * t + term.phase)
                   for term in self.terms)

    def eval_derivative(self, t, order: int):
        # d^k/dt^k sin(x) = sin(x + k*pi/2)
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        if order == 0:
            return self.eval(t)
        shift = order * math.pi / 2
        if np.ndim(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            for term in self.terms:
                out += (term.amplitude * term.frequency ** order
                        * np.sin(term.frequency * t + term.phase + shift))
            return out
        return sum(term.amplitude * term.frequency ** order
                   * math.sin(term.frequency * t + term.phase + shift)
                   for term in self.terms)

    def derivative_bound(self, order: int) -> float:
        return sum(term.amplitude * term.frequency ** order for term in self.terms)

    def scaled(self, s: float) -> "SinusoidSum":
        # a negative factor is absorbed into the phase to keep amplitudes >= 0
        shift = math.pi if s < 0 else 0.0
        return SinusoidSum(tuple(Sinusoid(term.amplitude * abs(s), term.frequency,
                                          term.phase + shift)
                                 for term in self.terms))


@dataclass(frozen=True)
class SignalSum:
    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def eval(self, t):
        total = Zero().eval(t)
        for part in self.parts:
            total = total + part.eval(t)
        return total

    def eval_derivative(self, t, order: int):
        total = Zero().eval(t)
        for part in self.parts:
            total = total + part.eval_derivative(t, order)
        return total

    def scaled(self, s: float) -> "SignalSum":
        return SignalSum(tuple(part.scaled(s) for part in self.parts))


Signal = Union[Zero, Constant, SinusoidSum, SignalSum]


def evaluate(s: Signal, t):
    """Value of ``s`` at time ``t`` (scalar or array)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("signals are defined for t >= 0 only")
    return s.eval(t)


def evaluate_derivative(s: Signal, t, order: int):
    """Exact ``order``-th time derivative of ``s`` at ``t``."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    if np.any(np.asarray(t) < 0):
        raise ValueError("signals are defined for t >= 0 only")
    return s.eval_derivative(t, order)


def from_spec(spec) -> Signal:
    """Build a signal from its config form: a number or a list of
    ``{amplitude, frequency_rad_s, phase_rad}`` records."""
    if spec is None:
        return Zero()
    if isinstance(spec, bool):
        raise TypeError("signal must be a number or a list of sinusoid records")
    if isinstance(spec, (int, float)):
        return Zero() if spec == 0 else Constant(float(spec))
    if isinstance(spec, Sequence) and not isinstance(spec, str):
        terms = []
        for i, rec in enumerate(spec):
            if not isinstance(rec, dict):
                raise TypeError(f"[{i}]: sinusoid record must be a mapping")
            extra = set(rec) - {"amplitude", "frequency_rad_s", "phase_rad"}
            if extra:
                raise KeyError(f"[{i}]: unknown keys {sorted(extra)}")
            for key in ("amplitude", "frequency_rad_s"):
                if key not in rec:
                    raise KeyError(f"[{i}].{key}: missing required key")
            terms.append(Sinusoid(float(rec["amplitude"]), float(rec["frequency_rad_s"]),
                                  float(rec.get("phase_rad", 0.0))))
        return SinusoidSum(tuple(terms))
    raise TypeError("signal must be a number or a list of sinusoid records")


def to_spec(s: Signal):
    if isinstance(s, Zero):
        return 0.0
    if isinstance(s, Constant):
        return s.value
    if isinstance(s, SinusoidSum):
        return [{"amplitude": term.amplitude, "frequency_rad_s": term.frequency,
                 "phase_rad": term.phase} for term in s.terms]
    raise TypeError(f"{type(s).__name__} has no config representation")


def max_frequency(s: Signal) -> float:
    if isinstance(s, SinusoidSum):
        return max((term.frequency for term in s.terms), default=0.0)
    if isinstance(s, SignalSum):
        return max((max_frequency(p) for p in s.parts), default=0.0)
    return 0.0
