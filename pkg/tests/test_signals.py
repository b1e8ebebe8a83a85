import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from hfnoise.signals import (Constant, SignalSum, Sinusoid, SinusoidSum, Zero, evaluate,
                             evaluate_derivative, from_spec, to_spec)

terms = st.lists(st.tuples(st.floats(0, 5), st.floats(0.1, 50), st.floats(-math.pi, math.pi)),
                 min_size=1, max_size=4)


def test_zero():
    assert evaluate(Zero(), 5.0) == 0.0


def test_single_tone_at_origin():
    assert evaluate(SinusoidSum.of((1, 500, 0)), 0.0) == 0.0


def test_three_tone_noise_at_origin():
    w = SignalSum((SinusoidSum.of((1, 500, 0)), SinusoidSum.of((1, 1000, 0)),
                   SinusoidSum.of((1, 10000, 0))))
    assert evaluate(w, 0.0) == 0.0


def test_constant_derivative():
    assert evaluate_derivative(Constant(3.0), 1.7, 1) == 0.0
    assert evaluate_derivative(Constant(3.0), 1.7, 0) == 3.0


def test_first_derivative_sin2t():
    assert evaluate_derivative(SinusoidSum.of((1, 2, 0)), 0.0, 1) == pytest.approx(2.0)


def test_second_derivative_against_symbolic():
    t = sp.symbols("t")
    expected = float(sp.diff(sp.sin(2 * t), t, 2).subs(t, sp.pi / 4))
    assert expected == pytest.approx(-4.0)
    got = evaluate_derivative(SinusoidSum.of((1, 2, 0)), math.pi / 4, 2)
    assert got == pytest.approx(expected, abs=1e-12)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        evaluate(Zero(), -1.0)


def test_invalid_terms_rejected():
    with pytest.raises(ValueError):
        Sinusoid(-1.0, 1.0)
    with pytest.raises(ValueError):
        Sinusoid(1.0, 0.0)


@given(terms, st.floats(0, 100))
def test_order_zero_is_eval(tr, t):
    s = SinusoidSum.of(*tr)
    assert evaluate_derivative(s, t, 0) == evaluate(s, t)


@given(terms, st.floats(0, 100), st.integers(0, 4))
def test_derivative_bound(tr, t, k):
    s = SinusoidSum.of(*tr)
    assert abs(evaluate_derivative(s, t, k)) <= s.derivative_bound(k) * (1 + 1e-12) + 1e-12
    if k == 0:
        assert abs(evaluate(s, t)) <= s.peak + 1e-12


@given(terms, st.floats(1, 100))
def test_central_difference(tr, t):
    s = SinusoidSum.of(*tr)
    d = 1e-4
    fd = (evaluate(s, t + d) - evaluate(s, t - d)) / (2 * d)
    tol = d ** 2 * s.derivative_bound(3) + 1e-9 * (1 + s.derivative_bound(0) / d)
    assert abs(fd - evaluate_derivative(s, t, 1)) <= tol


def test_vector_evaluation_matches_scalar():
    s = SinusoidSum.of((1, 3, 0.2), (0.5, 7, -1))
    ts = np.linspace(0, 2, 11)
    np.testing.assert_allclose(s.eval(ts), [s.eval(float(t)) for t in ts], rtol=0, atol=1e-15)


def test_config_round_trip():
    s = SinusoidSum.of((1, 500, 0), (0.5, 1000, 0.3))
    assert from_spec(to_spec(s)) == s
    assert from_spec(2.5) == Constant(2.5)
    assert from_spec(0) == Zero()
    with pytest.raises(KeyError):
        from_spec([{"amplitude": 1, "frequency_rad_s": 1, "bogus": 2}])


def test_scaled_negative_keeps_amplitudes():
    s = SinusoidSum.of((1, 5, 0.1))
    neg = s.scaled(-2.0)
    assert neg.terms[0].amplitude == 2.0
    for t in (0.0, 0.3, 1.1):
        assert neg.eval(t) == pytest.approx(-2.0 * s.eval(t), abs=1e-12)
