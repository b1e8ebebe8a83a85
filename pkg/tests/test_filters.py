import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfnoise import filters
from hfnoise.filters import (FilterConfig, attenuation_bound, cascade_gain, filter_derivative,
                             filter_output, initial_state, stage_gain_phase)
from hfnoise.signals import SinusoidSum


def simulate_filter(cfg, y, dt, t_end):
    """Plain RK4 on the cascade with input evaluated at stage times."""
    n = int(round(t_end / dt))
    xi = initial_state(cfg)
    out = np.empty((n + 1, cfg.r))
    out[0] = xi
    for k in range(n):
        t = k * dt
        k1 = filter_derivative(cfg, xi, y(t))
        k2 = filter_derivative(cfg, xi + 0.5 * dt * k1, y(t + 0.5 * dt))
        k3 = filter_derivative(cfg, xi + 0.5 * dt * k2, y(t + 0.5 * dt))
        k4 = filter_derivative(cfg, xi + dt * k3, y(t + dt))
        xi = xi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = xi
    return np.arange(n + 1) * dt, out


def test_first_stage_rate():
    np.testing.assert_allclose(filter_derivative(FilterConfig(0.01, (1,)), [0.0], 1.0), [100.0])


def test_dc_fixed_point():
    cfg = FilterConfig(0.02, (1.0, 0.5, 2.0))
    np.testing.assert_array_equal(filter_derivative(cfg, [1.5, 1.5, 1.5], 1.5), 0)


def test_two_stage_substitution():
    cfg = FilterConfig(0.01, (1.0, 1.0))
    xdot = filter_derivative(cfg, [0.5, 0.0], 1.0)
    np.testing.assert_allclose(xdot, [50.0, 50.0])
    # same values from the matrix form (A, b) of the cascade
    A, b = cfg.matrices()
    np.testing.assert_allclose(A @ [0.5, 0.0] + b * 1.0, xdot)


def test_output_is_last_stage():
    cfg = FilterConfig(0.01, (1.0, 1.0, 1.0))
    assert filter_output(cfg, [1.0, 2.0, 3.0]) == 3.0
    assert filter_output(cfg, [0.0, 0.0, 0.0]) == 0.0


def test_invalid_config():
    with pytest.raises(ValueError, match="mu must be positive"):
        FilterConfig(-0.01, (1.0,))
    with pytest.raises(ValueError):
        FilterConfig(0.01, (1.0, 0.0))
    with pytest.raises(ValueError):
        FilterConfig(0.01, ())


def test_gain_phase_dc():
    assert stage_gain_phase(FilterConfig(0.01, (1.0,)), 1, 0.0) == (1.0, 0.0)


def test_gain_phase_reference_setting():
    g, ph = stage_gain_phase(FilterConfig(0.01, (1.0,)), 1, 500.0)
    assert g == pytest.approx(1 / math.sqrt(26), rel=1e-14)
    assert g == pytest.approx(0.196116, abs=1e-6)
    assert ph == pytest.approx(1.37340, abs=1e-5)


def test_gain_phase_corner():
    g, ph = stage_gain_phase(FilterConfig(0.5, (2.0,)), 1, 1.0)
    assert g == pytest.approx(1 / math.sqrt(2))
    assert ph == pytest.approx(math.pi / 4)


def test_bound_examples():
    noise = SinusoidSum.of((1, 500, 0))
    assert attenuation_bound(FilterConfig.uniform(0.01, 2), noise) == pytest.approx(1 / 26, rel=1e-14)
    assert attenuation_bound(FilterConfig.uniform(0.01, 5), noise) == pytest.approx(26 ** -2.5, rel=1e-14)
    assert attenuation_bound(FilterConfig.uniform(0.01, 5), noise) == pytest.approx(2.901e-4, rel=1e-3)
    assert attenuation_bound(FilterConfig.uniform(0.01, 2), SinusoidSum()) == 0.0


def test_one_rk4_step_matches_exponential():
    cfg = FilterConfig(0.01, (1.0,))
    _, xi = simulate_filter(cfg, lambda t: 1.0, 1e-3, 1e-3)
    assert xi[-1, 0] == pytest.approx(1 - math.exp(-0.1), abs=1e-7)


def test_dc_gain_settles():
    cfg = FilterConfig(0.01, (1.0, 2.0, 0.5))
    c = 2.5
    t_settle = 15 * cfg.mu * sum(cfg.sigma)
    _, xi = simulate_filter(cfg, lambda t: c, 1e-4, t_settle)
    assert abs(filter_output(cfg, xi[-1]) - c) <= 1e-6 * abs(c)


def _steady_amplitude(cfg, omega, stages_out):
    dt = 1e-5
    period = 2 * math.pi / omega
    t, xi = simulate_filter(cfg, lambda t: math.sin(omega * t), dt, 0.3 + 2 * period)
    mask = t >= 0.3
    return [np.max(np.abs(xi[mask, j])) for j in range(stages_out)]


def test_stage_products_match_simulation():
    cfg = FilterConfig(0.01, (1.0, 0.5, 2.0))
    omega = 300.0
    amps = _steady_amplitude(cfg, omega, 3)
    for j in range(1, 4):
        assert amps[j - 1] == pytest.approx(cascade_gain(cfg, omega, j), rel=0.01)


@given(st.floats(1e-3, 0.1), st.lists(st.floats(0.1, 3), min_size=1, max_size=5),
       st.floats(1.0, 1e4), st.floats(0.05, 0.9))
def test_bound_grows_as_mu_shrinks(mu, sigma, omega, factor):
    # smaller mu moves the corner up, so a fixed tone is attenuated less
    noise = SinusoidSum.of((1.0, omega, 0.0))
    big = attenuation_bound(FilterConfig(mu, tuple(sigma)), noise)
    small = attenuation_bound(FilterConfig(mu * factor, tuple(sigma)), noise)
    assert small > big


@given(st.floats(1e-3, 0.1), st.lists(st.floats(0.1, 3), min_size=1, max_size=5),
       st.floats(1.0, 1e4), st.floats(0.1, 3))
def test_bound_shrinks_with_extra_stage(mu, sigma, omega, extra):
    noise = SinusoidSum.of((1.0, omega, 0.0))
    before = attenuation_bound(FilterConfig(mu, tuple(sigma)), noise)
    after = attenuation_bound(FilterConfig(mu, tuple(sigma) + (extra,)), noise)
    assert after < before


def test_tracking_error_shrinks_with_mu_noise_free():
    # noise-free part of |yhat - z|: lag on a bounded smooth z decreases with mu
    errs = []
    for mu in (0.1, 0.05, 0.02, 0.01):
        cfg = FilterConfig.uniform(mu, 2)
        t, xi = simulate_filter(cfg, math.sin, 1e-3, 12.0)
        mask = t >= 6.0
        errs.append(np.max(np.abs(xi[mask, -1] - np.sin(t[mask]))))
    assert all(a >= b for a, b in zip(errs, errs[1:]))


def test_library_simulation_matches_plain_rk4():
    cfg = FilterConfig(0.01, (1.0, 0.5, 2.0))
    sig = SinusoidSum.of((1.0, 300.0, 0.2), (0.5, 7.0, 0.0))
    _, fast = filters.simulate_filter(cfg, sig, 1e-4, 0.2)
    _, slow = simulate_filter(cfg, lambda t: float(sig.eval(t)), 1e-4, 0.2)
    np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-12)
