import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfnoise.observers import (DelayDiffConfig, HgoConfig, HistoryBuffer, ModHgoConfig, binomial,
                               delay_diff_estimates, delay_diff_recursive, hgo_derivative,
                               mod_hgo_derivative, steps_per_delay)


def pascal(n):
    rows = [[1]]
    for _ in range(n):
        prev = rows[-1]
        rows.append([1] + [a + b for a, b in zip(prev, prev[1:])] + [1])
    return rows


@pytest.mark.parametrize("i,j,expected", [(3, 0, 1), (3, 2, 3)])
def test_binomial_small(i, j, expected):
    assert binomial(i, j) == expected


def test_binomial_against_pascal():
    tri = pascal(10)
    assert binomial(6, 3) == tri[6][3] == 20
    for i in range(11):
        for j in range(i + 1):
            assert binomial(i, j) == tri[i][j]


@pytest.mark.parametrize("args", [(3, 4), (-1, 0), (3, -1)])
def test_binomial_out_of_range(args):
    with pytest.raises(ValueError):
        binomial(*args)


def fill(buf, fn, n):
    for k in range(n):
        buf.push(fn(k * buf.dt))


def test_grid_alignment_enforced():
    assert steps_per_delay(0.05, 1e-4) == 500
    assert steps_per_delay(0.05, 1e-5) == 5000
    with pytest.raises(ValueError):
        steps_per_delay(0.05, 3e-4)


def test_zero_history_before_start():
    buf = HistoryBuffer(0.1, 0.05, 3)
    buf.push(2.0)
    np.testing.assert_array_equal(buf.delayed(), [2.0, 0.0, 0.0])


def test_buffer_size():
    buf = HistoryBuffer(0.05, 1e-3, 4)
    assert buf.size == 3 * 50 + 1


def test_constant_signal():
    cfg = DelayDiffConfig(0.05, 4)
    buf = HistoryBuffer(0.05, 0.01, 4)
    fill(buf, lambda t: 1.7, 40)
    est = delay_diff_estimates(buf, cfg)
    assert est[0] == 1.7
    np.testing.assert_array_equal(est[1:], 0.0)


def test_affine_signal():
    cfg = DelayDiffConfig(0.25, 3)
    buf = HistoryBuffer(0.25, 0.125, 3)   # binary fractions keep the arithmetic exact
    fill(buf, lambda t: 3.0 * t, 40)
    est = delay_diff_estimates(buf, cfg)
    assert est[1] == 3.0
    assert est[2] == 0.0


def test_quadratic_backward_bias():
    h = 0.05
    cfg = DelayDiffConfig(h, 2)
    buf = HistoryBuffer(h, 0.01, 2)
    fill(buf, lambda t: t * t, 101)
    t = buf.time
    assert delay_diff_estimates(buf, cfg, t)[1] == pytest.approx(2 * t - h, rel=1e-10)


def test_time_mismatch_rejected():
    buf = HistoryBuffer(0.05, 0.01, 2)
    fill(buf, lambda t: t, 10)
    with pytest.raises(ValueError):
        delay_diff_estimates(buf, DelayDiffConfig(0.05, 2), t=5.0)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=60), st.integers(1, 5),
       st.sampled_from([0.01, 0.05, 0.2]))
def test_binomial_equals_recursive(samples, gamma, h):
    cfg = DelayDiffConfig(h, gamma)
    buf = HistoryBuffer(h, h / 4, gamma)
    for v in samples:
        buf.push(v)
    a = delay_diff_estimates(buf, cfg)
    b = delay_diff_recursive(buf, cfg)
    scale = max(1.0, np.max(np.abs(a)))
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12 * scale)


@given(st.floats(0.1, 5.0), st.floats(50.0, 2000.0), st.floats(0, 6.3), st.integers(1, 4))
def test_noise_amplification_bound(a, omega, phase, order):
    h, dt = 0.05, 0.001
    cfg = DelayDiffConfig(h, order + 1)
    buf = HistoryBuffer(h, dt, order + 1)
    fill(buf, lambda t: a * np.sin(omega * t + phase), 400)
    est = delay_diff_estimates(buf, cfg)
    assert abs(est[order]) <= a * (2 / h) ** order * (1 + 1e-12)


def test_hgo_examples():
    cfg = HgoConfig()
    np.testing.assert_array_equal(hgo_derivative(cfg, np.zeros(4), 0.0), 0)
    np.testing.assert_allclose(hgo_derivative(cfg, np.zeros(4), 1.0),
                               [110, 4235, 66550, 351384], rtol=1e-14)
    np.testing.assert_array_equal(hgo_derivative(cfg, [1, 0, 0, 0], 1.0), 0)
    np.testing.assert_array_equal(cfg.outputs([1, 2, 3, 4]), [1, 2, 3, 4])


def test_mod_hgo_examples():
    cfg = ModHgoConfig()
    np.testing.assert_array_equal(mod_hgo_derivative(cfg, np.zeros(6), 0.0), 0)
    d = mod_hgo_derivative(cfg, np.zeros(6), 1.0)
    np.testing.assert_allclose(d[:2], [55, 1936], rtol=1e-14)
    np.testing.assert_array_equal(d[2:], 0)
    eta = np.zeros(6)
    eta[0] = 1.0
    np.testing.assert_array_equal(mod_hgo_derivative(cfg, eta, 1.0), 0)


def test_mod_hgo_outputs():
    cfg = ModHgoConfig()
    eta = np.arange(1.0, 7.0)
    np.testing.assert_array_equal(cfg.outputs(eta), [1, 3, 5, 6])


def test_mod_hgo_written_out():
    # the three blocks, transcribed term by term
    l = 110.0
    y = 0.3
    eta = np.array([0.1, -0.2, 0.4, 0.05, -0.3, 0.7])
    e1 = y - eta[0]
    e2 = eta[1] - eta[2]
    e3 = eta[3] - eta[4]
    expected = [eta[1] + l * 0.5 * e1, eta[3] + l ** 2 * 0.16 * e1,
                eta[3] + l * 0.5 * e2, eta[5] + l ** 2 * 0.0525 * e2,
                eta[5] + l * 0.5 * e3, l ** 2 * 0.0171 * e3]
    np.testing.assert_allclose(mod_hgo_derivative(ModHgoConfig(), eta, y), expected, rtol=1e-14)


@given(st.lists(st.floats(-100, 100), min_size=4, max_size=4), st.floats(-100, 100))
def test_hgo_linear(xi, y):
    cfg = HgoConfig()
    a = hgo_derivative(cfg, np.array(xi), y)
    b = hgo_derivative(cfg, 2 * np.array(xi), 2 * y)
    np.testing.assert_allclose(b, 2 * a, rtol=1e-12, atol=1e-9)


@given(st.lists(st.floats(-100, 100), min_size=6, max_size=6), st.floats(-100, 100))
def test_mod_hgo_linear(eta, y):
    cfg = ModHgoConfig()
    a = mod_hgo_derivative(cfg, np.array(eta), y)
    b = mod_hgo_derivative(cfg, 2 * np.array(eta), 2 * y)
    np.testing.assert_allclose(b, 2 * a, rtol=1e-12, atol=1e-9)


def test_default_gains_are_reference_values():
    assert HgoConfig().gains == (110, 110 ** 2 * 0.35, 110 ** 3 * 0.05, 110 ** 4 * 0.0024)
    assert ModHgoConfig().block_gains[2] == (110 * 0.5, 110 ** 2 * 0.0171)
