import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfnoise.control import (ControllerConfig, control, control_from_history, validate,
                             validate_gains)
from hfnoise.observers import DelayDiffConfig, HistoryBuffer, delay_diff_estimates
from hfnoise.plant import Polynomial, is_hurwitz_by_roots


def test_design_law(design_controller):
    assert control(design_controller, [1, 0, 0, 0]) == pytest.approx(-6.3)
    assert control(design_controller, [0, 0, 0, 0]) == 0.0
    assert control(ControllerConfig(1.0, (1.0,)), [2.0]) == -2.0


def test_length_mismatch(design_controller):
    with pytest.raises(ValueError):
        control(design_controller, [1, 2, 3])


def test_constructor_requires_hurwitz_d():
    with pytest.raises(ValueError):
        ControllerConfig(1.0, (1.0, -1.0))
    with pytest.raises(ValueError):
        ControllerConfig(0.0, (1.0, 1.0))


def _buffer(values, h=0.05, dt=0.01, gamma=4):
    buf = HistoryBuffer(h, dt, gamma)
    for v in values:
        buf.push(v)
    return buf


def test_history_constant(design_controller):
    buf = _buffer([0.8] * 30)
    assert control_from_history(design_controller, 0.05, buf) == pytest.approx(-7 * 0.9 * 0.8, rel=1e-12)


def test_history_affine():
    cfg = ControllerConfig(2.0, (1.5, 0.5))
    a, dt = 3.0, 0.01
    buf = _buffer([a * k * dt for k in range(30)], gamma=2)
    t = buf.time
    assert control_from_history(cfg, 0.05, buf, t) == pytest.approx(-2.0 * (1.5 * a * t + 0.5 * a),
                                                                     rel=1e-12)


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=40))
def test_history_equals_composed_path(values):
    cfg = ControllerConfig(7.0, (0.9, 1.5, 2.0, 0.5))
    buf = _buffer(values)
    direct = control_from_history(cfg, 0.05, buf)
    composed = control(cfg, delay_diff_estimates(buf, DelayDiffConfig(0.05, 4)))
    # relative to the size of the summed terms (the sum itself may cancel)
    terms = np.abs(cfg.history_weights(0.05) * buf.delayed())
    assert abs(direct - composed) <= 1e-12 * max(terms.sum(), 1e-300)


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4), st.floats(-5, 5))
def test_homogeneous(est, s):
    cfg = ControllerConfig(7.0, (0.9, 1.5, 2.0, 0.5))
    assert control(cfg, np.array(est) * s) == pytest.approx(s * control(cfg, est), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("i", range(4))
def test_negative_feedback(design_controller, i):
    est = np.zeros(4)
    est[i] = 0.3
    assert control(design_controller, est) < 0


def test_validate_design(design_controller, nominal_plant):
    rep = validate(design_controller, nominal_plant)
    assert rep.ok
    assert rep.closed_loop.isclose(Polynomial((6.3, 11.5, 15.0, 3.5, 1.0)))
    assert is_hurwitz_by_roots(rep.closed_loop)


def test_validate_non_hurwitz_d():
    from hfnoise.plant import PlantModel
    plant = PlantModel.from_coeffs([0.0, 1.0, 1.0])
    rep = validate_gains(1.0, (1.0, -1.0), plant)
    assert not rep.checks["D Hurwitz"]
    assert not rep.ok


def test_validate_gamma_mismatch(nominal_plant):
    rep = validate(ControllerConfig(7.0, (0.9, 1.5, 2.0)), nominal_plant)
    assert not rep.checks["deg D = gamma - 1"]
    assert not rep.ok
