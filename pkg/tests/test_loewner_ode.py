import math

import numpy as np
import pytest

import oracles
from loewnerlab import drivers, examples, loewner_ode as lo
from loewnerlab.errors import DriverDomainError, InvariantViolation, SwallowedError


def test_constant_driver_closed_form_at_nodes():
    path = lo.solve_tip(drivers.constant(0.0), 1.0, 0.5, 1e-12)
    np.testing.assert_allclose(path.values, 1j * np.sqrt(4 * path.u + 0.25), atol=1e-11)
    assert path.envelope_checked
    assert path.steps > 0


def test_constant_driver_limit():
    assert lo.tip_limit(drivers.constant(0.0), 0.25) == pytest.approx(1j, abs=1e-10)
    assert lo.tip_limit(drivers.constant(0.0), 1.0) == pytest.approx(2j, abs=1e-10)


def test_linear_driver_against_rk4_and_implicit_solution():
    f = lo.solve_tip(drivers.linear(), 1.0, 0.01, 1e-10).tip
    ref = oracles.rk4_tip(lambda t: 1.0, 1.0, 0.01)
    assert abs(oracles.linear_tip_residual(ref, 1.0, 0.01)) < 1e-12
    assert abs(f - ref) < 1e-9


def test_linear_tip_limit_against_oracle():
    assert abs(lo.tip_limit(drivers.linear(), 1.0, 1e-10) - examples.linear_exact(1.0)) < 1e-10


def test_circle_tip_limit_on_circle():
    z = lo.tip_limit(drivers.sqrt_circle(), 0.1, 1e-10)
    assert abs(z - examples.circle_hat(0.1)) < 1e-10
    assert abs(abs(z - 0.5) - 0.5) < 1e-10


@pytest.mark.parametrize("d", [drivers.constant(0.0), drivers.linear()])
def test_variation_vanishes_without_second_derivative(d):
    path = lo.solve_tip_with_variation(d, 1.0, 0.1, 1e-10)
    assert np.max(np.abs(path.variation)) < 1e-9


def test_sine_variation_against_finite_difference():
    s, eps, delta = 0.5, 0.01, 1e-5
    path = lo.solve_tip_with_variation(drivers.sine(), s, eps, 1e-12)
    fd = (oracles.rk4_tip(math.cos, s + delta, eps, u_end=s)
          - oracles.rk4_tip(math.cos, s - delta, eps, u_end=s)) / (2 * delta)
    assert abs(path.tip_variation - fd) < 1e-8
    # |d_s f(u)| <= c u with a moderate constant
    u = path.u[1:]
    c = np.max(np.abs(path.variation[1:]) / u)
    assert np.isfinite(c) and c < 10


def test_tip_and_variation_consistent_with_path():
    d = drivers.sine()
    f, x, integral = lo.tip_and_variation(d, 0.5, 1e-11)
    path = lo.solve_tip_with_variation(d, 0.5, 0.5e-11, 0.05e-11)
    assert abs(f - path.tip) < 1e-12
    assert abs(x - path.tip_variation) < 1e-10
    assert abs(integral - path.integral) < 1e-9


def test_variation_across_kink_matches_finite_difference():
    # lambda' jumps at 0.25; the variation formulation has no delta term
    d = drivers.piecewise([drivers.constant(0.0), drivers.sine()], [0, 0.25, 1.0])
    s, eps, delta = 0.6, 0.05, 1e-5
    path = lo.solve_tip_with_variation(d, s, eps, 1e-12)

    def lam1(t, tmid):
        return 0.0 if tmid < 0.25 else math.cos(t - 0.25)

    fd = (oracles.rk4_tip(lam1, s + delta, eps, u_end=s, kinks=[0.25])
          - oracles.rk4_tip(lam1, s - delta, eps, u_end=s, kinks=[0.25])) / (2 * delta)
    assert abs(path.tip_variation - fd) < 1e-8


def test_flow_closed_forms():
    d = drivers.constant(0.0)
    g = lo.flow(d, 1j, 0.2, "forward", 1e-12)
    assert g.value == pytest.approx(1j * math.sqrt(0.2), abs=1e-10)
    h = lo.flow(d, 1j, 0.25, "backward", 1e-12)
    assert h.value == pytest.approx(1j * math.sqrt(2), abs=1e-10)
    # g_t(i) = sqrt(4t - 1) reaches the boundary exactly at t = 1/4
    assert abs(lo.flow(d, 1j, 0.25, "forward", 1e-12).value) < 1e-5
    with pytest.raises(SwallowedError):
        lo.flow(d, 1j, 0.3, "forward", 1e-12)


def test_flow_sine_against_rk4():
    g = lo.flow(drivers.sine(), 1 + 1j, 0.5, "forward", 1e-12).value
    assert abs(g - oracles.rk4_flow(math.sin, 1 + 1j, 0.5)) < 1e-11


def test_forward_backward_duality():
    d = drivers.sine(1.0, 2.0)
    z = 0.3 + 0.8j
    g = lo.flow(d, z, 1.0, "forward", 1e-11).value
    back = lo.flow(d.reverse(), g, 1.0, "backward", 1e-11).value
    assert abs(back - z) < 1e-9


def test_input_validation():
    d = drivers.sine()
    with pytest.raises(ValueError):
        lo.solve_tip(d, 0.5, 0.0)
    with pytest.raises(ValueError):
        lo.solve_tip(d, 0.5, 1.5)
    with pytest.raises(DriverDomainError):
        lo.solve_tip(d, 2.0, 0.1)
    with pytest.raises(ValueError):
        lo.flow(d, -1j, 0.5)
    with pytest.raises(ValueError):
        lo.flow(d, 1j, 0.5, "sideways")


def test_envelope_check_raises_on_bad_values():
    d = drivers.constant(0.0)
    grid = np.linspace(0, 1, 5)
    vals = 1j * np.sqrt(4 * grid ** 2 + 0.01)
    lo.check_envelope(d, 1.0, 0.1, grid, vals, 1e-10)
    with pytest.raises(InvariantViolation):
        lo.check_envelope(d, 1.0, 0.1, grid, vals * 1.2, 1e-10)
