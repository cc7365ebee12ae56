import math

import numpy as np
import pytest

from loewnerlab import drivers, examples, trace
from loewnerlab.errors import InsufficientResolutionError


def test_vertical_slit_points():
    tr = trace.trace_curve(drivers.constant(0.0), [0.25, 1.0])
    np.testing.assert_allclose(tr.points, [1j, 2j], atol=1e-10)
    assert len(tr) == 2 and tr.tol == 1e-10


def test_offset_driver_shifts_curve():
    tr = trace.trace_curve(drivers.constant(0.7), [0.25])
    assert tr.points[0] == pytest.approx(0.7 + 1j, abs=1e-10)


def test_circle_points_on_circle():
    grid = np.linspace(0.001, 0.1, 25)
    tr = trace.trace_curve(drivers.sqrt_circle(), grid, 1e-10)
    assert np.max(np.abs(np.abs(tr.points - 0.5) - 0.5)) <= 1e-10


def test_linear_point_against_oracle():
    tr = trace.trace_curve(drivers.linear(), [1.0], 1e-10)
    assert abs(tr.points[0] - examples.linear_exact(1.0)) < 1e-10


def test_grid_validation():
    with pytest.raises(ValueError):
        trace.trace_curve(drivers.sine(), [0.0, 0.5])
    with pytest.raises(ValueError):
        trace.trace_curve(drivers.sine(), [0.5, 1.5])
    with pytest.raises(ValueError):
        trace.Trace(np.array([0.2, 0.1]), np.zeros(2, complex), 0.0, np.zeros(2))


def test_threaded_trace_matches_serial(monkeypatch):
    grid = np.linspace(0.05, 1, 12)
    serial = trace.trace_curve(drivers.sine(), grid, workers=1)
    monkeypatch.setenv(trace.THREADS_ENV, "3")
    threaded = trace.trace_curve(drivers.sine(), grid)
    np.testing.assert_array_equal(serial.points, threaded.points)


def test_first_derivative_vertical_slit():
    tr = trace.trace_curve(drivers.constant(0.0), [0.25], 1e-12)
    assert trace.first_derivative(tr, 0.25) == pytest.approx(2j, abs=1e-6)


def test_first_derivative_from_samples_only():
    ts = np.linspace(0.2, 0.3, 11)
    tr = trace.Trace(ts, 2j * np.sqrt(ts), 0.0, np.full(11, 1e-15))
    assert trace.first_derivative(tr, ts[5]) == pytest.approx(1j / math.sqrt(ts[5]), rel=1e-6)
    with pytest.raises(InsufficientResolutionError):
        trace.first_derivative(tr, ts[1])
    with pytest.raises(InsufficientResolutionError):
        trace.first_derivative(tr, 0.2512345)


def test_first_derivative_circle_near_base():
    # gamma = 2i sqrt(t) + 4t - 2i t^{3/2} + ...  =>  gamma' = i/sqrt(t) + 4 + O(sqrt t)
    t = 1e-6
    tr = trace.trace_curve(drivers.sqrt_circle(), [t], 1e-14)
    g1 = trace.tangent(drivers.sqrt_circle(), t, 1e-13)
    assert abs(g1 * math.sqrt(t) / 1j - 1) < 10 * math.sqrt(t)
    assert abs(trace.first_derivative(tr, t) - g1) < 1e-3


def test_first_derivative_example1_left_of_split():
    d = examples.example1_driver()
    tr = trace.trace_curve(d, [0.2499], 1e-12)
    assert trace.first_derivative(tr, 0.2499) == pytest.approx(2j, abs=1e-3)


def test_tangent_matches_finite_differences():
    d = drivers.sine()
    tr = trace.trace_curve(d, [0.5], 1e-12)
    assert abs(trace.tangent(d, 0.5, 1e-12) - trace.first_derivative(tr, 0.5)) < 1e-8


def test_second_derivative_vertical_slit():
    g2 = trace.second_derivative(drivers.constant(0.0), 0.25, 1e-12)
    assert g2 == pytest.approx(-4j, abs=1e-8)


def test_second_derivative_sine_against_fd():
    d = drivers.sine()
    g2 = trace.second_derivative(d, 0.5, 1e-12)
    fd = trace.fd_second_derivative(d, 0.5, 2e-3, 1e-13)
    assert abs(g2 - fd) < 1e-6


def test_second_derivative_example1_right_limit():
    d = examples.example1_driver()
    g2 = trace.second_derivative(d, 0.25 + 1e-6, 1e-12)
    assert abs(g2 - (-16 - 4j)) < 0.05


def test_curve_derivatives_with_offset():
    d = drivers.sine(1.0, 1.0, 0.3)
    g, g1, g2 = trace.curve_derivatives(d, 0.4, 1e-11)
    assert g == pytest.approx(trace.curve_point(d, 0.4, 1e-11), abs=1e-10)
    # derivatives do not depend on lambda(0)
    moved = d.shift(0.0)
    _, h1, h2 = trace.curve_derivatives(moved, 0.4, 1e-11)
    assert abs(g1 - h1) < 1e-9 and abs(g2 - h2) < 1e-7


@pytest.mark.parametrize("d,s,u,tol", [
    (drivers.constant(0.0), 0.25, 0.25, 1e-10),
    (drivers.sine(), 0.2, 0.3, 1e-10),
    (drivers.sqrt_circle(), 0.02, 0.05, 1e-10),
])
def test_concatenation(d, s, u, tol):
    assert trace.verify_concatenation(d, s, u, tol) <= 10 * tol


def test_reflection_symmetry():
    d = drivers.sine(0.8, 2.0)
    ts = np.linspace(0.1, 1, 6)
    a = trace.trace_curve(d, ts).points
    b = trace.trace_curve(d.reflect(), ts).points
    assert np.max(np.abs(b + np.conj(a))) <= 1e-9


def test_far_field_capacity_vertical_slit():
    # g_t(z) = sqrt(z^2 + 4t) = z + 2t/z - 2t^2/z^3 + ...
    r, c = trace.far_field_capacity(drivers.constant(0.0), 1.0, 100j)
    assert c == pytest.approx(2 / 100, rel=1e-3)
