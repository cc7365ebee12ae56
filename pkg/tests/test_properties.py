"""Property-based checks of the structural invariants."""
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from loewnerlab import drivers, expansion, io, loewner_ode as lo, regularity, series, trace

SETTINGS = settings(max_examples=25, deadline=None)
amp = st.floats(-1.0, 1.0)
s_val = st.floats(0.02, 1.0)
eps_val = st.floats(1e-3, 1.0)


def small_driver(kind, a, w):
    # sampled Hoelder-1/2 norm stays below 1 on [0, 1]
    if kind == "linear":
        return drivers.linear(a)
    return drivers.sine(a, min(abs(w), 1.0) or 0.5)


driver_st = st.builds(small_driver, st.sampled_from(["linear", "sine"]), amp, amp)


@SETTINGS
@given(driver_st, s_val, eps_val)
def test_envelope_bounds(d, s, eps):
    path = lo.solve_tip(d, s, eps, 1e-10, check=False)
    u, y, x = path.u, path.values.imag, path.values.real
    slack = 1e-9
    assert np.all(np.diff(y) > -slack)
    assert np.all(y >= np.sqrt(3 * u + eps ** 2) - slack)
    assert np.all(y <= np.sqrt(4 * u + eps ** 2) + slack)
    assert np.all(np.abs(x) <= np.sqrt(u) + slack)


@SETTINGS
@given(driver_st, s_val, eps_val, eps_val)
def test_eps_lipschitz(d, s, e1, e2):
    f1 = lo.solve_tip(d, s, e1, 1e-10, check=False).tip
    f2 = lo.solve_tip(d, s, e2, 1e-10, check=False).tip
    assert abs(f1 - f2) <= abs(e1 - e2) + 2e-9


@SETTINGS
@given(driver_st, st.floats(0.05, 1.0))
def test_reflection(d, t):
    a = lo.tip_limit(d, t)
    b = lo.tip_limit(d.reflect(), t)
    assert abs(b + a.conjugate()) <= 1e-9


@SETTINGS
@given(driver_st, st.floats(0.3, 3.0), st.floats(0.05, 1.0))
def test_scaling(d, r, t):
    a = lo.tip_limit(d.scale(r), r * r * t)
    assert abs(a - r * lo.tip_limit(d, t)) <= 10 * 1e-10 * max(1.0, r)


@SETTINGS
@given(st.floats(0.05, 0.5), st.floats(0.05, 0.45), amp)
def test_concatenation(s, u, a):
    d = drivers.sine(a)
    assert trace.verify_concatenation(d, s, u, 1e-10) <= 1e-9


@SETTINGS
@given(st.floats(0.0, 0.4), st.floats(0.0, 0.4), st.floats(0.0, 0.2))
def test_shift_composes(a, b, u):
    d = drivers.sine(0.7, 2.0)
    lhs = d.shift(a).shift(b).eval(u)
    rhs = d.shift(a + b).eval(u)
    assert abs(lhs - rhs) <= 1e-14


@SETTINGS
@given(st.floats(0.05, 0.95), amp, amp)
def test_piecewise_continuity(edge, m1, m2):
    d = drivers.piecewise([drivers.linear(m1), drivers.sine(m2)], [0.0, edge, 1.0])
    left = d.one_sided(edge, 1, -1)
    assert abs(d.eval(edge) - m1 * edge) <= 1e-14
    assert abs(d.eval(min(edge + 1e-9, 1.0)) - d.eval(edge)) <= 1e-8
    assert left == m1


fractions = st.fractions(min_value=-3, max_value=3, max_denominator=20)


@settings(max_examples=15, deadline=None)
@given(fractions, fractions)
def test_recursion_matches_closed_formulas(l1, l2):
    state = expansion.build_comparison(None, 2, derivatives=[l1, l2], exact=True)
    rec = tuple((-1) ** (m // 2) * state.b[m - 2] for m in range(2, 6))
    assert rec == expansion.base_coefficients_exact(l1, l2, 5).a
    assert state.t_of_s[1] == 1 and all(c == 0 for c in state.t_of_s[2:6])


@SETTINGS
@given(st.lists(fractions, min_size=4, max_size=6))
def test_series_revert_inverts_compose(tail):
    a = [Fraction(0), Fraction(1) + abs(tail[0])] + tail[1:]
    n = len(a) - 1
    b = series.revert(a, n)
    assert series.compose(a, b, n) == [0, 1] + [0] * (n - 1)


POWER_N = 8193


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 0.9), st.integers(POWER_N // 4, 3 * POWER_N // 4))
def test_holder_exponent_of_power(beta, node):
    # the singular point sits on a sample; between samples the finest levels
    # under-resolve the cusp and bias the slope upward
    ts = np.linspace(0, 1, POWER_N)
    rep = regularity.holder_exponent(np.abs(ts - ts[node]) ** beta, 0, dt=ts[1] - ts[0])
    assert abs(rep.holder_estimate - beta) <= 0.05


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 0.9), st.integers(1, 3))
def test_shrinking_window_does_not_raise_alpha(beta, cut):
    ts = np.linspace(0, 1, 65537)
    dt = ts[1] - ts[0]
    x = np.abs(ts - 0.5) ** beta
    full = regularity.holder_exponent(x, 0, dt=dt)
    small = regularity.holder_exponent(x, 0, (dt, full.window[1] / 2 ** cut), dt=dt)
    assert small.holder_estimate <= full.holder_estimate + (full.ci[1] - full.ci[0]) / 2 + 1e-9


@SETTINGS
@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=200))
def test_zygmund_dominated_by_lipschitz(values):
    x = np.array(values)
    zyg, _ = regularity.zygmund_seminorm(x)
    assert zyg <= 2 * regularity.lipschitz_quotient(x) * (1 + 1e-12) + 1e-9


@SETTINGS
@given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=2, max_size=20))
def test_csv_round_trip(values):
    n = len(values)
    tr = trace.Trace(np.arange(1, n + 1, dtype=float), np.array(values) + 1j * np.array(values[::-1]),
                     0.0, np.full(n, 1e-10))
    back = io.trace_from_csv(io.trace_to_csv(tr))
    np.testing.assert_array_equal(back.points, tr.points)
