"""Acceptance criteria 1-14, each at its stated tolerance.

Every criterion is a function returning (ok, detail).  Under pytest each one
is a test that records a PASS/FAIL line, printed in the terminal summary by
conftest.py.  ``python3 tests/test_acceptance.py`` prints the same lines.
"""
import math
import time

import numpy as np
import pytest

from loewnerlab import drivers, examples, expansion, loewner_ode, regularity, trace
from loewnerlab.errors import InvariantViolation

RESULTS = {}


def acc_vertical_slit():
    grid = np.linspace(math.sqrt(1e-4), 1.0, 100) ** 2
    grid[0], grid[-1] = 1e-4, 1.0
    tr = trace.trace_curve(drivers.constant(0.0), grid, 1e-10)
    err = np.max(np.abs(tr.points - 2j * np.sqrt(grid)))
    return err <= 1e-8, f"max|gamma - 2i sqrt t| = {err:.2e} (<= 1e-8)"


def acc_circle_geometry():
    d = drivers.sqrt_circle(1.5, 8.0)
    grid = np.linspace(1e-3, 0.1, 100)
    tr = trace.trace_curve(d, grid, 1e-10)
    err = np.max(np.abs(np.abs(tr.points - 0.5) - 0.5))
    return err <= 1e-5, f"max||gamma - 1/2| - 1/2| = {err:.2e} (<= 1e-5)"


def acc_circle_coefficients():
    d = drivers.sqrt_circle(1.5, 8.0)
    grid = np.geomspace(1e-6, 1e-3, 60)
    tr = trace.trace_curve(d, grid, 1e-13)
    fit = expansion.fit_coefficients(grid, tr.points, order=3)
    closed = expansion.base_coefficients(d, 3)
    a2, a3 = fit.coefficient(2), fit.coefficient(3)
    ok = (abs(a2 - 4) <= 1e-3 and abs(a3 + 2) <= 1e-2
          and closed.coefficient(2) == 4.0 and closed.coefficient(3) == -2.0)
    return ok, (f"fitted a2 = {a2:.6f}, a3 = {a3:.5f}; closed form "
                f"({closed.coefficient(2):g}, {closed.coefficient(3):g})")


def acc_second_derivative():
    d = drivers.sine()
    tol = 1e-11
    pts = np.linspace(0.1, 0.9, 10)
    tr = trace.trace_curve(d, pts, tol)
    worst = 0.0
    for t in pts:
        # gamma' ~ t^(-1/2) near 0, so the outer step must shrink with t
        H = t / 50
        g1 = [trace.first_derivative(tr, t + k * H) for k in (-2, -1, 1, 2)]
        fd = (g1[0] - 8 * g1[1] + 8 * g1[2] - g1[3]) / (12 * H)
        worst = max(worst, abs(trace.second_derivative(d, t, tol) - fd))
    return worst <= 1e-5, f"max|gamma'' - FD(gamma')| = {worst:.2e} (<= 1e-5)"


def _envelope_violations(d, s, eps, tol):
    path = loewner_ode.solve_tip(d, s, eps, tol, check=False)
    u = path.grid ** 2
    y, x = path.values.imag, path.values.real
    slack = 10 * tol
    return int(np.sum(np.diff(y) <= -slack) + np.sum(y < np.sqrt(3 * u + eps ** 2) - slack)
               + np.sum(y > np.sqrt(4 * u + eps ** 2) + slack)
               + np.sum(np.abs(x) > np.sqrt(u) + slack))


def acc_envelope():
    # the bounds are proved for ||lambda||_{1/2} <= 1; the circle driver has
    # lambda'(0) = 6, so its s range stops where that norm reaches 1
    tol = 1e-10
    cases = [drivers.constant(0.0), drivers.linear(), drivers.sine(),
             drivers.sqrt_circle(1.5, 8.0)]
    eps_grid = [1e-4, 1e-3, 1e-2, 0.1, 1.0]
    bad = 0
    total = 0
    for d in cases:
        smax = d.horizon
        while d.holder_half_norm(0.0, smax) > 1.0:
            smax *= 0.95
        for s in np.linspace(smax / 20, smax, 20):
            for eps in eps_grid:
                bad += _envelope_violations(d, float(s), eps, tol)
                total += 1
    return bad == 0, f"{bad} violations over {total} (s, eps) paths"


def acc_eps_lipschitz():
    d = drivers.sine()
    rng = np.random.default_rng(11)
    tol1 = tol2 = 1e-10
    worst = -np.inf
    for _ in range(100):
        s = rng.uniform(0.01, 1.0)
        e1, e2 = rng.uniform(1e-4, 1.0, size=2)
        f1 = loewner_ode.solve_tip(d, s, e1, tol1, check=False).tip
        f2 = loewner_ode.solve_tip(d, s, e2, tol2, check=False).tip
        worst = max(worst, abs(f1 - f2) - abs(e1 - e2) - 10 * (tol1 + tol2))
    return worst <= 0, f"max excess over |e1-e2| + 10(tol1+tol2) = {worst:.3e} (<= 0)"


def acc_concatenation():
    d = drivers.sine()
    tol = 1e-10
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        s, u = rng.uniform(0.05, 0.5, size=2)
        worst = max(worst, trace.verify_concatenation(d, s, u, tol))
    return worst <= 10 * tol, f"max residual = {worst:.2e} (<= {10 * tol:.0e})"


def acc_example1_jump():
    lim = examples.marshall_limits()
    left, right = lim["d2_left"], lim["d2_right"]
    ok_oracle = (abs(left.real) <= 0.05 and abs(left.imag + 4) <= 0.05
                 and abs(right.real + 16) <= 0.05 and abs(right.imag + 4) <= 0.05)
    d = examples.example1_driver()
    fd_left = trace.fd_second_derivative(d, 0.25, 1e-3, 1e-12, side=-1)
    fd_right = trace.fd_second_derivative(d, 0.25, 1e-3, 1e-12, side=+1)
    ok_traced = abs(fd_left - left) <= 0.1 and abs(fd_right - right) <= 0.1
    return ok_oracle and ok_traced, (
        f"oracle left {left:.5f}, right {right:.5f}; traced left {fd_left:.4f}, "
        f"right {fd_right:.4f}")


def acc_example1_class():
    d = examples.example1_driver()
    quotients = []
    alpha = None
    for n in (8193, 32769):
        ts = np.linspace(0.25, 0.3, n)
        lam1 = d.sample(ts, 1)
        dt = ts[1] - ts[0]
        if alpha is None:
            alpha = regularity.holder_exponent(lam1, 0, dt=dt).holder_estimate
        quotients.append(regularity.holder_quotient(lam1, 0.5, dt=dt))
    stable = abs(quotients[1] - quotients[0]) <= 0.01 * quotients[0]
    ok = 0.45 <= alpha <= 0.55 and np.isfinite(quotients[1]) and stable
    return ok, (f"alpha = {alpha:.4f}; Hoelder-1/2 quotient {quotients[0]:.4f} -> "
                f"{quotients[1]:.4f} under 4x refinement")


def acc_example2_class():
    d, _ = examples.circle_example()
    grid = np.linspace(0.2, 0.3, 16385)
    tr = trace.trace_curve(d, grid, 1e-12, derivatives=True)
    rep = regularity.curve_regularity(tr, 1)
    alpha = rep.holder_estimate
    dt = grid[1] - grid[0]
    zyg = []
    for m in (4097, 8193, 16385):
        step = (len(grid) - 1) // (m - 1)
        sup, _ = regularity.zygmund_seminorm(tr.d1[::step], dt=dt * step, alpha=0.5)
        zyg.append(sup)
    bounded = np.all(np.isfinite(zyg)) and max(zyg) <= 1.05 * min(zyg)
    return 0.45 <= alpha <= 0.55 and bounded, (
        f"alpha(gamma') = {alpha:.4f}; second-difference/delta^(1/2) sup "
        + ", ".join(f"{z:.3f}" for z in zyg) + " as the grid refines")


def acc_theorem_desk():
    d = drivers.monomial(1.0, 0.5, 2.75)
    grid = np.linspace(0.45, 0.55, 16385)
    tr = trace.trace_curve(d, grid, 1e-12, derivatives=True)
    rep = regularity.curve_regularity(tr, 3)
    return 3.1 <= rep.total <= 3.4, f"3 + alpha = {rep.total:.4f} (in [3.1, 3.4])"


def acc_comparison_slope():
    state = expansion.build_comparison(drivers.linear(), 2, exact=True)
    ss = np.geomspace(1e-6, 1e-2, 13)
    errs = [float(abs(examples.linear_exact(s, 60, as_mp=True)
                      - expansion.comparison_curve_mp(state, s, 60))) for s in ss]
    slope = np.polyfit(np.log(ss), np.log(errs), 1)[0]
    return slope >= 2.85, f"log-log slope = {slope:.3f} (>= 2.85)"


def acc_recursion():
    state = expansion.build_comparison(drivers.linear(), 2)
    l1, l2 = state.lambda_derivative(1), state.lambda_derivative(2)
    tail = max(abs(state.t_of_s[k]) for k in range(2, 6))
    ok = abs(l1 - 1) <= 1e-10 and abs(l2) <= 1e-10 and tail <= 1e-10 \
        and abs(state.t_of_s[1] - 1) <= 1e-12
    return ok, f"lambda~' = {l1:.3e}, lambda~'' = {l2:.1e}, max|t_2..t_5| = {tail:.1e}"


def acc_scaling():
    d = drivers.sine()
    r = 2.0
    big = d.scale(r)
    tol = 1e-10
    ts = np.linspace(0.05, 1.0, 20)
    a = trace.trace_curve(big, r * r * ts, tol).points
    b = r * trace.trace_curve(d, ts, tol).points
    err = np.max(np.abs(a - b))
    return err <= 10 * tol, f"max|gamma_r(r^2 t) - r gamma(t)| = {err:.2e} (<= {10 * tol:.0e})"


CRITERIA = [
    (1, "vertical slit exactness", acc_vertical_slit),
    (2, "circle geometry", acc_circle_geometry),
    (3, "circle expansion coefficients", acc_circle_coefficients),
    (4, "second-derivative formula vs FD", acc_second_derivative),
    (5, "tip ODE envelope", acc_envelope),
    (6, "epsilon-Lipschitz", acc_eps_lipschitz),
    (7, "concatenation residual", acc_concatenation),
    (8, "example 1 gamma'' jump", acc_example1_jump),
    (9, "example 1 driver class", acc_example1_class),
    (10, "example 2 curve class", acc_example2_class),
    (11, "regularity gain at desk scale", acc_theorem_desk),
    (12, "comparison-curve remainder", acc_comparison_slope),
    (13, "recursion self-consistency", acc_recursion),
    (14, "scaling", acc_scaling),
]
SLOW = {10, 11}


def run(number, name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # reported as a failure line, re-raised by the test
        RESULTS[number] = f"CRITERION {number:2d} FAIL {name}: {type(exc).__name__}: {exc}"
        raise
    line = f"CRITERION {number:2d} {'PASS' if ok else 'FAIL'} {name}: {detail} " \
           f"[{time.perf_counter() - t0:.1f}s]"
    RESULTS[number] = line
    return ok, line


@pytest.mark.parametrize(
    "number,name,fn",
    [pytest.param(*c, marks=pytest.mark.slow) if c[0] in SLOW else c for c in CRITERIA],
    ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, fn):
    ok, line = run(number, name, fn)
    print(line)
    assert ok, line


if __name__ == "__main__":
    for c in CRITERIA:
        try:
            print(run(*c)[1], flush=True)
        except Exception:
            print(RESULTS[c[0]], flush=True)
