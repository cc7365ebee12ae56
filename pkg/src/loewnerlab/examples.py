"""Closed-form golden examples: the Marshall slit and the circle-arc example.

Both curves start with the vertical slit 2i*sqrt(t) on [0, 1/4] and then turn.
Their curves are given in closed form, so they check the solver without
running it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import drivers
from ._kernel import _pybase as pb

T_SPLIT = 0.25
CIRCLE_HORIZON = 0.35
EXAMPLE1_HORIZON = 0.40


@dataclass(frozen=True)
class MarshallExampleState:
    y: float
    c: float
    r1: float
    r2: float
    a_coef: float
    b_coef: float
    t: float
    lam: float
    gamma: complex

    def moebius_residuals(self):
        """(A + c*pi, B, D/A + 1 - 4t, lambda - L^{-1}(r2)) for L(z) = r1 + a/(z - b).

        All three vanish when L(z) = r1 + a/(z - b) gives the hydrodynamic
        normalization with capacity 2t.
        """
        c, r, a, b = self.c, self.r1, self.a_coef, self.b_coef
        d2 = 2 / r ** 3 - c / r ** 2
        d3 = -6 / r ** 4 + 2 * c / r ** 3
        d4 = 24 / r ** 5 - 6 * c / r ** 4
        A = a * a * d2 / 2
        B = a * a * b * d2 + a ** 3 * d3 / 6
        D = 1.5 * a * a * b * b * d2 + a ** 3 * b * d3 / 2 + a ** 4 * d4 / 24
        return A + c * math.pi, B, D / A + 1 - 4 * self.t, self.lam - b - a / (self.r2 - r)


def _params(y, ctx=math):
    sq = ctx.sqrt(1 + y)
    return y / sq, -sq, 1 / sq


def marshall_time(y):
    return 0.25 + pb.marshall_time(y)


def marshall_driver(y):
    """(t, lambda, lambda') at parameter y >= 0."""
    y = float(y)
    if y < 0:
        raise ValueError("y must be non-negative")
    if y == 0:
        return 0.25, 0.0, 0.0
    lam = -2 * math.sqrt(2 * math.pi) * y ** 1.5 / (3 * (2 + y) ** 1.5)
    lam1 = -2 * math.sqrt(2) * math.sqrt(y) * (2 + y) ** 1.5 / (math.sqrt(math.pi) * (y + 1))
    return marshall_time(y), lam, lam1


def _gamma(y, ctx):
    c, r1, r2 = _params(y, ctx)
    if ctx is mp:
        log_r1 = mp.log(-r1) + 1j * mp.pi
        log_r2 = mp.log(r2)
    else:
        log_r1 = complex(math.log(-r1), math.pi)
        log_r2 = math.log(r2)
    f1r1 = r1 + 1 / r1 + c * log_r1
    f1r2 = r2 + 1 / r2 + c * log_r2
    g = c * ctx.pi / (f1r2 - f1r1)
    if ctx is mp:
        return 1j * mp.sqrt(g + 1)
    import cmath
    return 1j * cmath.sqrt(g + 1)


def marshall_curve(y) -> complex:
    """gamma(t(y)) for the Marshall slit; y=0 gives the junction point i.

    The logarithm takes the branch log r1 = log|r1| + i*pi (r1 < 0) and the
    square root is principal; this is the branch continuous from gamma = i
    as y -> 0+.
    """
    y = float(y)
    if y < 0:
        raise ValueError("y must be non-negative")
    if y == 0:
        return 1j
    return complex(_gamma(y, math))


def marshall_state(y) -> MarshallExampleState:
    y = float(y)
    if y <= 0:
        raise ValueError("y must be positive")
    c, r1, r2 = _params(y)
    root = math.sqrt(-2 * math.pi * c * r1)
    a = r1 * root / math.sqrt(2 - c * r1)
    # B = 0 forces b = -a f1'''(r1) / (6 f1''(r1)), which is this expression
    b = (3 - c * r1) * root / (3 * (2 - c * r1) ** 1.5)
    t, lam, _ = marshall_driver(y)
    return MarshallExampleState(y, c, r1, r2, a, b, t, lam, marshall_curve(y))


def marshall_y(t):
    """Invert t(y) for t in [1/4, 1/4 + pi/12)."""
    return pb.marshall_y(float(t) - 0.25)


def marshall_curve_at(t):
    """Exact curve of the first example at capacity time t."""
    t = float(t)
    if t <= T_SPLIT:
        return 2j * math.sqrt(t)
    return marshall_curve(marshall_y(t))


def marshall_limits(dps=50):
    """One-sided limits of gamma' and gamma'' at t = 1/4 from the closed forms.

    On the right, gamma and t are analytic in y at y = 0 with t'(0) > 0, so
    the limits are chain-rule derivatives taken with forward differences in
    extended precision.  On the left the curve is 2i*sqrt(t).
    """
    with mp.workdps(dps):
        gam = lambda y: _gamma(y, mp)  # noqa: E731
        tt = lambda y: mp.mpf(1) / 4 + mp.pi * y * (y * y + 6 * y + 6) / (12 * (2 + y) ** 3)  # noqa: E731
        y0 = mp.mpf(0)
        g1 = mp.diff(gam, y0, 1, direction=1)
        g2 = mp.diff(gam, y0, 2, direction=1)
        t1 = mp.diff(tt, y0, 1)
        t2 = mp.diff(tt, y0, 2)
        right1 = g1 / t1
        right2 = (g2 * t1 - g1 * t2) / t1 ** 3
        left1 = 1j / mp.sqrt(mp.mpf(1) / 4)
        left2 = -0.5j / mp.mpf(0.25) ** 1.5
        return {"d1_left": complex(left1), "d1_right": complex(right1),
                "d2_left": complex(left2), "d2_right": complex(right2)}


def example1_driver(horizon=EXAMPLE1_HORIZON):
    """lambda = 0 on [0, 1/4], then the Marshall tail."""
    tail = drivers.marshall_tail(horizon - T_SPLIT)
    d = drivers.piecewise([drivers.constant(0.0, T_SPLIT), tail], [0.0, T_SPLIT, horizon])
    return _relabel(d, "example1")


def circle_hat(s):
    """Capacity-parametrized half-circle |z - 1/2| = 1/2 traced from 0.

    Generated by 3/2 - 3/2*sqrt(1 - 8s); with q = 1 - sqrt(1 - 8s) the point
    is q + i*sqrt(q(1 - q)).
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s >= 0.125):
        raise ValueError("circle parametrization needs 0 <= s < 1/8")
    q = 1.0 - np.sqrt(1.0 - 8.0 * s)
    out = q + 1j * np.sqrt(q * (1.0 - q))
    return complex(out) if out.ndim == 0 else out


def slit_map(z):
    """S(z) = sqrt(z^2 - 1), root in the closed upper half-plane."""
    r = np.sqrt(np.asarray(z, dtype=complex) ** 2 - 1)
    r = np.where(r.imag < 0, -r, r)
    return complex(r) if r.ndim == 0 else r


def circle_curve(t):
    t = np.asarray(t, dtype=float)
    early = t <= T_SPLIT
    out = np.empty(t.shape, dtype=complex)
    out[early] = 2j * np.sqrt(t[early])
    if np.any(~early):
        out[~early] = slit_map(circle_hat(t[~early] - T_SPLIT))
    return complex(out) if out.ndim == 0 else out


def circle_example(horizon=CIRCLE_HORIZON):
    """(driver, exact curve) for the vertical slit followed by a circular arc."""
    arc = drivers.sqrt_circle(1.5, 8.0, horizon=horizon - T_SPLIT)
    d = drivers.piecewise([drivers.constant(0.0, T_SPLIT), arc], [0.0, T_SPLIT, horizon])
    return _relabel(d, "example2"), circle_curve


def circle_residual(z):
    """Distance of S^{-1}(z) = sqrt(z^2 + 1) from the circle |w - 1/2| = 1/2."""
    w = np.sqrt(np.asarray(z, dtype=complex) ** 2 + 1)
    w = np.where(w.real < 0, -w, w)
    return np.abs(np.abs(w - 0.5) - 0.5)


def linear_exact(s, dps=30, as_mp=False):
    """Tip of the curve driven by lambda(t) = t at time s.

    For this driver f(s, s) = F solves s = F + 2 log(1 - F/2) exactly, which
    follows by separating variables in the tip ODE with lambda' = 1.
    ``as_mp`` returns the mpc root at the working precision.
    """
    with mp.workdps(dps):
        s = mp.mpf(s)
        root = mp.findroot(lambda f: f + 2 * mp.log(1 - f / 2) - s, 2j * mp.sqrt(s))
        return +root if as_mp else complex(root)


def _relabel(d, label):
    from dataclasses import replace
    return replace(d, label=label)
