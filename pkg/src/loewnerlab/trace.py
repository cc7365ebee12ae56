"""Capacity-parametrized curves, their derivatives and consistency checks."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import loewner_ode as lo
from .drivers import Driver
from .errors import (InsufficientResolutionError, NumericalError, QuadratureError,
                     SwallowedError)

THREADS_ENV = "LOEWNERLAB_THREADS"


@dataclass(frozen=True)
class Trace:
    """Samples gamma(t) = f(t, t) + lambda(0) with a per-point error bound."""

    times: np.ndarray
    points: np.ndarray
    driver_offset: float
    accuracy: np.ndarray
    driver: Driver | None = field(default=None, repr=False, compare=False)
    tol: float | None = None
    d1: np.ndarray | None = field(default=None, repr=False, compare=False)
    d2: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.times)

    def __post_init__(self):
        if len(self.times) != len(self.points) or len(self.times) != len(self.accuracy):
            raise ValueError("times, points and accuracy must have equal length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trace times must be strictly increasing")

    def is_uniform(self, rtol=1e-9):
        dt = np.diff(self.times)
        return len(dt) > 0 and np.all(np.abs(dt - dt.mean()) <= rtol * dt.mean())


def default_workers():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items, workers):
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    # the compiled kernel releases the GIL; results come back in grid order
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def trace_curve(d: Driver, grid, tol: float = 1e-10, *, workers=None, backend=None,
                derivatives=False) -> Trace:
    """gamma(t) for every t in ``grid`` (within (0, T]), each accurate to ``tol``.

    With ``derivatives=True`` the trace also carries gamma' and gamma'' from
    one tip solve with variation per point.
    """
    times = np.asarray(grid, dtype=float).ravel()
    if times.size == 0:
        raise ValueError("empty time grid")
    if np.any(times <= 0) or np.any(times > d.horizon):
        raise ValueError(f"trace grid must lie in (0, {d.horizon}]")
    offset = d.eval(0.0)
    acc = np.full(times.shape, float(tol))
    if derivatives:
        rows = _map(lambda t: curve_derivatives(d, float(t), tol), list(times), workers)
        pts, g1, g2 = (np.array(c, dtype=complex) for c in zip(*rows))
        return Trace(times, pts, offset, acc, d, float(tol), g1, g2)
    tips = _map(lambda t: lo.tip_limit(d, float(t), tol, backend=backend), list(times), workers)
    points = np.array(tips, dtype=complex) + offset
    return Trace(times, points, offset, acc, d, float(tol))


def curve_point(d: Driver, t: float, tol: float = 1e-10) -> complex:
    return lo.tip_limit(d, t, tol) + d.eval(0.0)


def tangent(d: Driver, s: float, tol: float = 1e-10) -> complex:
    """gamma'(s) = lambda'(0) - 2/f(s,s) + d_s f(s,s), exact up to the solver tolerance.

    Differentiating gamma(s) - lambda(0) = f(s, s) in s and using
    d_u f = -2/f + lambda'(s-u) at u = s gives this identity.
    """
    f, x, _ = lo.tip_and_variation(d, s, tol)
    return d.one_sided(0.0, 1, +1) - 2.0 / f + x


def curve_derivatives(d: Driver, s: float, tol: float = 1e-10):
    """(gamma(s), gamma'(s), gamma''(s)) from one tip solve with variation.

    gamma'' = 2 gamma'/f^2 - 4 gamma' int_0^s d_s f / f^3 du with f = f(s, s),
    the tip of the curve of lambda - lambda(0).
    """
    try:
        f, x, integral = lo.tip_and_variation(d, s, tol)
    except NumericalError as exc:
        raise QuadratureError(f"variation integral not resolved at s={s}: {exc}") from exc
    if not (np.isfinite(x) and np.isfinite(integral)):
        raise QuadratureError(f"non-finite variation integral at s={s}")
    g1 = d.one_sided(0.0, 1, +1) - 2.0 / f + x
    g2 = 2.0 * g1 / (f * f) - 4.0 * g1 * integral
    return f + d.eval(0.0), g1, g2


def second_derivative(d: Driver, s: float, tol: float = 1e-10) -> complex:
    return curve_derivatives(d, s, tol)[2]


def _stencil_step(tr: Trace, t, h):
    lo_t, hi_t = tr.times[0], tr.times[-1]
    if tr.driver is not None:
        lo_t, hi_t = 0.0, tr.driver.horizon
    room = min(t - lo_t, hi_t - t) / 2.0
    if room <= 0:
        raise InsufficientResolutionError(f"t={t} is not interior to the trace")
    if tr.driver is not None:
        for b in tr.driver.kinks:
            if b != t and abs(b - t) < 2 * h:
                h = min(h, abs(b - t) / 2.5)
    return min(h, room)


def first_derivative(tr: Trace, t: float, h: float | None = None) -> complex:
    """gamma'(t) by the 4th-order central difference.

    With a driver attached, the stencil t +- h, t +- 2h is traced afresh with
    h ~ accuracy^(1/5) * min(t, 1), which balances truncation against the
    point accuracy.  Without a driver the trace must hold t and two uniformly
    spaced neighbours on each side.
    """
    t = float(t)
    if tr.driver is None:
        return _first_from_samples(tr, t)
    acc = float(np.max(tr.accuracy))
    if h is None:
        h = max(acc, 1e-16) ** 0.2 * min(t, 1.0)
    h = _stencil_step(tr, t, h)
    if h <= 0 or (h ** 4 > 1e-2):
        raise InsufficientResolutionError(f"no usable stencil step at t={t}")
    d = tr.driver
    pts = [curve_point(d, t + k * h, tr.tol or acc) for k in (-2, -1, 1, 2)]
    return (pts[0] - 8 * pts[1] + 8 * pts[2] - pts[3]) / (12 * h)


def _first_from_samples(tr, t):
    i = int(np.searchsorted(tr.times, t))
    if i >= len(tr.times) or abs(tr.times[i] - t) > 1e-12 * max(1.0, t):
        raise InsufficientResolutionError(f"t={t} is not a sample of a driverless trace")
    if i < 2 or i + 2 >= len(tr.times):
        raise InsufficientResolutionError(f"t={t} too close to the end of the trace")
    ts = tr.times[i - 2:i + 3]
    dt = np.diff(ts)
    if np.any(np.abs(dt - dt[0]) > 1e-9 * dt[0]):
        raise InsufficientResolutionError(f"samples around t={t} are not uniform")
    p = tr.points[i - 2:i + 3]
    return (p[0] - 8 * p[1] + 8 * p[3] - p[4]) / (12 * dt[0])


def fd_second_derivative(d: Driver, t: float, h: float, tol: float = 1e-12, side=0):
    """Difference gamma'' from traced points.

    side=0 is the 4th-order central stencil; side=+1/-1 is the 2nd-order
    one-sided stencil (2, -5, 4, -1)/h^2 pointing right/left, for one-sided
    limits at a kink.
    """
    g = lambda x: curve_point(d, x, tol)  # noqa: E731
    if side == 0:
        p = [g(t + k * h) for k in (-2, -1, 0, 1, 2)]
        return (-p[0] + 16 * p[1] - 30 * p[2] + 16 * p[3] - p[4]) / (12 * h * h)
    sgn = 1 if side > 0 else -1
    p = [g(t + sgn * k * h) for k in range(4)]
    return (2 * p[0] - 5 * p[1] + 4 * p[2] - p[3]) / (h * h)


def verify_concatenation(d: Driver, s: float, u: float, tol: float = 1e-10,
                         eps_lift: float | None = None) -> float:
    """|g_s(gamma(s+u)) - lambda(s) - gamma_s(u)| with gamma_s the trace of shift(d, s).

    If the forward flow reports the point swallowed, the tip lifted by
    eps_lift (default sqrt(tol)) is flowed instead.
    """
    if not (0.0 < s < s + u <= d.horizon):
        raise ValueError("need 0 < s < s+u <= T")
    offset = d.eval(0.0)
    point = lo.tip_limit(d, s + u, tol) + offset
    try:
        mapped = lo.flow(d, point, s, "forward", tol).value
    except SwallowedError:
        eps = math.sqrt(tol) if eps_lift is None else eps_lift
        lifted = lo.solve_tip(d, s + u, eps, 0.05 * tol, check=False).tip + offset
        mapped = lo.flow(d, lifted, s, "forward", tol).value
    shifted = lo.tip_limit(d.shift(s), u, tol)
    return abs(mapped - d.eval(s) - shifted)


def far_field_capacity(d: Driver, t: float, z0: complex = 1e4j, tol: float = 1e-12):
    """(|g_t(z0) - z0 - 2t/z0|, same times |z0|^2) for the capacity check."""
    g = lo.flow(d, z0, t, "forward", tol).value
    r = abs(g - z0 - 2.0 * t / z0)
    return r, r * abs(z0) ** 2
