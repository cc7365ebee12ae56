"""Regularized tip ODE, its first variation, and the forward/backward flows.

The tip ODE ``f'(u) = -2/f(u) + lambda'(s-u)``, ``f(0) = i*eps`` is integrated
in ``v = sqrt(u)``.  In that variable the eps -> 0 limit ``f ~ 2i*sqrt(u)`` is
linear, so the embedded Runge-Kutta pair keeps its full order at the base.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .drivers import Driver
from .errors import (DriverDomainError, InvariantViolation, NumericalError,
                     StepCollapseError, SwallowedError, UnsupportedOrderError)

log = logging.getLogger(__name__)

# Fraction of the user tolerance given to the integrator; the rest is the
# eps budget (|f(eps) - f(0)| <= eps).
INTEGRATOR_SHARE = 0.05
FLOW_GUARD = 1e-9


@dataclass(frozen=True)
class TipPath:
    """Solution u -> f(u, s, eps) sampled on accepted steps, u = grid**2."""

    s: float
    epsilon: float
    grid: np.ndarray
    values: np.ndarray
    variation: np.ndarray | None
    integral: complex | None
    tolerance: float
    steps: int
    rejected: int
    envelope_checked: bool = False

    @property
    def u(self):
        return self.grid ** 2

    @property
    def tip(self):
        return complex(self.values[-1])

    @property
    def tip_variation(self):
        return None if self.variation is None else complex(self.variation[-1])


@dataclass(frozen=True)
class FlowState:
    z0: complex
    t: float
    value: complex
    direction: str
    steps: int = 0


def _nodes(d: Driver, s: float):
    """Mandatory v-nodes at the driver kinks inside (0, s)."""
    return [math.sqrt(s - b) for b in sorted(d.kinks, reverse=True) if 0.0 < b < s]


def _lam1_along(d: Driver, s, u):
    # lambda'(s - u), left limits so that a node carries the value used after it
    return np.array([d.one_sided(max(s - ui, 0.0), 1, -1) for ui in np.atleast_1d(u)])


def _validate(d: Driver, s: float, epsilon: float, tol: float):
    if d.is_tabulated:
        raise UnsupportedOrderError("tabulated drivers are accepted only by the regularity "
                                    "module")
    if not (0.0 < s <= d.horizon):
        raise DriverDomainError(f"s={s!r} outside (0, {d.horizon!r}]")
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")


def _raise_status(status, what):
    if status == _kernel.COLLAPSE:
        raise StepCollapseError(f"{what}: adaptive step size collapsed")
    if status == _kernel.MAXSTEPS:
        raise StepCollapseError(f"{what}: step budget exhausted")
    if status == _kernel.SWALLOWED:
        raise SwallowedError(f"{what}: point swallowed by the hull")


def _solve(d, s, epsilon, tol, mode, record=True, check=True, backend=None):
    _validate(d, s, epsilon, tol)
    node_v = _nodes(d, s)
    w0 = d.one_sided(s, 1, -1) if mode == 1 else 0.0
    rtol = atol = tol
    status, vs, fs, ws, f_end, w_end, i_end, nacc, nrej = _kernel.tip_solve(
        d, s, epsilon, rtol, atol, mode, record, node_v, w0, backend=backend)
    _raise_status(status, f"tip ODE at s={s}")
    if not math.isfinite(abs(f_end)) or (mode == 1 and not math.isfinite(abs(i_end))):
        raise NumericalError(f"non-finite tip solution at s={s}")
    checked = False
    x_end = w_end - d.one_sided(0.0, 1, +1) if mode == 1 else None
    if record:
        vs = np.asarray(vs, dtype=float)
        fs = np.asarray(fs, dtype=complex)
        xs = None
        if mode == 1:
            xs = np.asarray(ws, dtype=complex) - _lam1_along(d, s, vs ** 2)
            xs[-1] = x_end
        if check:
            checked = check_envelope(d, s, epsilon, vs, fs, tol)
    else:
        vs = np.array([math.sqrt(s)])
        fs = np.array([f_end])
        xs = np.array([x_end]) if mode == 1 else None
    return TipPath(s, epsilon, vs, fs, xs, i_end if mode == 1 else None, tol, nacc, nrej,
                   checked)


def check_envelope(d, s, epsilon, grid, values, tol):
    """Assert monotone Im f and the sqrt(3u+eps^2) <= Im f <= sqrt(4u+eps^2),
    |Re f| <= sqrt(u) envelope.  Only enforced when the driver's sampled
    C^{1/2} norm on [0, s] is at most 1; returns whether it was enforced."""
    slack = 10.0 * tol
    u = grid ** 2
    y, x = values.imag, values.real
    bad = []
    if np.any(np.diff(y) <= -slack):
        bad.append("Im f not increasing")
    if np.any(y < np.sqrt(3 * u + epsilon ** 2) - slack):
        bad.append("Im f below sqrt(3u+eps^2)")
    if np.any(y > np.sqrt(4 * u + epsilon ** 2) + slack):
        bad.append("Im f above sqrt(4u+eps^2)")
    if np.any(np.abs(x) > np.sqrt(u) + slack):
        bad.append("|Re f| above sqrt(u)")
    if not bad:
        return d.holder_half_norm(0.0, s) <= 1.0
    if d.holder_half_norm(0.0, s) <= 1.0:
        raise InvariantViolation(f"s={s}, eps={epsilon}: " + "; ".join(bad))
    log.warning("envelope bounds fail at s=%g eps=%g but ||lambda||_1/2 > 1 on [0, s]: %s",
                s, epsilon, "; ".join(bad))
    return False


def solve_tip(d: Driver, s: float, epsilon: float, tol: float = 1e-10, *, check=True,
              backend=None) -> TipPath:
    """Solve the tip ODE with f(0) = i*eps on u in [0, s], local error <= tol."""
    return _solve(d, s, epsilon, tol, 0, check=check, backend=backend)


def solve_tip_with_variation(d: Driver, s: float, epsilon: float, tol: float = 1e-10, *,
                             check=True, backend=None) -> TipPath:
    """Tip ODE together with X = d_s f, X' = 2X/f^2 + lambda''(s-u), X(0) = 0.

    The kernel integrates W = X + lambda'(s-u), which obeys
    W' = 2(W - lambda'(s-u))/f^2 and so never evaluates lamb''.  The same steps
    accumulate ``int_0^s X/f^3 du``.  Where lambda' jumps by J at a kink, X
    jumps by +J while W stays continuous.
    """
    return _solve(d, s, epsilon, tol, 1, check=check, backend=backend)


def tip_limit(d: Driver, s: float, tol: float = 1e-10, *, backend=None) -> complex:
    """f(s, s) = gamma(0, s), the tip of the curve of lambda - lambda(0), within tol.

    Uses |f(u,s,e1) - f(u,s,e2)| <= |e1 - e2|: eps = tol/2 costs at most tol/2,
    and the integrator gets the remaining budget.
    """
    path = _solve(d, s, 0.5 * tol, INTEGRATOR_SHARE * tol, 0, record=False, check=False,
                  backend=backend)
    return path.tip


def tip_and_variation(d: Driver, s: float, tol: float = 1e-10, *, backend=None):
    """(f(s,s), d_s f(s,s), int_0^s d_s f / f^3 du) at eps = tol/2."""
    path = _solve(d, s, 0.5 * tol, INTEGRATOR_SHARE * tol, 1, record=False, check=False,
                  backend=backend)
    return path.tip, path.tip_variation, path.integral


def flow(d: Driver, z: complex, t: float, direction: str = "forward",
         tol: float = 1e-10, *, backend=None) -> FlowState:
    """Integrate g_t (forward, driver lambda) or h_t (backward, driver xi = d)."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("flow needs a seed point in the upper half-plane")
    if not (0.0 <= t <= d.horizon):
        raise DriverDomainError(f"t={t!r} outside [0, {d.horizon!r}]")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    if t == 0.0:
        return FlowState(z, 0.0, z, direction)
    sign = 1 if direction == "forward" else -1
    rtol = atol = INTEGRATOR_SHARE * tol
    status, value, nacc, nrej, mind = _kernel.flow_solve(
        d, z, float(t), sign, rtol, atol, FLOW_GUARD, list(d.kinks), backend=backend)
    _raise_status(status, f"{direction} flow from z={z}")
    return FlowState(z, float(t), value, direction, nacc)
