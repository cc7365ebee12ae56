"""Base expansion of the curve at t = 0 and the comparison slit map.

The comparison curve is phi(2i*sqrt(t)) for the polynomial
phi(z) = z + sum_m b_m/2^m z^m.  Its driver lambda~(t) = phi_t(0) and the
capacity time change t(s) come from the time-Taylor table of
phi_t = g~_t o phi o g_t^{-1}, which evolves as

    d/dt phi_t(z) = 2 (phi_t'(0)^2 / (phi_t(z) - phi_t(0)) - phi_t'(z)/z).

Each b_m enters the quantity it controls affinely, so it is found from two
trial values.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import series as ser
from .drivers import Driver
from .errors import (SingularProbeError, TruncationError, UnsupportedOrderError,
                     ZeroDenominatorError)

ANALYTIC, RECURSION, FITTED = "analytic-formula", "recursion", "fitted"


@dataclass(frozen=True)
class ExpansionReport:
    """gamma(t) = 2i sqrt(t) + a_2 t + i a_3 t^{3/2} + a_4 t^2 + ..."""

    a: tuple
    order: int
    provenance: tuple

    def coefficient(self, m):
        if not 2 <= m <= self.order:
            raise KeyError(m)
        return self.a[m - 2]

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = 2j * np.sqrt(t)
        for m, am in enumerate(self.a, start=2):
            out = out + (1j if m % 2 else 1.0) * float(am) * t ** (m / 2)
        return out

    def to_json(self):
        return json.dumps({"a": [float(x) for x in self.a], "order": self.order,
                           "provenance": list(self.provenance)})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(tuple(obj["a"]), int(obj["order"]), tuple(obj["provenance"]))


def driver_derivatives(d: Driver, kmax: int):
    """lambda^{(k)}(0) for k = 1..kmax (right derivatives)."""
    return [d.one_sided(0.0, k, +1) for k in range(1, kmax + 1)]


def base_coefficients(d: Driver, order: int = 5) -> ExpansionReport:
    """a_2..a_order from the closed formulas (order <= 5)."""
    if order > 5:
        raise UnsupportedOrderError("closed formulas stop at a_5; use comparison_expansion")
    if order < 2:
        raise ValueError("order must be at least 2")
    l1 = d.one_sided(0.0, 1, +1)
    l2 = d.one_sided(0.0, 2, +1) if order >= 4 else 0.0
    return _closed_form(l1, l2, order)


def _closed_form(l1, l2, order):
    a = [2 * l1 / 3,
         -l1 ** 2 / 18,
         4 * l2 / 15 + l1 ** 3 / 135,
         -l2 * l1 / 15 + l1 ** 4 / 2160][:order - 1]
    return ExpansionReport(tuple(a), order, (ANALYTIC,) * len(a))


def base_coefficients_exact(l1, l2, order=5):
    """Closed formulas in exact rational arithmetic."""
    return _closed_form(Fraction(l1), Fraction(l2), order)


@dataclass
class SlitMapState:
    """phi and its evolution, truncated at z-degree ``z_degree`` and t-order ``t_order``.

    ``phi_t_coeffs[k][j]`` is the t^j Taylor coefficient of a_k(t), where
    phi_t(z) = sum_k a_k(t) z^k.  Entry (k, j) is exact when k + 2j <= z_degree.
    """

    b: list
    z_degree: int
    t_order: int
    phi_t_coeffs: list
    lambda_tilde: list = field(default_factory=list)
    t_of_s: list = field(default_factory=list)
    targets: list = field(default_factory=list)

    def lambda_derivative(self, k):
        """d^k lambda~/ds^k at s = 0 (capacity parametrization)."""
        if 2 * k > self.z_degree or k > self.t_order:
            raise TruncationError(f"lambda~ derivative {k} is beyond the exact range")
        lam_s = self.lambda_of_s()
        return math.factorial(k) * lam_s[k]

    def lambda_of_s(self):
        return ser.compose(self.lambda_tilde, self.t_of_s, self.t_order)

    def t_derivative(self, k):
        if k > self.t_order:
            raise TruncationError(f"t(s) derivative {k} is beyond the t-order")
        return math.factorial(k) * self.t_of_s[k]

    def to_json(self):
        return json.dumps({"b": [float(x) for x in self.b], "z_degree": self.z_degree,
                           "t_order": self.t_order,
                           "lambda_tilde": [float(x) for x in self.lambda_tilde],
                           "t_of_s": [float(x) for x in self.t_of_s],
                           "targets": [float(x) for x in self.targets]})


def c_k(k):
    """Leading constant in d/dt phi_t^{(k)}(0) = c_k phi_t^{(k+2)}(0) + ..."""
    return Fraction(-2 * (k + 3), (k + 2) * (k + 1))


def slit_map_state(b, z_degree=None, t_order=0, one=1.0):
    """Initial state for phi(z) = z + sum_{m>=2} b[m-2]/2^m z^m."""
    b = [one * x for x in b]
    K = z_degree if z_degree is not None else max(len(b) + 1, 1)
    if len(b) + 1 > K:
        raise TruncationError("z-degree below the degree of phi")
    zero = one - one
    col = [zero, one] + [b[m - 2] / 2 ** m if m - 2 < len(b) else zero for m in range(2, K + 1)]
    state = SlitMapState(list(b), K, 0, [[c] for c in col])
    _refresh(state)
    for _ in range(t_order):
        state = evolve_slit_map(state)
    return state


def _rhs(table, K, J):
    """t-series (order J) of each z-coefficient of -2 N(z)/D(z)."""
    zero = table[0][0] - table[0][0]
    a = [ser.trunc(table[k], J) for k in range(K + 1)]
    if a[1][0] == 0:
        raise ZeroDenominatorError("phi_t'(0) vanishes; the slit map is degenerate")
    # numerator N_k = sum_{i=0}^{k+1} (i+1) a_{i+1} a_{k+2-i}, denominator D_k = a_{k+1}
    N = []
    for k in range(K - 1):
        acc = [zero] * (J + 1)
        for i in range(k + 2):
            p = ser.mul(a[i + 1], a[k + 2 - i], J)
            acc = [x + (i + 1) * y for x, y in zip(acc, p)]
        N.append(acc)
    D = [a[k + 1] for k in range(K)]
    # z-division of bivariate series, z-degree K-2 (higher N_k need a_{>K})
    inv_d0 = ser.inv(D[0], J)
    Q = []
    for k in range(K - 1):
        acc = N[k]
        for j in range(1, k + 1):
            acc = ser.sub(acc, ser.mul(D[j], Q[k - j], J), J)
        Q.append(ser.mul(acc, inv_d0, J))
    return [[-2 * x for x in q] for q in Q] + [[zero] * (J + 1) for _ in range(2)]


def evolve_slit_map(state: SlitMapState, truncation: int | None = None) -> SlitMapState:
    """Extend the time-Taylor table of phi_t by one t-order.

    ``truncation`` is the z-degree used.  Extending to order J+1 needs the
    a_1 column J to be exact (2J + 1 <= truncation), which keeps t(s) exact
    through s^{J+1}.
    """
    K = state.z_degree if truncation is None else int(truncation)
    if K > state.z_degree:
        raise TruncationError("truncation above the z-degree of the state")
    J = state.t_order
    if 2 * J + 1 > K:
        raise TruncationError(f"t-order {J + 1} needs z-degree >= {2 * J + 1}")
    rhs = _rhs(state.phi_t_coeffs, K, J)
    table = [list(state.phi_t_coeffs[k][:J + 1]) + [rhs[k][J] / (J + 1)]
             for k in range(K + 1)]
    new = SlitMapState(list(state.b), K, J + 1, table, targets=list(state.targets))
    _refresh(new)
    return new


def _refresh(state):
    J = state.t_order
    a0 = [state.phi_t_coeffs[0][j] for j in range(J + 1)]
    a1 = [state.phi_t_coeffs[1][j] for j in range(J + 1)]
    # s(t) = int a_1^2 dt, so dt/ds = a_1^{-2}
    s_of_t = ser.integ(ser.mul(a1, a1, J), J, c0=a0[0] - a0[0])
    state.lambda_tilde = a0
    state.t_of_s = ser.revert(s_of_t, J) if J >= 1 else [a0[0] - a0[0]]


def _state_for(b, n, one):
    K = 4 * n + 1
    return slit_map_state(b + [one - one] * (K - 1 - len(b)), K, 2 * n + 1, one)


def build_comparison(d: Driver | None, n: int, *, derivatives=None, exact=False,
                     z_degree=None) -> SlitMapState:
    """Construct b_2..b_{4n+1}.

    Even b_{2k} makes d^k lambda~/ds^k(0) equal lambda^{(k)}(0) for k <= n and
    0 for k > n.  Odd b_{2k+1} makes d^{k+1}t/ds^{k+1}(0) = 0, so
    t(s) = s + O(s^{2n+2}).  ``derivatives`` overrides the driver's values;
    ``exact=True`` runs in rational arithmetic.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if derivatives is None:
        derivatives = driver_derivatives(d, n)
    if len(derivatives) < n:
        raise ValueError(f"need {n} driver derivatives at 0")
    one = Fraction(1) if exact else 1.0
    targets = [one * Fraction(x) if exact else float(x) for x in derivatives[:n]]
    targets += [one - one] * (n)
    b = []
    for m in range(2, 4 * n + 2):
        k = m // 2
        if m % 2 == 0:
            quantity = lambda st, k=k: st.lambda_derivative(k)  # noqa: E731
            target = targets[k - 1]
        else:
            quantity = lambda st, k=k: st.t_derivative(k + 1)  # noqa: E731
            target = one - one
        q0 = quantity(_state_for(b + [one - one], n, one))
        q1 = quantity(_state_for(b + [one], n, one))
        slope = q1 - q0
        if slope == 0 or (not exact and abs(slope) < 1e-14 * max(1.0, abs(q0))):
            raise SingularProbeError(f"b_{m} does not move its target quantity")
        b.append((target - q0) / slope)
    state = _state_for(b, n, one)
    if z_degree is not None and z_degree > state.z_degree:
        state = slit_map_state(state.b, z_degree, 2 * n + 1, one)
    state.targets = targets
    return state


def comparison_curve(state: SlitMapState, t):
    """gamma~(t) = 2i sqrt(t) + sum_m i^m b_m t^{m/2}."""
    t = np.asarray(t, dtype=float)
    out = 2j * np.sqrt(t)
    for m, bm in enumerate(state.b, start=2):
        out = out + (1j ** m) * float(bm) * t ** (m / 2)
    out = np.asarray(out, dtype=complex)
    return complex(out) if out.ndim == 0 else out


def comparison_curve_mp(state: SlitMapState, t, dps=50):
    """comparison_curve at working precision ``dps``; Fraction b stay exact."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        out = 2j * mp.sqrt(t)
        for m, bm in enumerate(state.b, start=2):
            if isinstance(bm, Fraction):
                bm = mp.mpf(bm.numerator) / bm.denominator
            out += mp.mpc(0, 1) ** m * mp.mpf(bm) * t ** (mp.mpf(m) / 2)
        return +out


def comparison_expansion(d: Driver, order: int, n: int | None = None) -> ExpansionReport:
    """a_2..a_order read off the comparison map: a_m = (-1)^{floor(m/2)} b_m.

    Valid for m <= 2n+1; n defaults to the smallest such value.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    n = max(1, math.ceil((order - 1) / 2)) if n is None else n
    if order > 2 * n + 1:
        raise UnsupportedOrderError(f"order {order} needs n >= {math.ceil((order - 1) / 2)}")
    state = build_comparison(d, n)
    a = tuple((-1) ** (m // 2) * state.b[m - 2] for m in range(2, order + 1))
    return ExpansionReport(a, order, (RECURSION,) * len(a))


def fit_coefficients(times, points, order=3, extra=2) -> ExpansionReport:
    """Least-squares a_2..a_order from curve samples after removing 2i sqrt(t).

    Even m are fitted to the real part and odd m to the imaginary part;
    ``extra`` further terms absorb the tail.
    """
    t = np.asarray(times, dtype=float)
    r = np.asarray(points, dtype=complex) - 2j * np.sqrt(t)
    top = order + 2 * extra
    out = {}
    for parity, part in ((0, r.real), (1, r.imag)):
        ms = [m for m in range(2, top + 1) if m % 2 == parity]
        cols = np.stack([t ** (m / 2) for m in ms], axis=1)
        norms = np.linalg.norm(cols, axis=0)
        coef, *_ = np.linalg.lstsq(cols / norms, part, rcond=None)
        out.update({m: c / nm for m, c, nm in zip(ms, coef, norms)})
    a = tuple(float(out[m]) for m in range(2, order + 1))
    return ExpansionReport(a, order, (FITTED,) * len(a))
