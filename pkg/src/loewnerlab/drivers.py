"""Closed-form driving functions with exact derivatives.

A :class:`Driver` is an immutable table of segments.  Each segment covers a
time interval and evaluates ``vs * base(ts*t + to) + vo`` for one of the base
kinds in :mod:`loewnerlab._kernel._pybase`.  Shifting, reflecting, scaling and
time reversal are affine maps of that table, so they stay exact and can be
handed to the compiled kernel unchanged.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from ._kernel import _pybase as pb
from ._kernel._pykernel import Encoded
from .errors import BreakpointError, DriverDomainError, UnsupportedOrderError

KIND_CODES = {
    "constant": pb.CONSTANT,
    "linear": pb.LINEAR,
    "monomial": pb.MONOMIAL,
    "sqrtcircle": pb.SQRTCIRCLE,
    "polynomial": pb.POLYNOMIAL,
    "sine": pb.SINE,
    "marshall": pb.MARSHALL,
}
MAX_ORDER = {"marshall": 2}


@dataclass(frozen=True)
class Smoothness:
    """Claimed class C^{n,alpha}([0,T]; M).  ``n is None`` means C^infinity."""

    n: int | None
    alpha: float
    M: float

    def __str__(self):
        n = "inf" if self.n is None else self.n
        return f"C^({n},{self.alpha:g}) M={self.M:.4g}"

    def order(self):
        return math.inf if self.n is None else self.n + self.alpha


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    kind: str
    params: tuple
    ts: float = 1.0
    to: float = 0.0
    vs: float = 1.0
    vo: float = 0.0

    def __call__(self, t, k=0):
        val = pb.base(KIND_CODES[self.kind], self.params, self.ts * t + self.to, k)
        if k == 0:
            return self.vs * val + self.vo
        return self.vs * self.ts ** k * val


@dataclass(frozen=True, eq=False)
class Driver:
    kind: str
    params: tuple
    horizon: float
    segments: tuple = ()
    smoothness: Smoothness = Smoothness(None, 1.0, 0.0)
    label: str = ""
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if not self.horizon > 0:
            raise DriverDomainError(f"horizon must be positive, got {self.horizon}")

    def __repr__(self):
        return f"Driver({self.label or self.kind}, T={self.horizon:g})"

    @property
    def is_tabulated(self):
        return self.kind == "tabulated"

    @cached_property
    def _los(self):
        return [seg.lo for seg in self.segments]

    @cached_property
    def kinks(self):
        """Interior times where some derivative may fail to be continuous."""
        return tuple(seg.lo for seg in self.segments[1:] if 0.0 < seg.lo < self.horizon)

    def _check(self, t):
        if not (0.0 <= t <= self.horizon):
            raise DriverDomainError(f"t={t!r} outside [0, {self.horizon!r}]")

    def _segment(self, t):
        j = bisect.bisect_right(self._los, t) - 1
        return min(max(j, 0), len(self.segments) - 1)

    def eval(self, t):
        """lambda(t)."""
        t = float(t)
        self._check(t)
        if self.is_tabulated:
            dt, values = self.samples
            return float(np.interp(t, np.arange(len(values)) * dt, values))
        return self.segments[self._segment(t)](t)

    __call__ = eval

    def derivative(self, t, k=1):
        """Exact k-th derivative of the closed form at ``t``."""
        t = float(t)
        k = int(k)
        if k < 1:
            raise ValueError("derivative order must be positive")
        if self.is_tabulated:
            raise UnsupportedOrderError("tabulated drivers carry no analytic derivatives")
        self._check(t)
        j = self._segment(t)
        seg = self.segments[j]
        if k > MAX_ORDER.get(seg.kind, k):
            raise UnsupportedOrderError(f"{seg.kind} supports derivatives up to "
                                        f"order {MAX_ORDER[seg.kind]}")
        right = seg(t, k)
        if j > 0 and t == seg.lo:
            left = self.segments[j - 1](t, k)
            if not (math.isfinite(left) and math.isfinite(right)) or \
                    abs(left - right) > 1e-10 * max(1.0, abs(left), abs(right)):
                raise BreakpointError(f"derivative of order {k} is discontinuous at t={t}")
        if not math.isfinite(right):
            raise BreakpointError(f"derivative of order {k} is unbounded at t={t}")
        return right

    def one_sided(self, t, k, side):
        """k-th derivative from the left (side=-1) or right (side=+1)."""
        j = bisect.bisect_left(self._los, t) - 1 if side < 0 else self._segment(t)
        j = min(max(j, 0), len(self.segments) - 1)
        return self.segments[j](float(t), k)

    def sample(self, ts, k=0):
        """Vectorised eval/derivative over an array of times."""
        ts = np.asarray(ts, dtype=float)
        if self.is_tabulated:
            if k:
                raise UnsupportedOrderError("tabulated drivers carry no analytic derivatives")
            dt, values = self.samples
            return np.interp(ts, np.arange(len(values)) * dt, values)
        out = np.empty(ts.shape)
        flat = ts.ravel()
        res = out.ravel()
        for i, t in enumerate(flat):
            if not (0.0 <= t <= self.horizon):
                raise DriverDomainError(f"t={t!r} outside [0, {self.horizon!r}]")
            res[i] = self.segments[self._segment(t)](t, k)
        return out

    def holder_half_norm(self, a=0.0, b=None, n=129):
        """Sampled sup |lambda(x) - lambda(y)| / sqrt|x - y| on [a, b]."""
        b = self.horizon if b is None else b
        ts = np.linspace(a, b, n)
        vals = self.sample(ts)
        dt = np.abs(ts[:, None] - ts[None, :])
        dv = np.abs(vals[:, None] - vals[None, :])
        mask = dt > 0
        return float(np.max(dv[mask] / np.sqrt(dt[mask]))) if mask.any() else 0.0

    def shift(self, s):
        """Time-shifted driver u -> lambda(u + s) - lambda(s) on [0, T - s]."""
        s = float(s)
        if not (0.0 <= s < self.horizon):
            raise DriverDomainError(f"shift {s!r} outside [0, {self.horizon!r})")
        return _affine(self, 1.0, s, 1.0, -self.eval(s), self.horizon - s,
                       f"shift({self.label},{s!r})")

    def reflect(self):
        """The driver -lambda, whose trace is the mirror image -conj(gamma)."""
        return _affine(self, 1.0, 0.0, -1.0, 0.0, self.horizon, f"-({self.label})")

    def scale(self, r):
        """t -> r * lambda(t / r^2), which generates t -> r * gamma(t / r^2)."""
        r = float(r)
        if r <= 0:
            raise ValueError("scale factor must be positive")
        return _affine(self, 1.0 / r ** 2, 0.0, r, 0.0, self.horizon * r * r,
                       f"scale({self.label},{r!r})")

    def reverse(self, T=None):
        """xi(t) = lambda(T - t), the driver of the backward flow inverting g_T."""
        T = self.horizon if T is None else float(T)
        if not (0.0 < T <= self.horizon):
            raise DriverDomainError(f"reversal time {T!r} outside (0, {self.horizon!r}]")
        return _affine(self, -1.0, T, 1.0, 0.0, T, f"reverse({self.label},{T!r})")

    @cached_property
    def encoded(self):
        """Segment table as contiguous arrays for the compiled kernel."""
        if self.is_tabulated:
            raise UnsupportedOrderError("tabulated drivers are accepted only by the "
                                        "regularity module")
        n = len(self.segments)
        lo = np.array([s.lo for s in self.segments], dtype=np.float64)
        hi = np.array([s.hi for s in self.segments], dtype=np.float64)
        kind = np.array([KIND_CODES[s.kind] for s in self.segments], dtype=np.int32)
        params = np.zeros((n, pb.NPARAMS), dtype=np.float64)
        for i, seg in enumerate(self.segments):
            params[i, :len(seg.params)] = seg.params
        aff = np.array([(s.ts, s.to, s.vs, s.vo) for s in self.segments], dtype=np.float64)
        return lo, hi, kind, params, aff

    @cached_property
    def py_encoded(self):
        return Encoded(*self.encoded)


def _affine(d, A, B, C, E, horizon, label):
    """Driver t -> C * d(A*t + B) + E restricted to [0, horizon]."""
    if d.is_tabulated:
        raise UnsupportedOrderError("affine maps of tabulated drivers are not supported")
    segs = []
    for seg in d.segments:
        a, b = (seg.lo - B) / A, (seg.hi - B) / A
        lo, hi = min(a, b), max(a, b)
        lo, hi = max(lo, 0.0), min(hi, horizon)
        if hi - lo <= 1e-15 * max(1.0, horizon):
            continue
        segs.append(Segment(lo, hi, seg.kind, seg.params, seg.ts * A, seg.ts * B + seg.to,
                            C * seg.vs, C * seg.vo + E))
    segs.sort(key=lambda s: s.lo)
    sm = d.smoothness
    sm = Smoothness(sm.n, sm.alpha, _estimate_M(segs, horizon, sm.n))
    return Driver(d.kind, d.params, horizon, tuple(segs), sm, label)


def _estimate_M(segments, horizon, n):
    """Sampled sup of |lambda^(k)| for k <= min(n, 3), away from kinks."""
    kmax = 3 if n is None else min(n, 3)
    ts = (np.arange(256) + 0.5) * horizon / 256
    los = [s.lo for s in segments]
    best = 0.0
    for t in ts:
        seg = segments[max(bisect.bisect_right(los, t) - 1, 0)]
        for k in range(0, kmax + 1):
            if k > MAX_ORDER.get(seg.kind, k):
                break
            v = abs(seg(t, k))
            if math.isfinite(v):
                best = max(best, v)
    return best


def _make(kind, params, horizon, smooth, label, segs=None):
    horizon = float(horizon)
    if segs is None:
        segs = (Segment(0.0, horizon, kind, tuple(float(p) for p in params)),)
    n, alpha = smooth
    return Driver(kind, tuple(params), horizon, tuple(segs),
                  Smoothness(n, alpha, _estimate_M(segs, horizon, n)), label)


def constant(c=0.0, horizon=1.0):
    return _make("constant", (float(c),), horizon, (None, 1.0), f"constant:{c!r}")


def linear(slope=1.0, intercept=0.0, horizon=1.0):
    return _make("linear", (float(slope), float(intercept)), horizon, (None, 1.0),
                 f"linear:{slope!r},{intercept!r}")


def sine(amplitude=1.0, omega=1.0, phase=0.0, horizon=1.0):
    return _make("sine", (float(amplitude), float(omega), float(phase)), horizon,
                 (None, 1.0), f"sine:{amplitude!r},{omega!r},{phase!r}")


def polynomial(coeffs: Sequence[float], horizon=1.0):
    """sum_j coeffs[j] * t**j."""
    coeffs = [float(c) for c in coeffs]
    if not 1 <= len(coeffs) <= pb.NPARAMS - 1:
        raise ValueError(f"polynomial needs 1..{pb.NPARAMS - 1} coefficients")
    params = (float(len(coeffs)), *coeffs)
    d = _make("polynomial", params, horizon, (None, 1.0),
              "polynomial:" + ",".join(repr(c) for c in coeffs))
    return replace(d, params=tuple(coeffs))


def sqrt_circle(A=1.5, B=8.0, horizon=None):
    """t -> A - A*sqrt(1 - B*t); A=3/2, B=8 traces the half-circle |z-1/2|=1/2."""
    A, B = float(A), float(B)
    if B <= 0:
        raise ValueError("sqrtcircle needs B > 0")
    horizon = 0.8 / B if horizon is None else float(horizon)
    if horizon >= 1.0 / B:
        raise DriverDomainError(f"sqrtcircle horizon must stay below 1/B = {1.0 / B!r}")
    return _make("sqrtcircle", (A, B), horizon, (None, 1.0), f"sqrtcircle:{A!r},{B!r}")


def monomial(a=1.0, t0=0.5, beta=2.75, horizon=1.0):
    """t -> a*|t - t0|**beta, split at t0 so each segment is smooth."""
    a, t0, beta, horizon = float(a), float(t0), float(beta), float(horizon)
    if beta <= 0:
        raise ValueError("monomial exponent must be positive")
    label = f"monomial:{a!r},{t0!r},{beta!r}"
    if 0.0 < t0 < horizon:
        segs = (Segment(0.0, t0, "monomial", (a, t0, beta, -1.0)),
                Segment(t0, horizon, "monomial", (a, t0, beta, 1.0)))
        n = math.ceil(beta) - 1
        smooth = (n, beta - n)
    else:
        branch = 1.0 if t0 <= 0.0 else -1.0
        segs = (Segment(0.0, horizon, "monomial", (a, t0, beta, branch)),)
        smooth = (None, 1.0)
    return _make("monomial", (a, t0, beta), horizon, smooth, label, segs)


def marshall_tail(horizon=0.15):
    """Driver of the Marshall slit after the vertical phase, in local time."""
    if not 0 < horizon < pb.MARSHALL_TMAX:
        raise DriverDomainError(f"marshall horizon must lie in (0, pi/12)")
    return _make("marshall", (), horizon, (1, 0.5), "marshall-tail")


def tabulated(values, horizon):
    """Uniform samples on [0, horizon]; accepted only by the regularity module."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 2:
        raise ValueError("tabulated driver needs at least two samples")
    dt = float(horizon) / (len(values) - 1)
    return Driver("tabulated", (), float(horizon), (), Smoothness(0, 0.0, float(
        np.max(np.abs(values)))), "tabulated", (dt, values))


def _junction_order(left, right, t, kmax=3):
    """Number of derivative orders that agree across a junction at t."""
    m = 0
    for k in range(1, kmax + 1):
        try:
            a, b = left(t, k), right(t, k)
        except (ValueError, ZeroDivisionError, OverflowError):
            break
        if not (math.isfinite(a) and math.isfinite(b)) or \
                abs(a - b) > 1e-9 * max(1.0, abs(a), abs(b)):
            break
        m = k
    return m


def piecewise(pieces: Sequence[Driver], edges: Sequence[float]):
    """Concatenate drivers; piece i runs on [edges[i], edges[i+1]] in local time.

    Each piece is offset so that the result is continuous: on piece i,
    ``lambda(t) = lambda(edges[i]) + piece_i(t - edges[i]) - piece_i(0)``.
    """
    edges = [float(e) for e in edges]
    if len(edges) != len(pieces) + 1 or edges[0] != 0.0:
        raise ValueError("edges must be [0, b_1, ..., T] with one more entry than pieces")
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("edges must be strictly increasing")
    segs = []
    start_value = pieces[0].eval(0.0)
    smooth = (None, 1.0)
    for i, (piece, a, b) in enumerate(zip(pieces, edges, edges[1:])):
        if piece.is_tabulated:
            raise UnsupportedOrderError("tabulated pieces are not supported")
        if b - a > piece.horizon * (1 + 1e-12):
            raise DriverDomainError(f"piece {i} horizon {piece.horizon} shorter than "
                                    f"its interval {b - a}")
        offset = start_value - piece.eval(0.0)
        for seg in piece.segments:
            lo, hi = seg.lo + a, min(seg.hi + a, b)
            if hi - lo <= 1e-15:
                continue
            segs.append(Segment(lo, hi, seg.kind, seg.params, seg.ts, seg.to - seg.ts * a,
                                seg.vs, seg.vo + offset))
        start_value = piece.eval(b - a) + offset
        smooth = min(smooth, (piece.smoothness.n, piece.smoothness.alpha), key=_rank)
    segs.sort(key=lambda s: s.lo)
    for prev, nxt in zip(segs, segs[1:]):
        if nxt.lo in edges[1:-1]:
            m = _junction_order(prev, nxt, nxt.lo)
            smooth = min(smooth, (m, 1.0), key=_rank)
    label = "piecewise:[" + ";".join(p.label for p in pieces) + "]@" + \
        ",".join(repr(e) for e in edges[1:])
    return _make("piecewise", tuple(p.label for p in pieces), edges[-1], smooth, label,
                 tuple(segs))


def _rank(nalpha):
    n, alpha = nalpha
    return math.inf if n is None else n + alpha
