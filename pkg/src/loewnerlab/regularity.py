"""Empirical Hoelder exponents and Zygmund seminorms of uniformly sampled data.

The modulus of the k-th derivative is measured with (k+1)-th differences:
omega_k(delta) = sup_s |Delta_delta^{k+1} phi(s)| / delta^k, over dyadic
delta = 2^j * h.  If phi^{(k)} is C^alpha with alpha < 1, then
omega_k(delta) ~ delta^alpha, and alpha is the slope of log omega against
log delta.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyFloorError, InsufficientDataError

log = logging.getLogger(__name__)

MIN_LEVELS = 8
DROP_TOP = 2
SPAN_FRACTION = 0.1
CI_Z = 2.0


@dataclass(frozen=True)
class RegularityReport:
    derivative_order: int
    holder_estimate: float
    ci: tuple
    zygmund_seminorm: float
    profile: list
    window: tuple
    diagnostics: dict = field(default_factory=dict)
    components: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.derivative_order + self.holder_estimate

    def to_dict(self):
        return {"k": self.derivative_order, "alpha_hat": self.holder_estimate,
                "ci": list(self.ci), "zygmund": self.zygmund_seminorm,
                "profile": [list(map(float, p)) for p in self.profile],
                "window": list(self.window), "components": dict(self.components),
                "diagnostics": self.diagnostics}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def profile_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "modulus"])
        for d, m in self.profile:
            w.writerow([f"{d:.17g}", f"{m:.17g}"])
        return buf.getvalue()


def _diff(x, k, step):
    """(k)-th forward difference with stride ``step``; length len(x) - k*step."""
    out = np.asarray(x)
    for _ in range(k):
        out = out[step:] - out[:-step]
    return out


def dyadic_levels(n, k, window=None, dt=1.0):
    """Stride list 2^j (in samples) inside the window and the span rule."""
    span = (n - 1) * dt
    if window is None:
        dmin, dmax = dt, SPAN_FRACTION * span / (k + 1)
    else:
        dmin, dmax = window
        dmin = max(dmin, dt)
    strides = []
    j = 0
    while True:
        st = 2 ** j
        d = st * dt
        if d > dmax * (1 + 1e-12) or (k + 1) * st >= n:
            break
        if d >= dmin * (1 - 1e-12):
            strides.append(st)
        j += 1
    return strides


def _modulus(x, k, strides, dt):
    out = []
    for st in strides:
        dk = _diff(x, k + 1, st)
        out.append(float(np.max(np.abs(dk))) if dk.size else 0.0)
    return np.array(out)


def _fit(deltas, raw, k, accuracy):
    """Log-log fit of the sup-modulus; returns (slope, stderr, used, residuals, floor)."""
    floor = 4.0 * accuracy * 2 ** k
    keep = np.ones(len(deltas), dtype=bool)
    if DROP_TOP:
        keep[len(deltas) - DROP_TOP:] = False
    above = raw > floor
    floor_hit = bool(np.any(keep & ~above))
    use = keep & above & (raw > 0)
    if floor_hit:
        log.warning("modulus reaches the accuracy floor %.3g at %d delta levels",
                    floor, int(np.sum(keep & ~above)))
    if np.sum(use) < MIN_LEVELS:
        return None, floor_hit
    x = np.log(deltas[use])
    y = np.log(raw[use] / deltas[use] ** k)
    coef, cov = np.polyfit(x, y, 1, cov=True)
    resid = y - np.polyval(coef, x)
    return (float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0))), use, resid), floor_hit


def holder_exponent(samples, k: int = 0, window=None, *, dt: float = 1.0,
                    accuracy: float = 0.0) -> RegularityReport:
    """Hoelder exponent of the k-th derivative of uniform samples.

    Complex samples are fitted on the real part, the imaginary part and the
    complex modulus of the differences; the modulus fit is the headline.
    ``accuracy`` is the per-sample error bound used for the noise floor.

    A singular point lying between samples is under-resolved at the finest
    strides, which biases the slope upward (about +0.1 for |t - t0|^(1/2) with
    t0 half-way between nodes at 16385 samples).  Place known singular points
    on the grid, or raise the window's lower end.
    """
    x = np.asarray(samples)
    if x.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if k < 0:
        raise ValueError("k must be non-negative")
    strides = dyadic_levels(len(x), k, window, dt)
    if len(strides) < MIN_LEVELS + DROP_TOP:
        raise InsufficientDataError(
            f"{len(strides)} dyadic levels available, need {MIN_LEVELS + DROP_TOP}")
    deltas = np.array(strides, dtype=float) * dt
    parts = {"modulus": x}
    if np.iscomplexobj(x):
        parts = {"modulus": x, "real": x.real, "imag": x.imag}
    fits = {}
    profiles = {}
    floor_any = False
    for name, arr in parts.items():
        raw = _modulus(arr, k, strides, dt)
        profiles[name] = raw
        fit, floor_hit = _fit(deltas, raw, k, accuracy)
        floor_any |= floor_hit and name == "modulus"
        fits[name] = fit
    main = fits["modulus"]
    if main is None:
        if floor_any:
            raise AccuracyFloorError("fewer than 8 delta levels above the accuracy floor")
        raise InsufficientDataError("fewer than 8 usable delta levels")
    slope, se, use, resid = main
    alpha = min(max(slope, 0.0), 1.0)
    raw = profiles["modulus"]
    profile = [(float(d), float(m / d ** k)) for d, m in zip(deltas, raw)]
    zyg = zygmund_seminorm(x, (deltas[0], deltas[-1]), dt=dt)[0] if len(x) >= 3 else math.nan
    comps = {name: (None if f is None else min(max(f[0], 0.0), 1.0)) for name, f in fits.items()}
    diag = {"slope": slope, "stderr": se, "residuals": [float(r) for r in resid],
            "levels_used": int(np.sum(use)), "noise_floor": 4.0 * accuracy * 2 ** k,
            "floor_reached": floor_any,
            "fit_window": [float(deltas[use][0]), float(deltas[use][-1])]}
    return RegularityReport(k, alpha, (slope - CI_Z * se, slope + CI_Z * se), zyg, profile,
                            (float(deltas[0]), float(deltas[-1])), diag, comps)


def zygmund_seminorm(samples, window=None, *, dt: float = 1.0, alpha: float = 1.0):
    """sup |phi(s+d) + phi(s-d) - 2 phi(s)| / d^alpha over dyadic d in the window.

    alpha = 1 is the Zygmund class; alpha in (0, 1) gives the equivalent
    Hoelder-Zygmund seminorm of C^alpha.  Returns (seminorm, profile) with
    profile = [(delta, sup quotient), ...].
    """
    x = np.asarray(samples)
    n = len(x)
    if n < 3:
        raise InsufficientDataError("need at least three samples")
    if window is None:
        dmin, dmax = dt, (n - 1) * dt / 2
    else:
        dmin, dmax = window
    profile = []
    st = 1
    while 2 * st < n:
        d = st * dt
        if d > dmax * (1 + 1e-12):
            break
        if d >= dmin * (1 - 1e-12):
            q = np.abs(x[2 * st:] + x[:-2 * st] - 2 * x[st:-st]) / d ** alpha
            profile.append((d, float(np.max(q))))
        st *= 2
    if not profile:
        raise InsufficientDataError("no delta level inside the window")
    return max(q for _, q in profile), profile


def lipschitz_quotient(samples, *, dt: float = 1.0):
    """sup |phi(s+h) - phi(s)| / h at the sample spacing."""
    x = np.asarray(samples)
    return float(np.max(np.abs(np.diff(x)))) / dt


def holder_quotient(samples, alpha, *, dt: float = 1.0, max_stride=None):
    """sup over sample pairs of |phi(s) - phi(t)| / |s - t|^alpha."""
    x = np.asarray(samples)
    n = len(x)
    max_stride = n - 1 if max_stride is None else min(max_stride, n - 1)
    best = 0.0
    st = 1
    while st <= max_stride:
        q = np.abs(x[st:] - x[:-st]) / (st * dt) ** alpha
        best = max(best, float(np.max(q)))
        st = st + 1 if st < 16 else int(st * 1.25)
    return best


def curve_regularity(tr, k: int, window=None) -> RegularityReport:
    """Hoelder exponent of gamma^{(k)} from a uniform trace.

    If the trace carries gamma' or gamma'' samples, the highest available
    derivative j <= k is used with k - j differences; this keeps the signal
    far above the point accuracy.
    """
    if not tr.is_uniform():
        raise ValueError("curve_regularity needs a uniformly sampled trace")
    dt = float(tr.times[1] - tr.times[0])
    data, j = tr.points, 0
    if k >= 2 and getattr(tr, "d2", None) is not None:
        data, j = tr.d2, 2
    elif k >= 1 and getattr(tr, "d1", None) is not None:
        data, j = tr.d1, 1
    acc = float(np.max(tr.accuracy))
    rep = holder_exponent(data, k - j, window, dt=dt, accuracy=acc)
    diag = dict(rep.diagnostics, source_derivative=j)
    return RegularityReport(k, rep.holder_estimate, rep.ci, rep.zygmund_seminorm, rep.profile,
                            rep.window, diag, rep.components)
