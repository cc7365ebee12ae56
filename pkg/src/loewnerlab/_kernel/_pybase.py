"""Scalar closed-form driver primitives.

Every base kind is a function of a local variable ``x``; a driver segment
maps global time ``t`` to ``x = ts*t + to`` and returns ``vs*base(x) + vo``.
The C kernel carries a line-for-line port of these functions.
"""
import math

CONSTANT, LINEAR, MONOMIAL, SQRTCIRCLE, POLYNOMIAL, SINE, MARSHALL = range(7)
NPARAMS = 12

MARSHALL_TMAX = math.pi / 12.0
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_C1 = 2.0 * math.sqrt(2.0) / math.sqrt(math.pi)


def marshall_time(y):
    """Capacity time elapsed after 1/4 as a function of the parameter y."""
    return math.pi * y * (y * y + 6.0 * y + 6.0) / (12.0 * (2.0 + y) ** 3)


def marshall_time_dy(y):
    return math.pi * (y + 1.0) / (2.0 + y) ** 4


def marshall_y(tau):
    """Invert ``marshall_time`` by safeguarded Newton iteration."""
    if tau <= 0.0:
        return 0.0
    if tau >= MARSHALL_TMAX:
        return math.inf
    lo, hi = 0.0, 1.0
    while marshall_time(hi) < tau:
        lo, hi = hi, 2.0 * hi
    y = min(max(16.0 * tau / math.pi, lo), hi)
    for _ in range(100):
        r = marshall_time(y) - tau
        if r > 0.0:
            hi = y
        else:
            lo = y
        step = r / marshall_time_dy(y)
        y_new = y - step
        if not (lo < y_new < hi):
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= 1e-16 * (1.0 + y):
            return y_new
        y = y_new
    return y


def _marshall(x, k):
    y = marshall_y(max(x, 0.0))
    if k == 0:
        return -2.0 * _SQRT_2PI / 3.0 * (y / (2.0 + y)) ** 1.5
    if k == 1:
        return -_C1 * math.sqrt(y) * (2.0 + y) ** 1.5 / (y + 1.0)
    if k == 2:
        if y == 0.0:
            return -math.inf
        sy = math.sqrt(y)
        w = 2.0 + y
        dl1 = -_C1 * (w ** 1.5 / ((y + 1.0) * 2.0 * sy)
                      + 1.5 * sy * math.sqrt(w) / (y + 1.0)
                      - sy * w ** 1.5 / (y + 1.0) ** 2)
        return dl1 / marshall_time_dy(y)
    return math.nan


def _falling(beta, k):
    out = 1.0
    for j in range(k):
        out *= beta - j
    return out


def base(kind, p, x, k):
    """k-th derivative of the base function ``kind`` with params ``p`` at ``x``."""
    if kind == CONSTANT:
        return p[0] if k == 0 else 0.0
    if kind == LINEAR:
        if k == 0:
            return p[0] * x + p[1]
        return p[0] if k == 1 else 0.0
    if kind == SINE:
        w = p[1] ** k if k else 1.0
        return p[0] * w * math.sin(p[1] * x + p[2] + 0.5 * math.pi * k)
    if kind == SQRTCIRCLE:
        a, b = p[0], p[1]
        r = 1.0 - b * x
        if k == 0:
            return a - a * math.sqrt(r)
        return -a * _falling(0.5, k) * (-b) ** k * r ** (0.5 - k)
    if kind == MONOMIAL:
        a, t0, beta, branch = p[0], p[1], p[2], p[3]
        d = abs(x - t0)
        e = beta - k
        if d == 0.0:
            if e > 0.0:
                return 0.0
            if e < 0.0:
                return math.inf
            return a * _falling(beta, k) * branch ** k
        return a * _falling(beta, k) * d ** e * branch ** k
    if kind == POLYNOMIAL:
        n = int(p[0])
        acc = 0.0
        for j in range(n - 1, k - 1, -1):
            acc = acc * x + p[1 + j] * _falling(j, k)
        return acc
    if kind == MARSHALL:
        return _marshall(x, k)
    raise ValueError(f"unknown base kind {kind}")
