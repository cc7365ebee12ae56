"""Dense truncated power series as plain lists.

Coefficient ``c[j]`` multiplies ``x**j``.  All routines work for any number
type with field operations (float, Fraction, mpmath.mpf), so the same code
gives floating or exact rational results.
"""
from __future__ import annotations

from .errors import ZeroDenominatorError


def zero_like(x):
    return x - x


def trunc(a, n):
    """First n+1 coefficients, zero-padded."""
    z = zero_like(a[0])
    return [a[j] if j < len(a) else z for j in range(n + 1)]


def add(a, b, n):
    a, b = trunc(a, n), trunc(b, n)
    return [x + y for x, y in zip(a, b)]


def sub(a, b, n):
    a, b = trunc(a, n), trunc(b, n)
    return [x - y for x, y in zip(a, b)]


def scale(a, c, n):
    return [c * x for x in trunc(a, n)]


def mul(a, b, n):
    z = zero_like(a[0])
    out = [z] * (n + 1)
    for i, x in enumerate(a[:n + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[:n + 1 - i]):
            out[i + j] = out[i + j] + x * y
    return out


def inv(a, n):
    if a[0] == 0:
        raise ZeroDenominatorError("series has zero constant term")
    a = trunc(a, n)
    out = [1 / a[0]]
    for k in range(1, n + 1):
        acc = zero_like(a[0])
        for j in range(1, k + 1):
            acc = acc + a[j] * out[k - j]
        out.append(-acc / a[0])
    return out


def div(a, b, n):
    return mul(a, inv(b, n), n)


def deriv(a):
    return [j * a[j] for j in range(1, len(a))] or [zero_like(a[0])]


def integ(a, n, c0=None):
    z = zero_like(a[0])
    out = [z if c0 is None else c0]
    for j in range(n):
        out.append(a[j] / (j + 1) if j < len(a) else z)
    return out


def compose(a, b, n):
    """a(b(x)) for b[0] == 0, by Horner."""
    b = trunc(b, n)
    if b[0] != 0:
        raise ValueError("inner series must vanish at 0")
    a = trunc(a, n)
    out = [a[n]] + [zero_like(a[0])] * n
    for k in range(n - 1, -1, -1):
        out = mul(out, b, n)
        out[0] = out[0] + a[k]
    return out


def revert(a, n):
    """Compositional inverse of a with a[0] == 0, a[1] != 0."""
    a = trunc(a, n)
    if a[0] != 0:
        raise ValueError("series to revert must vanish at 0")
    if a[1] == 0:
        raise ZeroDenominatorError("series to revert has zero linear term")
    z = zero_like(a[0])
    out = [z, 1 / a[1]] + [z] * (n - 1)
    # Newton-free fixed point: fix one coefficient per pass
    for k in range(2, n + 1):
        c = compose(a, out, k)[k]
        out[k] = -c / a[1]
    return out


def evaluate(a, x):
    acc = zero_like(a[0]) + zero_like(x)
    for c in reversed(a):
        acc = acc * x + c
    return acc
