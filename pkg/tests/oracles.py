"""Independent reference solvers used only by the tests.

Fixed-step classical RK4, sharing no code with the package integrators.  The
tip ODE is written in v = sqrt(u), where its right-hand side is smooth.
"""
import cmath
import math


def rk4_tip(lam1, s, eps, n=20000, u_end=None, kinks=()):
    """f(u_end, s, eps) for f' = -2/f + lam1(s - u), f(0) = i eps.

    With ``kinks`` the integration is split at each kink and ``lam1(t, tmid)``
    receives the midpoint time of the current piece to pick its branch.
    """
    v_end = math.sqrt(s if u_end is None else u_end)
    nodes = sorted({0.0, v_end, *(math.sqrt(s - b) for b in kinks if 0 < s - b < v_end ** 2)})
    f = complex(0, eps)
    for va, vb in zip(nodes, nodes[1:]):
        m = max(1, round(n * (vb - va) / v_end))
        h = (vb - va) / m
        tmid = s - ((va + vb) / 2) ** 2
        lam = (lambda t, tmid=tmid: lam1(t, tmid)) if kinks else lam1

        def rhs(v, f, lam=lam):
            return 2 * v * (-2 / f + lam(s - v * v))

        v = va
        for i in range(m):
            k1 = rhs(v, f)
            k2 = rhs(v + h / 2, f + h / 2 * k1)
            k3 = rhs(v + h / 2, f + h / 2 * k2)
            k4 = rhs(v + h, f + h * k3)
            f += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            v = va + (i + 1) * h
    return f


def rk4_flow(lam, z, t, n=20000):
    """Forward Loewner flow g_t(z), g' = 2/(g - lam(t))."""
    h = t / n
    g = complex(z)
    s = 0.0
    for _ in range(n):
        k1 = 2 / (g - lam(s))
        k2 = 2 / (g + h / 2 * k1 - lam(s + h / 2))
        k3 = 2 / (g + h / 2 * k2 - lam(s + h / 2))
        k4 = 2 / (g + h * k3 - lam(s + h))
        g += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
    return g


def linear_tip_residual(f, u, eps):
    """Residual of the implicit solution of f' = -2/f + 1, f(0) = i eps."""
    f0 = complex(0, eps)
    return f - f0 + 2 * cmath.log((f - 2) / (f0 - 2)) - u
