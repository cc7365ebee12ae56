"""Pure-Python integration kernels (fallback for the compiled core).

The algorithms mirror ``_ckernel.pyx`` step for step: Dormand-Prince 5(4)
with a PI step-size controller, mandatory nodes at driver kinks and a
segment pinned per step so that stages never straddle a kink.
"""
import bisect
import math

from ._pybase import base

OK, COLLAPSE, MAXSTEPS, SWALLOWED = 0, 1, 2, 3

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA
MAX_STEPS = 1_000_000


class Encoded:
    """Segment table of a driver in plain Python containers."""

    __slots__ = ("lo", "hi", "kind", "params", "aff")

    def __init__(self, lo, hi, kind, params, aff):
        self.lo = [float(v) for v in lo]
        self.hi = [float(v) for v in hi]
        self.kind = [int(v) for v in kind]
        self.params = [tuple(float(x) for x in row) for row in params]
        self.aff = [tuple(float(x) for x in row) for row in aff]

    def find(self, t):
        j = bisect.bisect_right(self.lo, t) - 1
        return min(max(j, 0), len(self.lo) - 1)

    def find_left(self, t):
        # segments closed on the right; tip steps run downward in driver time
        j = bisect.bisect_left(self.lo, t) - 1
        return min(max(j, 0), len(self.lo) - 1)

    def deriv(self, j, t, k):
        ts, to, vs, vo = self.aff[j]
        val = base(self.kind[j], self.params[j], ts * t + to, k)
        if k == 0:
            return vs * val + vo
        return vs * ts ** k * val


def _controller(err, err_old, h, rejected):
    if err == 0.0:
        fac = FAC_MAX
    else:
        fac = SAFETY * err ** (-EXPO) * err_old ** BETA
        fac = min(FAC_MAX, max(FAC_MIN, fac))
    if rejected:
        fac = min(fac, 1.0)
    return h * fac


def tip_solve(enc, s, eps, rtol, atol, mode, record, node_v, w0=0.0):
    """Integrate the regularized tip ODE in v = sqrt(u) from 0 to sqrt(s).

    ``mode`` 0 integrates f only.  Mode 1 adds W = X + lambda'(s-u), where
    X = d_s f, and the running integral I = int X / f^3 du.  W solves
    W' = 2(W - lambda'(s-u))/f^2 with W(0) = ``w0`` = lambda'(s-); it needs no
    lambda'' and stays continuous where lambda' jumps.  ``node_v`` are
    mandatory nodes (ascending).
    Returns (status, vs, fs, xs, f, x, integral, naccept, nreject).
    """
    v_end = math.sqrt(s)
    targets = list(node_v) + [v_end]
    var = mode == 1
    eps2 = eps * eps

    def rhs(v, f, x, j):
        t = s - v * v
        tv = v + v
        if f.imag <= 0.0:
            return None
        inv = 1.0 / f
        d1 = enc.deriv(j, t, 1)
        df = tv * (-2.0 * inv + d1)
        if not var:
            return df, 0j, 0j
        inv2 = inv * inv
        xx = x - d1
        dx = tv * 2.0 * xx * inv2
        di = tv * xx * inv2 * inv
        return df, dx, di

    v = 0.0
    f = complex(0.0, eps)
    x = complex(w0)
    integral = 0j
    vs_out, fs_out, xs_out = ([0.0], [f], [x]) if record else ([], [], [])
    h = 0.05 * min(eps, v_end)
    err_old = 1e-4
    rejected = False
    naccept = nreject = 0
    ti = 0
    while ti < len(targets) and targets[ti] <= 0.0:
        ti += 1
    while ti < len(targets):
        target = targets[ti]
        if naccept + nreject > MAX_STEPS:
            return MAXSTEPS, vs_out, fs_out, xs_out, f, x, integral, naccept, nreject
        last = False
        if v + h >= target * (1.0 - 1e-14):
            h = target - v
            last = True
        if h <= 1e-15 * max(v_end, 1e-300):
            return COLLAPSE, vs_out, fs_out, xs_out, f, x, integral, naccept, nreject
        vm = v + 0.5 * h
        j = enc.find_left(s - vm * vm)
        bad = False
        k1 = rhs(v, f, x, j)
        k2 = k3 = k4 = k5 = k6 = k7 = None
        if k1 is not None:
            k2 = rhs(v + C2 * h, f + h * A21 * k1[0], x + h * A21 * k1[1], j)
        if k2 is not None:
            k3 = rhs(v + C3 * h, f + h * (A31 * k1[0] + A32 * k2[0]),
                     x + h * (A31 * k1[1] + A32 * k2[1]), j)
        if k3 is not None:
            k4 = rhs(v + C4 * h, f + h * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
                     x + h * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]), j)
        if k4 is not None:
            k5 = rhs(v + C5 * h,
                     f + h * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
                     x + h * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1]), j)
        if k5 is not None:
            k6 = rhs(v + h,
                     f + h * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0]
                              + A65 * k5[0]),
                     x + h * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1]
                              + A65 * k5[1]), j)
        if k6 is None:
            bad = True
        else:
            f_new = f + h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0]
                             + B6 * k6[0])
            x_new = x + h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1]
                             + B6 * k6[1])
            i_new = integral + h * (B1 * k1[2] + B3 * k3[2] + B4 * k4[2]
                                    + B5 * k5[2] + B6 * k6[2])
            v_new = target if last else v + h
            u_new = v_new * v_new
            if f_new.imag < 0.5 * math.sqrt(3.0 * u_new + eps2):
                bad = True
            else:
                k7 = rhs(v_new, f_new, x_new, j)
                if k7 is None:
                    bad = True
        if bad:
            nreject += 1
            rejected = True
            h *= 0.25
            continue
        ef = h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0]
                  + E7 * k7[0])
        sc = atol + rtol * max(abs(f), abs(f_new))
        acc = (abs(ef) / sc) ** 2
        ncomp = 1
        if var:
            ex = h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1]
                      + E6 * k6[1] + E7 * k7[1])
            ei = h * (E1 * k1[2] + E3 * k3[2] + E4 * k4[2] + E5 * k5[2]
                      + E6 * k6[2] + E7 * k7[2])
            acc += (abs(ex) / (atol + rtol * max(abs(x), abs(x_new)))) ** 2
            acc += (abs(ei) / (atol + rtol * max(abs(integral), abs(i_new)))) ** 2
            ncomp = 3
        err = math.sqrt(acc / ncomp)
        if err > 1.0:
            nreject += 1
            h = _controller(err, err_old, h, True)
            rejected = True
            continue
        naccept += 1
        h_next = _controller(err, err_old, h, rejected)
        err_old = max(err, 1e-4)
        rejected = False
        v, f, x, integral = v_new, f_new, x_new, i_new
        if last:
            ti += 1
        if record:
            vs_out.append(v)
            fs_out.append(f)
            xs_out.append(x)
        h = h_next
    return OK, vs_out, fs_out, xs_out, f, x, integral, naccept, nreject


def flow_solve(enc, z, t_end, sign, rtol, atol, guard, nodes):
    """Integrate dg/dt = sign*2/(g - lambda(t)) from 0 to ``t_end``.

    The state is the displacement w = g - z, which keeps far-field
    increments at full relative precision.  ``sign`` is +1 for the forward
    flow and -1 for the backward flow.  Returns
    (status, g, naccept, nreject, min_distance).
    """
    targets = [b for b in nodes if 0.0 < b < t_end] + [t_end]
    two = 2.0 * sign
    mind = math.inf

    def rhs(t, w, j):
        d = z + w - enc.deriv(j, t, 0)
        ad = abs(d)
        if ad < guard:
            return None, ad
        return two / d, ad

    t = 0.0
    w = 0j
    k0, mind = rhs(0.0, w, enc.find(0.0))
    if k0 is None:
        return SWALLOWED, z, 0, 0, mind
    scale = abs(z.imag) if sign < 0 else abs(z - enc.deriv(enc.find(0.0), 0.0, 0))
    h = 0.01 * min(t_end, max(scale * scale, 1e-12))
    err_old = 1e-4
    rejected = False
    naccept = nreject = 0
    ti = 0
    while ti < len(targets):
        target = targets[ti]
        if naccept + nreject > MAX_STEPS:
            return MAXSTEPS, z + w, naccept, nreject, mind
        last = False
        if t + h >= target * (1.0 - 1e-14):
            h = target - t
            last = True
        if h <= 1e-15 * max(t_end, 1e-300):
            status = SWALLOWED if mind < 1e-6 * (1.0 + abs(z)) else COLLAPSE
            return status, z + w, naccept, nreject, mind
        j = enc.find(t + 0.5 * h)
        k1, d1 = rhs(t, w, j)
        ks = [k1]
        dmin = d1
        stages = ((C2, (A21,)), (C3, (A31, A32)), (C4, (A41, A42, A43)),
                  (C5, (A51, A52, A53, A54)), (1.0, (A61, A62, A63, A64, A65)))
        for c, arow in stages:
            if ks[-1] is None:
                break
            wi = w
            for a, kk in zip(arow, ks):
                wi = wi + h * a * kk
            kn, dn = rhs(t + c * h, wi, j)
            dmin = min(dmin, dn)
            ks.append(kn)
        if ks[-1] is None or len(ks) < 6:
            mind = min(mind, dmin)
            nreject += 1
            rejected = True
            h *= 0.25
            continue
        k1, k2, k3, k4, k5, k6 = ks
        w_new = w + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        t_new = target if last else t + h
        k7, d7 = rhs(t_new, w_new, j)
        if k7 is None:
            mind = min(mind, d7)
            nreject += 1
            rejected = True
            h *= 0.25
            continue
        e = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        err = abs(e) / (atol + rtol * max(abs(w), abs(w_new)))
        if err > 1.0:
            nreject += 1
            h = _controller(err, err_old, h, True)
            rejected = True
            continue
        naccept += 1
        mind = min(mind, dmin, d7)
        h_next = _controller(err, err_old, h, rejected)
        err_old = max(err, 1e-4)
        rejected = False
        t, w = t_new, w_new
        if last:
            ti += 1
        h = h_next
    return OK, z + w, naccept, nreject, mind
