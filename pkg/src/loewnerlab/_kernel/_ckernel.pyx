# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels; a port of ``_pykernel`` that runs without the GIL."""
import numpy as np

from libc.math cimport sin, sqrt, pow, fabs, INFINITY, NAN, M_PI
from libc.stdlib cimport malloc, realloc, free

cdef enum:
    CONSTANT = 0
    LINEAR = 1
    MONOMIAL = 2
    SQRTCIRCLE = 3
    POLYNOMIAL = 4
    SINE = 5
    MARSHALL = 6
    NPARAMS = 12

cdef enum:
    ST_OK = 0
    ST_COLLAPSE = 1
    ST_MAXSTEPS = 2
    ST_SWALLOWED = 3

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561
cdef double A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247
cdef double A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192
cdef double B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double SAFETY = 0.9, FAC_MIN = 0.2, FAC_MAX = 10.0, BETA = 0.04
cdef double EXPO = 0.2 - 0.75 * 0.04
cdef long MAX_STEPS = 1000000

cdef struct Enc:
    int n
    double *lo
    int *kind
    double *params
    double *aff


cdef inline double falling(double beta, int k) nogil:
    cdef double out = 1.0
    cdef int j
    for j in range(k):
        out *= beta - j
    return out


cdef inline double mt(double y) nogil:
    return M_PI * y * (y * y + 6.0 * y + 6.0) / (12.0 * (2.0 + y) * (2.0 + y) * (2.0 + y))


cdef inline double mt_dy(double y) nogil:
    cdef double w = 2.0 + y
    return M_PI * (y + 1.0) / (w * w * w * w)


cdef double marshall_y(double tau) nogil:
    cdef double lo = 0.0, hi = 1.0, y, r, y_new
    cdef int it
    if tau <= 0.0:
        return 0.0
    if tau >= M_PI / 12.0:
        return INFINITY
    while mt(hi) < tau:
        lo = hi
        hi = 2.0 * hi
    y = 16.0 * tau / M_PI
    if y < lo:
        y = lo
    if y > hi:
        y = hi
    for it in range(100):
        r = mt(y) - tau
        if r > 0.0:
            hi = y
        else:
            lo = y
        y_new = y - r / mt_dy(y)
        if not (lo < y_new < hi):
            y_new = 0.5 * (lo + hi)
        if fabs(y_new - y) <= 1e-16 * (1.0 + y):
            return y_new
        y = y_new
    return y


cdef double marshall(double x, int k) nogil:
    cdef double y, sy, w, c1, dl1
    if x < 0.0:
        x = 0.0
    y = marshall_y(x)
    c1 = 2.0 * sqrt(2.0) / sqrt(M_PI)
    if k == 0:
        return -2.0 * sqrt(2.0 * M_PI) / 3.0 * pow(y / (2.0 + y), 1.5)
    if k == 1:
        return -c1 * sqrt(y) * pow(2.0 + y, 1.5) / (y + 1.0)
    if k == 2:
        if y == 0.0:
            return -INFINITY
        sy = sqrt(y)
        w = 2.0 + y
        dl1 = -c1 * (pow(w, 1.5) / ((y + 1.0) * 2.0 * sy)
                     + 1.5 * sy * sqrt(w) / (y + 1.0)
                     - sy * pow(w, 1.5) / ((y + 1.0) * (y + 1.0)))
        return dl1 / mt_dy(y)
    return NAN


cdef double base(int kind, double *p, double x, int k) nogil:
    cdef double r, d, e, acc
    cdef int n, j
    if kind == CONSTANT:
        return p[0] if k == 0 else 0.0
    if kind == LINEAR:
        if k == 0:
            return p[0] * x + p[1]
        return p[0] if k == 1 else 0.0
    if kind == SINE:
        return p[0] * (pow(p[1], k) if k else 1.0) * sin(p[1] * x + p[2] + 0.5 * M_PI * k)
    if kind == SQRTCIRCLE:
        r = 1.0 - p[1] * x
        if k == 0:
            return p[0] - p[0] * sqrt(r)
        return -p[0] * falling(0.5, k) * pow(-p[1], k) * pow(r, 0.5 - k)
    if kind == MONOMIAL:
        d = fabs(x - p[1])
        e = p[2] - k
        if d == 0.0:
            if e > 0.0:
                return 0.0
            if e < 0.0:
                return INFINITY
            return p[0] * falling(p[2], k) * pow(p[3], k)
        return p[0] * falling(p[2], k) * pow(d, e) * pow(p[3], k)
    if kind == POLYNOMIAL:
        n = <int>p[0]
        acc = 0.0
        for j in range(n - 1, k - 1, -1):
            acc = acc * x + p[1 + j] * falling(j, k)
        return acc
    if kind == MARSHALL:
        return marshall(x, k)
    return NAN


cdef inline int find(Enc *enc, double t) nogil:
    cdef int lo = 0, hi = enc.n, mid
    # last index with enc.lo[j] <= t, clamped to [0, n-1]
    while lo < hi:
        mid = (lo + hi) // 2
        if enc.lo[mid] <= t:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    if lo > enc.n - 1:
        lo = enc.n - 1
    return lo


cdef inline int find_left(Enc *enc, double t) nogil:
    # last index with enc.lo[j] < t: segments are closed on the right, used by
    # the tip solver whose steps run downward in driver time
    cdef int lo = 0, hi = enc.n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if enc.lo[mid] < t:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    if lo > enc.n - 1:
        lo = enc.n - 1
    return lo


cdef inline double deriv(Enc *enc, int j, double t, int k) nogil:
    cdef double *a = enc.aff + 4 * j
    cdef double val = base(enc.kind[j], enc.params + NPARAMS * j, a[0] * t + a[1], k)
    if k == 0:
        return a[2] * val + a[3]
    return a[2] * pow(a[0], k) * val


cdef inline double controller(double err, double err_old, double h, bint rejected) nogil:
    cdef double fac
    if err == 0.0:
        fac = FAC_MAX
    else:
        fac = SAFETY * pow(err, -EXPO) * pow(err_old, BETA)
        if fac > FAC_MAX:
            fac = FAC_MAX
        if fac < FAC_MIN:
            fac = FAC_MIN
    if rejected and fac > 1.0:
        fac = 1.0
    return h * fac


cdef struct TipOut:
    int status
    long naccept
    long nreject
    long n
    long cap
    double *v
    double complex *f
    double complex *x
    double complex f_end
    double complex x_end
    double complex i_end


cdef inline bint tip_rhs(Enc *enc, double s, double v, double complex f, double complex x,
                         int j, bint var, double complex *df, double complex *dx,
                         double complex *di) nogil:
    cdef double t = s - v * v
    cdef double tv = v + v
    cdef double complex inv, inv2
    cdef double d1
    cdef double complex xx
    if f.imag <= 0.0:
        return False
    inv = 1.0 / f
    d1 = deriv(enc, j, t, 1)
    df[0] = tv * (-2.0 * inv + d1)
    if var:
        inv2 = inv * inv
        xx = x - d1
        dx[0] = tv * 2.0 * xx * inv2
        di[0] = tv * xx * inv2 * inv
    else:
        dx[0] = 0
        di[0] = 0
    return True


cdef bint push(TipOut *o, double v, double complex f, double complex x) nogil:
    if o.n == o.cap:
        o.cap = 2 * o.cap + 16
        o.v = <double *>realloc(o.v, o.cap * sizeof(double))
        o.f = <double complex *>realloc(o.f, o.cap * sizeof(double complex))
        o.x = <double complex *>realloc(o.x, o.cap * sizeof(double complex))
        if o.v == NULL or o.f == NULL or o.x == NULL:
            return False
    o.v[o.n] = v
    o.f[o.n] = f
    o.x[o.n] = x
    o.n += 1
    return True


cdef void tip_core(Enc *enc, double s, double eps, double rtol, double atol, bint var,
                   bint record, double *targets, int ntargets, double w0,
                   TipOut *o) nogil:
    cdef double v_end = sqrt(s)
    cdef double eps2 = eps * eps
    cdef double v = 0.0, h, vm, v_new, u_new, target, err, err_old = 1e-4, h_next, acc
    cdef double complex f = eps * 1j, x = w0, integral = 0
    cdef double complex k1f, k2f, k3f, k4f, k5f, k6f, k7f
    cdef double complex k1x, k2x, k3x, k4x, k5x, k6x, k7x
    cdef double complex k1i, k2i, k3i, k4i, k5i, k6i, k7i
    cdef double complex f_new, x_new, i_new, ef, ex, ei
    cdef bint rejected = False, last, good
    cdef int ti = 0, j, ncomp
    o.naccept = 0
    o.nreject = 0
    o.status = ST_OK
    if record:
        push(o, 0.0, f, x)
    h = 0.05 * (eps if eps < v_end else v_end)
    while ti < ntargets and targets[ti] <= 0.0:
        ti += 1
    while ti < ntargets:
        target = targets[ti]
        if o.naccept + o.nreject > MAX_STEPS:
            o.status = ST_MAXSTEPS
            break
        last = False
        if v + h >= target * (1.0 - 1e-14):
            h = target - v
            last = True
        if h <= 1e-15 * v_end:
            o.status = ST_COLLAPSE
            break
        vm = v + 0.5 * h
        j = find_left(enc, s - vm * vm)
        good = tip_rhs(enc, s, v, f, x, j, var, &k1f, &k1x, &k1i)
        if good:
            good = tip_rhs(enc, s, v + C2 * h, f + h * A21 * k1f, x + h * A21 * k1x, j, var,
                           &k2f, &k2x, &k2i)
        if good:
            good = tip_rhs(enc, s, v + C3 * h, f + h * (A31 * k1f + A32 * k2f),
                           x + h * (A31 * k1x + A32 * k2x), j, var, &k3f, &k3x, &k3i)
        if good:
            good = tip_rhs(enc, s, v + C4 * h, f + h * (A41 * k1f + A42 * k2f + A43 * k3f),
                           x + h * (A41 * k1x + A42 * k2x + A43 * k3x), j, var,
                           &k4f, &k4x, &k4i)
        if good:
            good = tip_rhs(enc, s, v + C5 * h,
                           f + h * (A51 * k1f + A52 * k2f + A53 * k3f + A54 * k4f),
                           x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x), j, var,
                           &k5f, &k5x, &k5i)
        if good:
            good = tip_rhs(enc, s, v + h,
                           f + h * (A61 * k1f + A62 * k2f + A63 * k3f + A64 * k4f
                                    + A65 * k5f),
                           x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x
                                    + A65 * k5x), j, var, &k6f, &k6x, &k6i)
        if good:
            f_new = f + h * (B1 * k1f + B3 * k3f + B4 * k4f + B5 * k5f + B6 * k6f)
            x_new = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
            i_new = integral + h * (B1 * k1i + B3 * k3i + B4 * k4i + B5 * k5i + B6 * k6i)
            v_new = target if last else v + h
            u_new = v_new * v_new
            if f_new.imag < 0.5 * sqrt(3.0 * u_new + eps2):
                good = False
            else:
                good = tip_rhs(enc, s, v_new, f_new, x_new, j, var, &k7f, &k7x, &k7i)
        if not good:
            o.nreject += 1
            rejected = True
            h *= 0.25
            continue
        ef = h * (E1 * k1f + E3 * k3f + E4 * k4f + E5 * k5f + E6 * k6f + E7 * k7f)
        acc = abs(ef) / (atol + rtol * max(abs(f), abs(f_new)))
        acc = acc * acc
        ncomp = 1
        if var:
            ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            ei = h * (E1 * k1i + E3 * k3i + E4 * k4i + E5 * k5i + E6 * k6i + E7 * k7i)
            err = abs(ex) / (atol + rtol * max(abs(x), abs(x_new)))
            acc += err * err
            err = abs(ei) / (atol + rtol * max(abs(integral), abs(i_new)))
            acc += err * err
            ncomp = 3
        err = sqrt(acc / ncomp)
        if err > 1.0:
            o.nreject += 1
            h = controller(err, err_old, h, True)
            rejected = True
            continue
        o.naccept += 1
        h_next = controller(err, err_old, h, rejected)
        err_old = err if err > 1e-4 else 1e-4
        rejected = False
        v = v_new
        f = f_new
        x = x_new
        integral = i_new
        if last:
            ti += 1
        if record:
            if not push(o, v, f, x):
                o.status = ST_MAXSTEPS
                break
        h = h_next
    o.f_end = f
    o.x_end = x
    o.i_end = integral


cdef void load(Enc *enc, tuple encoded, list keep):
    lo, hi, kind, params, aff = encoded
    cdef double[::1] lo_v = np.ascontiguousarray(lo, dtype=np.float64)
    cdef int[::1] kind_v = np.ascontiguousarray(kind, dtype=np.int32)
    cdef double[:, ::1] p_v = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[:, ::1] a_v = np.ascontiguousarray(aff, dtype=np.float64)
    keep.extend([lo_v, kind_v, p_v, a_v])
    enc.n = lo_v.shape[0]
    enc.lo = &lo_v[0]
    enc.kind = &kind_v[0]
    enc.params = &p_v[0, 0]
    enc.aff = &a_v[0, 0]


def tip_solve(tuple encoded, double s, double eps, double rtol, double atol, int mode,
              bint record, node_v, double w0=0.0):
    """See ``_pykernel.tip_solve``; returns numpy arrays for the recorded nodes."""
    cdef Enc enc
    cdef list keep = []
    load(&enc, encoded, keep)
    tv = np.ascontiguousarray(list(node_v) + [sqrt(s)], dtype=np.float64)
    cdef double[::1] targets = tv
    cdef int ntargets = targets.shape[0]
    cdef TipOut o
    o.n = 0
    o.cap = 0
    o.v = NULL
    o.f = NULL
    o.x = NULL
    with nogil:
        tip_core(&enc, s, eps, rtol, atol, mode == 1, record, &targets[0],
                 ntargets, w0, &o)
    try:
        vs = np.array(<double[:o.n]>o.v, copy=True) if o.n else np.empty(0)
        fs = np.array(<double complex[:o.n]>o.f, copy=True) if o.n else np.empty(0, complex)
        xs = np.array(<double complex[:o.n]>o.x, copy=True) if o.n else np.empty(0, complex)
    finally:
        free(o.v)
        free(o.f)
        free(o.x)
    return (o.status, vs, fs, xs, complex(o.f_end), complex(o.x_end), complex(o.i_end),
            o.naccept, o.nreject)


cdef inline bint flow_rhs(Enc *enc, double complex z, double two, double t,
                          double complex w, int j, double guard, double complex *k,
                          double *dist) nogil:
    cdef double complex d = z + w - deriv(enc, j, t, 0)
    dist[0] = abs(d)
    if dist[0] < guard:
        return False
    k[0] = two / d
    return True


def flow_solve(tuple encoded, double complex z, double t_end, int sign, double rtol,
               double atol, double guard, nodes):
    """See ``_pykernel.flow_solve``."""
    cdef Enc enc
    cdef list keep = []
    load(&enc, encoded, keep)
    tl = [float(b) for b in nodes if 0.0 < b < t_end] + [t_end]
    cdef double[::1] targets = np.ascontiguousarray(tl, dtype=np.float64)
    cdef int ntargets = targets.shape[0], ti = 0, j
    cdef double two = 2.0 * sign, t = 0.0, h, scale, err, err_old = 1e-4, h_next
    cdef double target, t_new, mind = INFINITY, dmin, dd
    cdef double complex w = 0, w_new, e, k1, k2, k3, k4, k5, k6, k7
    cdef bint rejected = False, last, good
    cdef long naccept = 0, nreject = 0
    cdef int status = ST_OK
    with nogil:
        j = find(&enc, 0.0)
        if not flow_rhs(&enc, z, two, 0.0, w, j, guard, &k1, &mind):
            status = ST_SWALLOWED
            ti = ntargets
        if sign < 0:
            scale = fabs(z.imag)
        else:
            scale = abs(z - deriv(&enc, j, 0.0, 0))
        scale = scale * scale
        if scale < 1e-12:
            scale = 1e-12
        h = 0.01 * (t_end if t_end < scale else scale)
        while ti < ntargets:
            target = targets[ti]
            if naccept + nreject > MAX_STEPS:
                status = ST_MAXSTEPS
                break
            last = False
            if t + h >= target * (1.0 - 1e-14):
                h = target - t
                last = True
            if h <= 1e-15 * t_end:
                status = ST_SWALLOWED if mind < 1e-6 * (1.0 + abs(z)) else ST_COLLAPSE
                break
            j = find(&enc, t + 0.5 * h)
            good = flow_rhs(&enc, z, two, t, w, j, guard, &k1, &dd)
            dmin = dd
            if good:
                good = flow_rhs(&enc, z, two, t + C2 * h, w + h * A21 * k1, j, guard, &k2, &dd)
                dmin = dd if dd < dmin else dmin
            if good:
                good = flow_rhs(&enc, z, two, t + C3 * h, w + h * (A31 * k1 + A32 * k2), j,
                                guard, &k3, &dd)
                dmin = dd if dd < dmin else dmin
            if good:
                good = flow_rhs(&enc, z, two, t + C4 * h,
                                w + h * (A41 * k1 + A42 * k2 + A43 * k3), j, guard, &k4, &dd)
                dmin = dd if dd < dmin else dmin
            if good:
                good = flow_rhs(&enc, z, two, t + C5 * h,
                                w + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), j,
                                guard, &k5, &dd)
                dmin = dd if dd < dmin else dmin
            if good:
                good = flow_rhs(&enc, z, two, t + h,
                                w + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4
                                         + A65 * k5), j, guard, &k6, &dd)
                dmin = dd if dd < dmin else dmin
            if good:
                w_new = w + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
                t_new = target if last else t + h
                good = flow_rhs(&enc, z, two, t_new, w_new, j, guard, &k7, &dd)
                dmin = dd if dd < dmin else dmin
            if not good:
                mind = dmin if dmin < mind else mind
                nreject += 1
                rejected = True
                h *= 0.25
                continue
            e = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
            err = abs(e) / (atol + rtol * max(abs(w), abs(w_new)))
            if err > 1.0:
                nreject += 1
                h = controller(err, err_old, h, True)
                rejected = True
                continue
            naccept += 1
            mind = dmin if dmin < mind else mind
            h_next = controller(err, err_old, h, rejected)
            err_old = err if err > 1e-4 else 1e-4
            rejected = False
            t = t_new
            w = w_new
            if last:
                ti += 1
            h = h_next
    return status, complex(z + w), naccept, nreject, mind
