# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature kernels; same interface as ``_pykernels``.

``gamma_expect`` here only accepts :class:`~postwidder._native.NativeFunction`
descriptors, whose kinds are evaluated in C without touching the interpreter.
"""

from libc.math cimport exp, log, log1p, lgamma, sin, cos, fabs, pow, M_PI
from libc.stdlib cimport malloc, free

cdef double EPS = 2.220446049250313e-16

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
]
WGK[:] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
WG[:] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

cdef enum:
    POLY = 0
    EXP = 1
    SIN = 2
    COS = 3


cpdef double log_gamma_shift(double z):
    """lgamma(z + 1) - (z*log(z) - z)."""
    cdef double iz, iz2, series
    if z < 10.0:
        if z > 0.0:
            return lgamma(z + 1.0) - (z * log(z) - z)
        return lgamma(z + 1.0)
    iz = 1.0 / z
    iz2 = iz * iz
    series = iz * (1.0 / 12.0 - iz2 * (1.0 / 360.0 - iz2 * (1.0 / 1260.0 - iz2 * (1.0 / 1680.0 - iz2 / 1188.0))))
    return 0.5 * (log(2.0 * M_PI) + log(z)) + series


cpdef double log_hyp0f1(double b, double z, long max_terms=100000):
    """log 0F1(;b;z), z >= 0, b > 0."""
    cdef double lz, lt = 0.0, lmax = 0.0, acc = 1.0, ratio
    cdef long nu
    if z <= 0.0:
        return 0.0
    lz = log(z)
    for nu in range(max_terms):
        ratio = z / ((nu + 1.0) * (b + nu))
        lt += lz - log(nu + 1.0) - log(b + nu)
        if lt > lmax:
            acc = acc * exp(lmax - lt) + 1.0
            lmax = lt
        else:
            acc += exp(lt - lmax)
        if ratio < 0.5 and lt - lmax < -40.0:
            break
    return lmax + log(acc)


def log_kernel(double n, double x, double beta, double t, long nu_cap):
    """(log W, terms used) for the kernel at t > 0."""
    cdef double nbt = n * beta * t
    cdef double head = -beta * x + n * log(n / x) + (n - 1.0) * log(t) - n * t / x - lgamma(n)
    cdef double lz, lt = 0.0, lmax = 0.0, acc = 1.0, ratio
    cdef long nu, used = 1
    if nbt <= 0.0:
        return head, 1
    lz = log(nbt)
    for nu in range(nu_cap - 1):
        ratio = nbt / ((nu + 1.0) * (n + nu))
        lt += lz - log(nu + 1.0) - log(n + nu)
        used += 1
        if lt > lmax:
            acc = acc * exp(lmax - lt) + 1.0
            lmax = lt
        else:
            acc += exp(lt - lmax)
        if ratio < 0.5 and lt - lmax < -40.0:
            break
    return head + lmax + log(acc), used


cdef struct Integrand:
    int kind
    double *params
    int nparams
    double scale
    double am1
    double mode
    double cst
    double hyp_b
    double hyp_c


cdef inline double f_value(Integrand *h, double u) nogil:
    cdef double acc = 0.0
    cdef int i
    if h.kind == POLY:
        for i in range(h.nparams - 1, -1, -1):
            acc = acc * u + h.params[i]
        return acc
    if h.kind == EXP:
        return exp(h.params[0] * u)
    if h.kind == SIN:
        return sin(u)
    return cos(u)


cdef inline void integrand(Integrand *h, double t, double *fv, double *av):
    cdef double f, lg, u, w
    if t <= 0.0:
        fv[0] = 0.0
        av[0] = 0.0
        return
    f = f_value(h, h.scale * t)
    if f == 0.0:
        fv[0] = 0.0
        av[0] = 0.0
        return
    if h.mode > 0.0:
        u = (t - h.mode) / h.mode
        lg = h.cst + h.am1 * (log1p(u) - u)
    else:
        lg = h.cst + h.am1 * log(t) - t
    if h.hyp_c > 0.0:
        lg += log_hyp0f1(h.hyp_b, h.hyp_c * t)
    w = exp(lg)
    fv[0] = w * f
    av[0] = w * fabs(f)


cdef void gk15(Integrand *h, double a, double b, double *res, double *rabs, double *err):
    cdef double c = 0.5 * (a + b)
    cdef double hw = 0.5 * (b - a)
    cdef double fc, ac, f1, a1, f2, a2, dx, mean, res_k, res_g, res_abs, res_asc, e
    cdef double fv1[7]
    cdef double fv2[7]
    cdef int j
    integrand(h, c, &fc, &ac)
    res_k = WGK[7] * fc
    res_g = WG[3] * fc
    res_abs = WGK[7] * ac
    for j in range(7):
        dx = hw * XGK[j]
        integrand(h, c - dx, &f1, &a1)
        integrand(h, c + dx, &f2, &a2)
        fv1[j] = f1
        fv2[j] = f2
        res_k += WGK[j] * (f1 + f2)
        res_abs += WGK[j] * (a1 + a2)
        if j & 1:
            res_g += WG[j >> 1] * (f1 + f2)
    mean = 0.5 * res_k
    res_asc = WGK[7] * fabs(fc - mean)
    for j in range(7):
        res_asc += WGK[j] * (fabs(fv1[j] - mean) + fabs(fv2[j] - mean))
    res_k *= hw
    res_abs *= fabs(hw)
    res_asc *= fabs(hw)
    e = fabs(res_k - res_g * hw)
    if res_asc != 0.0 and e != 0.0:
        e = res_asc * min(1.0, pow(200.0 * e / res_asc, 1.5))
    e = max(e, 50.0 * EPS * res_abs)
    res[0] = res_k
    rabs[0] = res_abs
    err[0] = e


def gamma_expect(f, double scale, double shape, double log_pref, double hyp_b, double hyp_c,
                 double lo, double hi, int init_panels, double rel_tol, double abs_tol, int max_panels):
    """Returns (value, abs_value, err, nodes, converged)."""
    cdef Integrand h
    cdef double ia[2]
    cdef double ib[2]
    cdef int nint = 0, k, i, m, p, worst, npan = 0
    cdef long nodes = 0
    cdef double span = 0.0, step, pa, pb, mid, val = 0.0, aval = 0.0, err = 0.0
    cdef double r, ra, e, r1, ra1, e1, r2, ra2, e2, emax
    cdef double c, delta, left, right
    cdef double *A
    cdef double *Bd
    cdef double *R
    cdef double *RA
    cdef double *E
    cdef bint converged = True
    cdef int cap

    params = f.params
    h.kind = f.kind
    h.nparams = len(params)
    h.scale = scale
    h.am1 = shape - 1.0
    h.hyp_b = hyp_b
    h.hyp_c = hyp_c
    if h.am1 > 0.0:
        h.mode = h.am1
        h.cst = log_pref - log_gamma_shift(h.am1)
    else:
        h.mode = 0.0
        h.cst = log_pref - lgamma(shape)

    delta = f.cut_delta
    if delta <= 0.0:
        if hi > lo:
            ia[0] = lo
            ib[0] = hi
            nint = 1
    else:
        c = f.cut_center
        left = min(hi, (c - delta) / scale)
        if left > lo:
            ia[nint] = lo
            ib[nint] = left
            nint += 1
        right = max(lo, (c + delta) / scale)
        if hi > right:
            ia[nint] = right
            ib[nint] = hi
            nint += 1
    if nint == 0:
        return 0.0, 0.0, 0.0, 0, True

    h.params = <double *> malloc(max(h.nparams, 1) * sizeof(double))
    cap = max_panels + 2 * (init_panels + 2)
    A = <double *> malloc(cap * sizeof(double))
    Bd = <double *> malloc(cap * sizeof(double))
    R = <double *> malloc(cap * sizeof(double))
    RA = <double *> malloc(cap * sizeof(double))
    E = <double *> malloc(cap * sizeof(double))
    try:
        for i in range(h.nparams):
            h.params[i] = params[i]
        for i in range(nint):
            span += ib[i] - ia[i]
        for i in range(nint):
            k = max(1, <int> (init_panels * (ib[i] - ia[i]) / span + 0.5))
            step = (ib[i] - ia[i]) / k
            for m in range(k):
                pa = ia[i] + m * step
                pb = ib[i] if m == k - 1 else pa + step
                gk15(&h, pa, pb, &r, &ra, &e)
                nodes += 15
                A[npan] = pa
                Bd[npan] = pb
                R[npan] = r
                RA[npan] = ra
                E[npan] = e
                npan += 1
                val += r
                aval += ra
                err += e
        while err > max(rel_tol * aval, abs_tol):
            if npan >= max_panels:
                converged = False
                break
            worst = 0
            emax = E[0]
            for p in range(1, npan):
                if E[p] > emax:
                    emax = E[p]
                    worst = p
            pa = A[worst]
            pb = Bd[worst]
            mid = 0.5 * (pa + pb)
            if not (pa < mid < pb):
                converged = False
                break
            gk15(&h, pa, mid, &r1, &ra1, &e1)
            gk15(&h, mid, pb, &r2, &ra2, &e2)
            nodes += 30
            val += r1 + r2 - R[worst]
            aval += ra1 + ra2 - RA[worst]
            err += e1 + e2 - E[worst]
            Bd[worst] = mid
            R[worst] = r1
            RA[worst] = ra1
            E[worst] = e1
            A[npan] = mid
            Bd[npan] = pb
            R[npan] = r2
            RA[npan] = ra2
            E[npan] = e2
            npan += 1
        # resum to shed drift from the incremental updates
        val = 0.0
        aval = 0.0
        err = 0.0
        for p in range(npan):
            val += R[p]
            aval += RA[p]
            err += E[p]
    finally:
        free(h.params)
        free(A)
        free(Bd)
        free(R)
        free(RA)
        free(E)
    return val, aval, err, nodes, converged
