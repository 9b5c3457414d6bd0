"""Pure-Python quadrature kernels (fallback for the compiled ``_ckernels``).

Both modules expose the same three functions with identical semantics:

gamma_expect
    Adaptive Gauss-Kronrod integral of
    ``exp(log_pref) * g_shape(t) * 0F1(;hyp_b; hyp_c*t) * f(scale*t)``
    over ``[lo, hi]`` (minus a cutout interval if ``f`` carries one), where
    ``g_shape`` is the Gamma(shape, 1) density.  The 0F1 factor is dropped
    when ``hyp_c == 0``.
log_hyp0f1
    log 0F1(;b;z) for z >= 0 by its power series.
log_kernel
    log of the operator kernel W_beta(n, x, t).
"""

from __future__ import annotations

import heapq
import math

EPS = 2.220446049250313e-16

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

_LOG_2PI = math.log(2.0 * math.pi)


def log_gamma_shift(z: float) -> float:
    """lgamma(z + 1) - (z*log(z) - z), accurate for large z.

    Used to normalise the gamma density around its mode without the
    cancellation of subtracting two numbers of size z*log(z).
    """
    if z < 10.0:
        return math.lgamma(z + 1.0) - (z * math.log(z) - z if z > 0.0 else 0.0)
    iz = 1.0 / z
    iz2 = iz * iz
    series = iz * (1.0 / 12.0 - iz2 * (1.0 / 360.0 - iz2 * (1.0 / 1260.0 - iz2 * (1.0 / 1680.0 - iz2 / 1188.0))))
    return 0.5 * (_LOG_2PI + math.log(z)) + series


def log_hyp0f1(b: float, z: float, max_terms: int = 100000) -> float:
    """log 0F1(;b;z), z >= 0, b > 0."""
    if z <= 0.0:
        return 0.0
    lz = math.log(z)
    lt = 0.0  # log of current term
    lmax = 0.0
    acc = 1.0  # sum of exp(lt - lmax)
    for nu in range(max_terms):
        ratio = z / ((nu + 1.0) * (b + nu))
        lt += lz - math.log(nu + 1.0) - math.log(b + nu)
        if lt > lmax:
            acc = acc * math.exp(lmax - lt) + 1.0
            lmax = lt
        else:
            acc += math.exp(lt - lmax)
        if ratio < 0.5 and lt - lmax < -40.0:
            break
    return lmax + math.log(acc)


def log_kernel(n: float, x: float, beta: float, t: float, nu_cap: int):
    """(log W, terms used) for the kernel at t > 0."""
    nbt = n * beta * t
    head = -beta * x + n * math.log(n / x) + (n - 1.0) * math.log(t) - n * t / x - math.lgamma(n)
    if nbt <= 0.0:
        return head, 1
    lz = math.log(nbt)
    lt = 0.0
    lmax = 0.0
    acc = 1.0
    used = 1
    for nu in range(nu_cap - 1):
        ratio = nbt / ((nu + 1.0) * (n + nu))
        lt += lz - math.log(nu + 1.0) - math.log(n + nu)
        used += 1
        if lt > lmax:
            acc = acc * math.exp(lmax - lt) + 1.0
            lmax = lt
        else:
            acc += math.exp(lt - lmax)
        if ratio < 0.5 and lt - lmax < -40.0:
            break
    return head + lmax + math.log(acc), used


class _Integrand:
    __slots__ = ("f", "scale", "am1", "mode", "const", "hyp_b", "hyp_c")

    def __init__(self, f, scale, shape, log_pref, hyp_b, hyp_c):
        self.f = f
        self.scale = scale
        self.am1 = shape - 1.0
        self.hyp_b = hyp_b
        self.hyp_c = hyp_c
        if self.am1 > 0.0:
            self.mode = self.am1
            self.const = log_pref - log_gamma_shift(self.am1)
        else:
            self.mode = 0.0
            self.const = log_pref - math.lgamma(shape)

    def __call__(self, t):
        if t <= 0.0:
            return 0.0, 0.0
        fv = self.f(self.scale * t)
        if fv == 0.0:
            return 0.0, 0.0
        if self.mode > 0.0:
            u = (t - self.mode) / self.mode
            lg = self.const + self.am1 * (math.log1p(u) - u)
        else:
            lg = self.const + self.am1 * math.log(t) - t
        if self.hyp_c > 0.0:
            lg += log_hyp0f1(self.hyp_b, self.hyp_c * t)
        w = math.exp(lg)
        return w * fv, w * abs(fv)


def _gk15(h, a, b):
    c = 0.5 * (a + b)
    hw = 0.5 * (b - a)
    fc, ac = h(c)
    res_k = WGK[7] * fc
    res_g = WG[3] * fc
    res_abs = WGK[7] * ac
    fv1 = [0.0] * 7
    fv2 = [0.0] * 7
    for j in range(7):
        dx = hw * XGK[j]
        f1, a1 = h(c - dx)
        f2, a2 = h(c + dx)
        fv1[j] = f1
        fv2[j] = f2
        res_k += WGK[j] * (f1 + f2)
        res_abs += WGK[j] * (a1 + a2)
        if j & 1:
            res_g += WG[j >> 1] * (f1 + f2)
    mean = 0.5 * res_k
    res_asc = WGK[7] * abs(fc - mean)
    for j in range(7):
        res_asc += WGK[j] * (abs(fv1[j] - mean) + abs(fv2[j] - mean))
    res_k *= hw
    res_abs *= abs(hw)
    res_asc *= abs(hw)
    err = abs((res_k - res_g * hw))
    if res_asc != 0.0 and err != 0.0:
        err = res_asc * min(1.0, (200.0 * err / res_asc) ** 1.5)
    err = max(err, 50.0 * EPS * res_abs)
    return res_k, res_abs, err


def _intervals(f, scale, lo, hi):
    delta = getattr(f, "cut_delta", 0.0)
    if delta <= 0.0:
        return [(lo, hi)] if hi > lo else []
    c = getattr(f, "cut_center", 0.0)
    out = []
    left = min(hi, (c - delta) / scale)
    if left > lo:
        out.append((lo, left))
    right = max(lo, (c + delta) / scale)
    if hi > right:
        out.append((right, hi))
    return out


def gamma_expect(f, scale, shape, log_pref, hyp_b, hyp_c, lo, hi,
                 init_panels, rel_tol, abs_tol, max_panels):
    """Returns (value, abs_value, err, nodes, converged)."""
    h = _Integrand(f, scale, shape, log_pref, hyp_b, hyp_c)
    ivals = _intervals(f, scale, lo, hi)
    if not ivals:
        return 0.0, 0.0, 0.0, 0, True
    span = sum(b - a for a, b in ivals)
    heap = []
    val = aval = err = 0.0
    nodes = 0
    for a, b in ivals:
        k = max(1, int(init_panels * (b - a) / span + 0.5))
        step = (b - a) / k
        for i in range(k):
            pa = a + i * step
            pb = b if i == k - 1 else pa + step
            r, ra, e = _gk15(h, pa, pb)
            nodes += 15
            val += r
            aval += ra
            err += e
            heapq.heappush(heap, (-e, pa, pb, r, ra))
    converged = True
    while err > max(rel_tol * aval, abs_tol):
        if len(heap) >= max_panels:
            converged = False
            break
        ne, pa, pb, r, ra = heapq.heappop(heap)
        mid = 0.5 * (pa + pb)
        if not pa < mid < pb:
            # panel cannot be split further in binary64
            heapq.heappush(heap, (ne, pa, pb, r, ra))
            converged = False
            break
        r1, ra1, e1 = _gk15(h, pa, mid)
        r2, ra2, e2 = _gk15(h, mid, pb)
        nodes += 30
        val += r1 + r2 - r
        aval += ra1 + ra2 - ra
        err += e1 + e2 + ne
        heapq.heappush(heap, (-e1, pa, mid, r1, ra1))
        heapq.heappush(heap, (-e2, mid, pb, r2, ra2))
    # resum to shed drift from the incremental updates
    val = math.fsum(item[3] for item in heap)
    aval = math.fsum(item[4] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return val, aval, err, nodes, converged
