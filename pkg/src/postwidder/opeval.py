"""Floating-point evaluation of (P_n^beta f)(x).

The operator is a Poisson(beta*x) mixture of gamma expectations,

    P_n^beta f(x) = sum_nu w_nu * E[f(x*T_nu/n)],   T_nu ~ Gamma(n + nu, 1),
    w_nu = exp(-beta*x) (beta*x)^nu / nu!,

and each expectation is an adaptive Gauss-Kronrod integral over a window
whose edges are pushed out until a Chernoff bound on the discarded gamma
tails (weighted by a growth envelope C*exp(A*t) of |f|) is negligible.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

from postwidder import _backend
from postwidder._native import NativeFunction
from postwidder.errors import BudgetError, DivergenceError, DomainError
from postwidder.symbolic import c_value

EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_nu_terms: int = 10000
    max_refinements: int = 4000  # panels per gamma expectation
    window_halfwidth_sigmas: float = 12.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_nu_terms < 1 or self.max_refinements < 1:
            raise DomainError("term and refinement budgets must be >= 1")
        if not self.window_halfwidth_sigmas > 0:
            raise DomainError("window_halfwidth_sigmas must be positive")


@dataclass(frozen=True)
class OperatorParams:
    n: float
    beta: float
    x: float

    def __post_init__(self):
        if not self.n > 0:
            raise DomainError(f"n must be positive, got {self.n}")
        if not self.beta >= 0:
            raise DomainError(f"beta must be non-negative, got {self.beta}")
        if not self.x >= 0:
            raise DomainError(f"x must be non-negative, got {self.x}")


@dataclass
class EvalReport:
    value: float
    err_estimate: float
    nu_terms_used: int = 0
    nodes_used: int = 0
    warnings: list = field(default_factory=list)
    method: str = "quadrature"
    backend: str = ""

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "err_estimate": self.err_estimate,
            "nu_terms_used": self.nu_terms_used,
            "nodes_used": self.nodes_used,
            "warnings": list(self.warnings),
            "method": self.method,
            "backend": self.backend,
        }


DEFAULT_CONFIG = QuadratureConfig()


# ---------------------------------------------------------------------------
# closed forms

def eval_exp_closed_form(A, p: OperatorParams):
    """P_n^beta exp_A at x: exp(beta*x*A*x/(n - A*x)) * (1 - A*x/n)^(-n).

    ``A`` may be complex (Re(A)*x < n); the principal branch is used, which
    gives the images of sin and cos as imaginary/real parts for A = i.
    """
    n, beta, x = p.n, p.beta, p.x
    ax = A * x
    if isinstance(A, complex):
        if not ax.real < n:
            raise DivergenceError(f"need n > Re(A)*x, got n={n}, A*x={ax}")
        return cmath.exp(beta * x * ax / (n - ax) - n * cmath.log(1 - ax / n))
    if not ax < n:
        raise DivergenceError(f"need n > A*x, got n={n}, A*x={ax}")
    return math.exp(beta * x * ax / (n - ax) - n * math.log1p(-ax / n))


# ---------------------------------------------------------------------------
# windows and tail bounds

def _chernoff_up(y, a):
    """log of a bound on P(Gamma(a,1) > y)."""
    return a * math.log(y / a) + a - y if y > a else 0.0


def _chernoff_low(y, a):
    """log of a bound on P(Gamma(a,1) < y)."""
    if y <= 0.0:
        return -math.inf
    return a * math.log(y / a) + a - y if y < a else 0.0


def _logaddexp(a, b):
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    m = max(a, b)
    return m + math.log1p(math.exp(-abs(a - b)))


class _Envelope:
    """|f(scale*t)| <= exp(log_c + rate*t); lam = 1 - rate."""

    def __init__(self, log_c, rate):
        self.log_c = log_c
        self.rate = rate
        self.lam = 1.0 - rate

    def log_mass(self, a):
        return self.log_c - a * math.log(self.lam)

    def log_tail_up(self, a, hi):
        return self.log_mass(a) + _chernoff_up(self.lam * hi, a)

    def log_tail_low(self, a, lo):
        return self.log_c + self.rate * lo + _chernoff_low(lo, a)

    def log_tail(self, a, lo, hi):
        return _logaddexp(self.log_tail_up(a, hi), self.log_tail_low(a, lo))


def _solve_decreasing(fun, lo, hi, target, iters=200):
    """Smallest-ish y in [lo, hi] with fun(y) <= target, fun decreasing."""
    while fun(hi) > target:
        hi = lo + 2.0 * (hi - lo) + 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fun(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _solve_increasing(fun, lo, hi, target, iters=200):
    """Largest-ish y in [lo, hi] with fun(y) <= target, fun increasing."""
    if fun(lo) > target:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fun(mid) > target:
            hi = mid
        else:
            lo = mid
    return lo


def _window(env, a, log_target, w):
    lam = env.lam
    m = max(a - 1.0, 0.0) / lam
    sd = math.sqrt(a) / lam
    lo = max(0.0, m - w * sd)
    hi = m + w * sd
    if env.log_tail_up(a, hi) > log_target:
        hi = _solve_decreasing(lambda t: env.log_tail_up(a, t), hi, 2.0 * hi, log_target)
    if lo > 0.0 and env.log_tail_low(a, lo) > log_target:
        lo = _solve_increasing(lambda t: env.log_tail_low(a, t), 0.0, lo, log_target)
    return lo, hi, sd


def _init_panels(lo, hi, sd):
    return int(min(200, max(4, math.ceil((hi - lo) / (1.5 * sd)))))


# ---------------------------------------------------------------------------
# operator evaluation

def _native_for(f, x):
    bound = f.at(x) if hasattr(f, "at") else f
    native = getattr(bound, "native", None)
    return bound, native


def _envelope_for(f, native: Optional[NativeFunction], scale):
    if native is not None:
        log_c, rate = native.envelope(scale)
    else:
        # generic callable: trust its declared growth constant, C = 1
        log_c, rate = 0.0, getattr(f, "growth_A", 0.0) * scale
    return _Envelope(log_c, rate)


def _check_domain(f, p):
    A = getattr(f, "growth_A", 0.0)
    if p.x > 0 and not p.n > A * p.x:
        raise DivergenceError(f"operator diverges: need n > A*x, got n={p.n}, A={A}, x={p.x}")


def _gamma_bracket(kern, integrand, scale, a, log_pref, hyp_b, hyp_c, env, cfg, warnings,
                   log_mass, window_shape=None):
    """One gamma expectation with window widening; returns (val, aval, err, nodes).

    ``log_mass`` bounds log of the integral of |integrand| and seeds the
    first tail target.
    """
    w = cfg.window_halfwidth_sigmas
    log_target = math.log(0.01 * cfg.rel_tol) + log_mass
    nodes = 0
    for attempt in range(6):
        if window_shape is None:
            lo, hi, sd = _window(env, a, log_target - log_pref, w)
            tail = log_pref + env.log_tail(a, lo, hi)
        else:
            lo, hi, sd, tail = window_shape(log_target)
        val, aval, err, used, ok = kern.gamma_expect(
            integrand, scale, a, log_pref, hyp_b, hyp_c, lo, hi,
            _init_panels(lo, hi, sd), cfg.rel_tol, cfg.abs_tol, cfg.max_refinements)
        nodes += used
        if not ok:
            raise BudgetError(f"quadrature refinement budget exhausted (shape {a})", partial=val)
        tail_abs = math.exp(tail) if tail > -745.0 else 0.0
        if tail_abs <= max(0.1 * cfg.rel_tol * aval, cfg.abs_tol):
            return val, aval, err + tail_abs, nodes
        if aval == 0.0:
            new_target = math.log(cfg.abs_tol)
        else:
            new_target = math.log(0.01 * cfg.rel_tol * aval)
        if new_target >= log_target - 1e-9:
            break
        log_target = new_target
    warnings.append("window:tail-bound-not-met")
    return val, aval, err + tail_abs, nodes


def eval_operator(f, p: OperatorParams, cfg: QuadratureConfig = DEFAULT_CONFIG, backend=None) -> EvalReport:
    """(P_n^beta f)(x) by Poisson-weighted gamma quadrature."""
    _check_domain(f, p)
    n, beta, x = float(p.n), float(p.beta), float(p.x)
    bound, native = _native_for(f, x)
    if x == 0.0:
        return EvalReport(float(bound.eval(0.0)), 0.0, 0, 0, [], "interpolation", "none")
    name, kern = _backend.get(backend, native_ok=native is not None)
    integrand = native if name == "cython" else (native or bound.eval)
    scale = x / n
    env = _envelope_for(bound, native, scale)
    bx = beta * x
    warnings: list = []
    total = abs_total = err_total = 0.0
    nodes = 0
    log_bx = math.log(bx) if bx > 0 else 0.0
    prev_bracket = None  # log of the previous unweighted |bracket|
    nu = 0
    while True:
        if nu >= cfg.max_nu_terms:
            raise BudgetError(f"nu-series not converged after {nu} terms", partial=total)
        log_w = -bx + nu * log_bx - math.lgamma(nu + 1.0)
        val, aval, err, used = _gamma_bracket(kern, integrand, scale, n + nu, log_w, 1.0, 0.0, env, cfg, warnings,
                                              log_w + env.log_mass(n + nu))
        total += val
        abs_total += aval
        err_total += err
        nodes += used
        nu += 1
        if bx == 0.0:
            break
        # growth of the unweighted brackets: envelope ratio or the observed one
        growth = 1.0 / env.lam
        if prev_bracket is not None and aval > 0.0:
            growth = max(growth, math.exp(math.log(aval) - log_w - prev_bracket))
        prev_bracket = math.log(aval) - log_w if aval > 0.0 else None
        r = bx * growth / nu
        if r < 1.0:
            tail = aval * r / (1.0 - r)
            if tail <= 0.1 * cfg.rel_tol * abs_total or tail <= cfg.abs_tol:
                err_total += tail
                break
    err_total += 64.0 * EPS * abs_total * (1.0 + bx)
    return EvalReport(total, err_total, nu, nodes, sorted(set(warnings)), "quadrature", name)


def _poisson_cutoff(mu, log_eps):
    """Smallest k > mu with log P(Poisson(mu) >= k) bound below log_eps."""
    if mu <= 0.0:
        return 0
    k = int(math.floor(mu)) + 1
    while -mu + k * (1.0 + math.log(mu / k)) > log_eps:
        k += 1
    return k


def eval_via_0F1(f, p: OperatorParams, cfg: QuadratureConfig = DEFAULT_CONFIG, backend=None) -> EvalReport:
    """exp(-beta*x) * classical Post-Widder image of 0F1(;n;n*beta*t) f(t)."""
    _check_domain(f, p)
    n, beta, x = float(p.n), float(p.beta), float(p.x)
    bound, native = _native_for(f, x)
    if x == 0.0:
        return EvalReport(float(bound.eval(0.0)), 0.0, 0, 0, [], "interpolation", "none")
    name, kern = _backend.get(backend, native_ok=native is not None)
    integrand = native if name == "cython" else (native or bound.eval)
    scale = x / n
    env = _envelope_for(bound, native, scale)
    bx = beta * x
    mu = bx / env.lam
    nu_max = _poisson_cutoff(mu, math.log(1e-3 * cfg.rel_tol))
    w = cfg.window_halfwidth_sigmas
    log_bx = math.log(bx) if bx > 0 else 0.0

    def log_w(nu):
        return -bx + nu * log_bx - math.lgamma(nu + 1.0)

    def shape(log_target):
        # log_target is relative to the whole integral's envelope mass
        lo, _, sd0 = _window(env, n, log_target - log_w(0) - math.log(nu_max + 1.0), w)
        hi = 0.0
        sd = sd0
        for k in range(nu_max + 1):
            _, h_k, sd_k = _window(env, n + k, log_target - log_w(k) - math.log(nu_max + 1.0), w)
            if h_k > hi:
                hi, sd = h_k, sd_k
        tail = -math.inf
        for k in range(nu_max + 1):
            tail = _logaddexp(tail, log_w(k) + env.log_tail(n + k, lo, hi))
        if mu > 0:
            # envelope mass of the discarded nu > nu_max components
            k = nu_max + 1
            tail = _logaddexp(tail, log_mass - mu + k * (1.0 + math.log(mu / k)))
        return lo, hi, 0.5 * (sd0 + sd), tail

    log_mass = env.log_mass(n) - bx + mu
    warnings: list = []
    val, aval, err, nodes = _gamma_bracket(kern, integrand, scale, n, -bx, n, bx, env, cfg, warnings,
                                           log_mass, window_shape=shape)
    err += 64.0 * EPS * aval * (1.0 + bx + math.sqrt(bx * (n + nu_max)))
    return EvalReport(val, err, nu_max + 1, nodes, sorted(set(warnings)), "0F1", name)


def eval_kernel(p: OperatorParams, t: float, nu_cap: int = 10000, backend=None) -> float:
    """Kernel W_beta(n, x, t) of the operator in its original variable t."""
    if not t > 0:
        raise DomainError(f"kernel needs t > 0, got {t}")
    if not p.x > 0:
        raise DomainError("kernel needs x > 0")
    _, kern = _backend.get(backend)
    lw, _ = kern.log_kernel(float(p.n), float(p.x), float(p.beta), float(t), int(nu_cap))
    return math.exp(lw) if lw > -745.0 else 0.0


def expansion_partial_sum(jet, beta: float, n: float, q: int) -> float:
    """f(x) + sum_{k=1..q} c_k^beta(f, x) / n^k from a derivative jet."""
    if q < 0:
        raise DomainError("q must be >= 0")
    if len(jet.values) <= 2 * q:
        raise DomainError(f"order-{q} expansion needs derivatives up to {2 * q}, jet has {len(jet.values) - 1}")
    total = jet.values[0]
    for k in range(1, q + 1):
        total += c_value(k, jet, beta) / n**k
    return total
