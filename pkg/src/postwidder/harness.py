"""Numerical experiments: expansion order, Voronovskaja limit, localization.

Also hosts the ``selftest`` identity suites used by the CLI.
"""

from __future__ import annotations

import io
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from postwidder import combinatorics as comb
from postwidder import symbolic as sym
from postwidder.algebra import MultiPoly
from postwidder.catalog import FunctionSpec, cutout, jet_of, make_spec
from postwidder.errors import BudgetError, DivergenceError, DomainError
from postwidder.opeval import (
    DEFAULT_CONFIG,
    EPS,
    OperatorParams,
    QuadratureConfig,
    eval_exp_closed_form,
    eval_kernel,
    eval_operator,
    expansion_partial_sum,
)

NOISE_FACTOR = 1e3
ABS_NOISE_FLOOR = 1e-290


def geometric_grid(n_min: float, n_max: float, points: int) -> list[float]:
    if points < 2 or not 0 < n_min < n_max:
        raise DomainError("grid needs points >= 2 and 0 < n_min < n_max")
    return [float(v) for v in np.geomspace(n_min, n_max, points)]


def _operator_value(f: FunctionSpec, n, beta, x, cfg, use_closed_form):
    """(value, error estimate, path)."""
    if use_closed_form and f.has_closed_form:
        v = f.closed_form_image(n, beta, x)
        return v, 16.0 * EPS * abs(v) * (1.0 + abs(math.log(abs(v))) if v else 1.0), "closed_form"
    try:
        rep = eval_operator(f, OperatorParams(n, beta, x), cfg)
    except BudgetError as exc:
        err = BudgetError(f"{exc} (at n={n})", partial=exc.partial)
        err.n = n
        raise err from exc
    return rep.value, rep.err_estimate, "quadrature"


def _loglog_fit(ns, vals):
    """(slope, 95% CI half-width) of ln|vals| against ln ns."""
    if len(ns) < 2:
        return math.nan, math.nan
    lx = np.log(np.asarray(ns, dtype=float))
    ly = np.log(np.abs(np.asarray(vals, dtype=float)))
    if len(ns) == 2:
        return float((ly[1] - ly[0]) / (lx[1] - lx[0])), math.nan
    fit = stats.linregress(lx, ly)
    half = float(stats.t.ppf(0.975, len(ns) - 2) * fit.stderr)
    return float(fit.slope), half


@dataclass
class ConvergenceReport:
    function: str
    x: float
    beta: float
    q: int
    grid: list
    values: list
    references: list
    residuals: list
    errors: list
    included: list
    fitted_slope: float
    slope_ci_halfwidth: float
    path: str

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise DomainError("grid must be strictly increasing")
        if not len(self.residuals) == len(self.grid):
            raise DomainError("one residual per grid point")

    @property
    def expected_slope(self) -> int:
        return -(self.q + 1)

    def csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,value,reference,residual\n")
        for n, v, r, res in zip(self.grid, self.values, self.references, self.residuals):
            buf.write(f"{n:.17g},{v:.17g},{r:.17g},{res:.17g}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "function": self.function, "x": self.x, "beta": self.beta, "q": self.q,
            "path": self.path, "fitted_slope": self.fitted_slope,
            "slope_ci_halfwidth": self.slope_ci_halfwidth, "expected_slope": self.expected_slope,
            "rows": [
                {"n": n, "value": v, "reference": r, "residual": res, "err_estimate": e, "fitted": inc}
                for n, v, r, res, e, inc in zip(self.grid, self.values, self.references, self.residuals,
                                                 self.errors, self.included)
            ],
        }


def converge(f: FunctionSpec, x: float, beta: float, q: int, n_min: float, n_max: float, points: int,
             cfg: QuadratureConfig = DEFAULT_CONFIG, use_closed_form: bool = True) -> ConvergenceReport:
    """Residuals of the order-q expansion on a geometric n grid, with log-log slope.

    Rows whose residual is under ``NOISE_FACTOR`` times the evaluation error
    are kept in the table but left out of the fit.
    """
    if q < 0:
        raise DomainError("q must be >= 0")
    if not n_min > f.growth_A * x:
        raise DivergenceError(f"n_min={n_min} must exceed A*x={f.growth_A * x}")
    jet = jet_of(f, x, 2 * q + 2)
    grid = geometric_grid(n_min, n_max, points)
    values, refs, residuals, errors, included = [], [], [], [], []
    path = ""
    for n in grid:
        v, e, path = _operator_value(f, n, beta, x, cfg, use_closed_form)
        ref = expansion_partial_sum(jet, beta, n, q)
        # rounding in the partial sum
        e += 16.0 * EPS * (abs(ref) + sum(abs(sym.c_value(k, jet, beta)) / n**k for k in range(1, q + 1)))
        res = v - ref
        values.append(v)
        refs.append(ref)
        residuals.append(res)
        errors.append(e)
        included.append(bool(abs(res) >= NOISE_FACTOR * e and res != 0.0))
    fit_n = [n for n, inc in zip(grid, included) if inc]
    fit_r = [r for r, inc in zip(residuals, included) if inc]
    slope, half = _loglog_fit(fit_n, fit_r)
    return ConvergenceReport(f.id, x, beta, q, grid, values, refs, residuals, errors, included, slope, half, path)


@dataclass
class VoronovskajaTable:
    function: str
    x: float
    beta: float
    limit: float
    grid: list
    scaled: list  # n * (P_n f(x) - f(x))

    @property
    def deviations(self) -> list:
        return [abs(s - self.limit) for s in self.scaled]

    @property
    def last_deviation(self) -> float:
        return self.deviations[-1]

    @property
    def monotone(self) -> bool:
        d = self.deviations
        return all(b < a for a, b in zip(d, d[1:]))

    def csv(self) -> str:
        lines = ["n,scaled,limit,deviation"]
        for n, s, d in zip(self.grid, self.scaled, self.deviations):
            lines.append(f"{n:.17g},{s:.17g},{self.limit:.17g},{d:.17g}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"function": self.function, "x": self.x, "beta": self.beta, "limit": self.limit,
                "last_deviation": self.last_deviation, "monotone": self.monotone,
                "rows": [{"n": n, "scaled": s, "deviation": d}
                         for n, s, d in zip(self.grid, self.scaled, self.deviations)]}


def voronovskaja_probe(f: FunctionSpec, x: float, beta: float, n_grid: Sequence[float],
                       cfg: QuadratureConfig = DEFAULT_CONFIG, use_closed_form: bool = True) -> VoronovskajaTable:
    """n (P_n f(x) - f(x)) along ``n_grid`` against beta x^2 f' + x^2 f''/2."""
    jet = jet_of(f, x, 2)
    limit = sym.c_value(1, jet, beta)
    scaled = []
    for n in n_grid:
        v, _, _ = _operator_value(f, n, beta, x, cfg, use_closed_form)
        scaled.append(n * (v - jet.values[0]))
    return VoronovskajaTable(f.id, x, beta, limit, list(map(float, n_grid)), scaled)


@dataclass
class LocalizationTable:
    function: str
    x: float
    beta: float
    delta: float
    grid: list
    values: list
    errors: list
    flagged: list  # below the noise floor, excluded from the fit
    fitted_slope: float
    slope_ci_halfwidth: float
    max_slope: float = -3.0

    @property
    def passed(self) -> bool:
        return math.isfinite(self.fitted_slope) and self.fitted_slope <= self.max_slope

    def csv(self) -> str:
        lines = ["n,value,err_estimate,flagged"]
        for n, v, e, fl in zip(self.grid, self.values, self.errors, self.flagged):
            lines.append(f"{n:.17g},{v:.17g},{e:.17g},{int(fl)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"function": self.function, "x": self.x, "beta": self.beta, "delta": self.delta,
                "fitted_slope": self.fitted_slope, "slope_ci_halfwidth": self.slope_ci_halfwidth,
                "passed": self.passed,
                "rows": [{"n": n, "value": v, "err_estimate": e, "flagged": fl}
                         for n, v, e, fl in zip(self.grid, self.values, self.errors, self.flagged)]}


def localization_probe(base: FunctionSpec, x: float, beta: float, delta: float, n_grid: Sequence[float],
                       cfg: QuadratureConfig = DEFAULT_CONFIG, max_slope: float = -3.0) -> LocalizationTable:
    """Operator values of ``base`` with (x - delta, x + delta) cut out."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    f = cutout(base, delta)
    values, errors, flagged = [], [], []
    for n in n_grid:
        try:
            rep = eval_operator(f, OperatorParams(n, beta, x), cfg)
        except BudgetError as exc:
            err = BudgetError(f"{exc} (at n={n})", partial=exc.partial)
            err.n = n
            raise err from exc
        values.append(rep.value)
        errors.append(rep.err_estimate)
        flagged.append(bool(abs(rep.value) <= max(10.0 * rep.err_estimate, ABS_NOISE_FLOOR)))
    fit_n = [n for n, fl in zip(n_grid, flagged) if not fl]
    fit_v = [v for v, fl in zip(values, flagged) if not fl]
    slope, half = _loglog_fit(fit_n, fit_v)
    return LocalizationTable(f.id, x, beta, delta, list(map(float, n_grid)), values, errors, flagged,
                             slope, half, max_slope)


# ---------------------------------------------------------------------------
# selftest suites

@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _falling_coeffs(r: int) -> list[int]:
    """Integer coefficients of z(z-1)...(z-r+1), lowest degree first."""
    coeffs = [1]
    for i in range(r):
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] -= i * c
        coeffs = nxt
    return coeffs


def _rising_shift_coeffs(r: int) -> list[int]:
    """Coefficients of (z + r - 1)^(falling r) = z (z+1) ... (z+r-1)."""
    coeffs = [1]
    for i in range(r):
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] += i * c
        coeffs = nxt
    return coeffs


def suite_stirling(max_r: int = 30) -> list[Check]:
    out = []
    ok = all(
        _falling_coeffs(r)[l] == (-1) ** (r - l) * comb.stirling1_unsigned(r, l)
        for r in range(max_r + 1) for l in range(r + 1)
    )
    out.append(Check("stirling", f"falling-factorial expansion r<={max_r}", ok))
    ok = all(_rising_shift_coeffs(r)[l] == comb.stirling1_unsigned(r, l)
             for r in range(max_r + 1) for l in range(r + 1))
    out.append(Check("stirling", f"generating function r<={max_r}", ok))
    ok = all(
        comb.stirling1_unsigned(r, r - m)
        == sum(comb.assoc_stirling1(l + m, l) * comb.binom(r, l + m) for l in range(m + 1))
        for r in range(max_r + 1) for m in range(r + 1)
    )
    out.append(Check("stirling", f"associated representation r<={max_r}", ok))
    ok = all(comb.assoc_stirling1(i, j) == 0 for i in range(max_r + 1) for j in range(i // 2 + 1, i + 1))
    out.append(Check("stirling", "s2(i, j) = 0 for i < 2j", ok))
    return out


def suite_binomial(lim: int = 10, max_m: int = 12) -> list[Check]:
    b = comb.binom
    ok = all(
        b(a + c - 1, m) == sum(b(a - 1 - i, m - i) * b(c - 1 + i, i) for i in range(m + 1))
        for a in range(-lim, lim + 1) for c in range(-lim, lim + 1) for m in range(max_m + 1)
    )
    return [Check("binomial", f"convolution identity a,b in [-{lim},{lim}], m<={max_m}", ok)]


def suite_acoeff(max_k: int = 10, max_s: int = 25) -> list[Check]:
    ok = all(comb.a_coeff(k, s, j) == 0
             for k in range(max_k + 1) for s in range(max_s + 1) for j in range(k + 1) if 2 * k < s)
    out = [Check("acoeff", f"a(k,s,j)=0 for 2k<s, k<={max_k}, s<={max_s}", ok)]
    ok = all(comb.a_coeff_beta0_reduction_check(k, s) for k in range(1, 9) for s in range(k, 2 * k + 1))
    out.append(Check("acoeff", "a(k,s,0) = s2(s,s-k), k<=8", ok))
    return out


def _random_poly(rng: random.Random, max_terms=20) -> MultiPoly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        e = (rng.randint(0, 4), rng.randint(0, 3), rng.randint(0, 3))
        terms[e] = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    return MultiPoly(terms)


def suite_algebra(cases: int = 100, seed: int = 12345) -> list[Check]:
    rng = random.Random(seed)
    ring = hom = reduced = True
    for _ in range(cases):
        p, q, r = (_random_poly(rng) for _ in range(3))
        ring &= p + q == q + p and p * q == q * p
        ring &= (p + q) + r == p + (q + r) and (p * q) * r == p * (q * r)
        ring &= p * (q + r) == p * q + p * r
        pt = (Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(rng.randint(-5, 5), rng.randint(1, 4)),
              Fraction(1, rng.randint(1, 9)))
        hom &= (p * q + r).eval(*pt) == p.eval(*pt) * q.eval(*pt) + r.eval(*pt)
        reduced &= all(math.gcd(c.numerator, c.denominator) == 1 and c.denominator > 0 for _, c in p * q + r)
    return [Check("algebra", "ring axioms", ring), Check("algebra", "substitution homomorphism", hom),
            Check("algebra", "coefficients reduced", reduced)]


def suite_symbolic(max_s: int = 12, max_r: int = 10) -> list[Check]:
    out = []
    ok = all(sym.central_moment_poly(s) == sym.central_moment_bruteforce(s) for s in range(max_s + 1))
    out.append(Check("symbolic", f"central moments vs binomial expansion s<={max_s}", ok))
    ok = all(sym.central_moment_poly(s).min_degree("invn") == (s + 1) // 2 for s in range(1, max_s + 1))
    out.append(Check("symbolic", "lowest 1/n power is floor((s+1)/2)", ok))
    ok = all(sym.moment_recurrence_check(r) for r in range(max_r + 1))
    out.append(Check("symbolic", f"moment recurrence r<={max_r}", ok))
    ok = all(sym.monomial_exactness_check(r) for r in range(max_r + 1))
    out.append(Check("symbolic", f"monomial exactness r<={max_r}", ok))
    ok = True
    for k in range(1, 9):
        t = sym.c_table(k).at_beta_zero()
        ok &= all(row.coeff == Fraction(comb.assoc_stirling1(row.s, row.s - k), math.factorial(row.s))
                  for row in t.rows)
        ok &= {row.s for row in t.rows} == {s for s in range(k, 2 * k + 1) if comb.assoc_stirling1(s, s - k)}
    out.append(Check("symbolic", "beta=0 coefficients are s2(s,s-k)/s!", ok))
    ok = sym.c_table(1).render() == "c_1 = b*x^2*f^(1) + 1/2*x^2*f^(2)"
    out.append(Check("symbolic", "first-order coefficient", ok))
    return out


OPEVAL_GRID = [(A, x, b, n) for A in (0.0, 0.5, 1.0) for x in (0.5, 1.0, 3.0)
               for b in (0.0, 1.0, 2.5) for n in (5, 20, 100, 256) if n > A * x]


def suite_opeval(rel: float = 1e-10) -> list[Check]:
    worst = 0.0
    within_est = True
    for A, x, b, n in OPEVAL_GRID:
        p = OperatorParams(n, b, x)
        rep = eval_operator(make_spec(f"exp:A={A}"), p)
        ref = eval_exp_closed_form(A, p)
        worst = max(worst, abs(rep.value - ref) / abs(ref))
        within_est &= abs(rep.value - ref) <= 10 * rep.err_estimate
    out = [Check("opeval", f"exp closed form, rel <= {rel:g}", worst <= rel, f"worst {worst:.2e}"),
           Check("opeval", "error within 10x estimate", within_est)]
    worst = 0.0
    for x in (0.5, 1.0, 3.0):
        for b in (0.0, 1.0, 2.5):
            for n in (5, 20, 100, 256):
                mass, _ = kernel_mass(OperatorParams(n, b, x))
                worst = max(worst, abs(mass - 1.0))
    out.append(Check("opeval", "kernel mass within 1e-8", worst <= 1e-8, f"worst {worst:.2e}"))
    return out


def kernel_mass(p: OperatorParams):
    """Integral of the kernel over t > 0 by scipy quad (independent of the GK15 code)."""
    # split at the kernel's bulk so quad sees the peak
    n, x = p.n, p.x
    sd = x * math.sqrt(n + p.beta * x + 1) / n
    centre = x * (1 + p.beta * x / n)
    edges = [0.0] + [max(1e-300, centre + k * sd) for k in (-8, -2, 2, 8) if centre + k * sd > 0] + [np.inf]
    total = err = 0.0
    for a, b in zip(edges, edges[1:]):
        v, e = integrate.quad(lambda t: eval_kernel(p, t) if t > 0 else 0.0, a, b, epsabs=1e-14, epsrel=1e-12,
                              limit=400)
        total += v
        err += e
    return total, err


SUITES: dict[str, Callable[[], list[Check]]] = {
    "algebra": suite_algebra,
    "stirling": suite_stirling,
    "binomial": suite_binomial,
    "acoeff": suite_acoeff,
    "symbolic": suite_symbolic,
    "opeval": suite_opeval,
}


def selftest(only: Optional[Iterable[str]] = None, out=sys.stdout) -> int:
    """Run the identity suites, print a pass/fail matrix, return an exit status."""
    names = list(only) if only else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise DomainError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    failed = 0
    for name in names:
        for chk in SUITES[name]():
            failed += not chk.passed
            extra = f"  ({chk.detail})" if chk.detail else ""
            print(f"{'PASS' if chk.passed else 'FAIL'}  {chk.suite:<9} {chk.name}{extra}", file=out)
    print(f"{'all suites passed' if not failed else f'{failed} check(s) failed'}", file=out)
    return 1 if failed else 0
