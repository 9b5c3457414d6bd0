"""Exact moment polynomials and expansion-coefficient tables.

All results are :class:`~postwidder.algebra.MultiPoly` objects in the
indeterminates ``x``, ``b`` (beta) and ``invn`` (1/n), so every identity
below is checked as an equality of polynomials, never numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence, Tuple

from postwidder.algebra import ONE, X, INVN, B, MultiPoly, _frac_str
from postwidder.combinatorics import a_coeff, binom, stirling1_unsigned
from postwidder.errors import DomainError


@lru_cache(maxsize=None)
def moment_poly(r: int) -> MultiPoly:
    """P_n^beta e_r as a polynomial in (x, b, invn)."""
    if r < 0:
        raise DomainError(f"moment order must be >= 0, got {r}")
    terms: dict = {}
    rf = factorial(r)
    for k in range(r + 1):
        for j in range(k + 1):
            inner = Fraction(0)
            for i in range(k - j + 1):
                inner += binom(j + i - 1, i) * (rf // factorial(r - j - i)) * stirling1_unsigned(r - j - i, r - k)
            if inner:
                key = (r + j, j, k)
                terms[key] = terms.get(key, 0) + inner / factorial(j)
    return MultiPoly(terms)


@lru_cache(maxsize=None)
def central_moment_poly(s: int) -> MultiPoly:
    """P_n^beta (t - x)^s evaluated at x, from the a(k, s, j) representation."""
    if s < 0:
        raise DomainError(f"central moment order must be >= 0, got {s}")
    if s == 0:
        return ONE
    terms = {}
    for k in range((s + 1) // 2, s + 1):
        for j in range(k + 1):
            a = a_coeff(k, s, j)
            if a:
                terms[(s + j, j, k)] = Fraction(a, factorial(j))
    return MultiPoly(terms)


def central_moment_bruteforce(s: int) -> MultiPoly:
    """Central moment via the binomial expansion of (t - x)^s over raw moments."""
    if s < 0:
        raise DomainError(f"central moment order must be >= 0, got {s}")
    total = MultiPoly()
    for r in range(s + 1):
        total = total + int(binom(s, r)) * (-X) ** (s - r) * moment_poly(r)
    return total


def diff_x(p: MultiPoly) -> MultiPoly:
    """Partial derivative in x, term by term."""
    return MultiPoly({(dx - 1, db, dn): c * dx for (dx, db, dn), c in p if dx > 0})


def moment_recurrence_check(r: int) -> bool:
    """n P e_{r+1} = x^2 (P e_r)' + (b x^2 + n x) P e_r, divided through by n."""
    lhs = moment_poly(r + 1)
    m = moment_poly(r)
    rhs = INVN * X**2 * diff_x(m) + (INVN * B * X**2 + X) * m
    return lhs == rhs


@dataclass(frozen=True)
class CoefficientRow:
    s: int  # derivative order
    j: int  # power of beta
    coeff: Fraction
    x_power: int


@dataclass(frozen=True)
class CoefficientTable:
    """c_k^beta(f, x) = sum over rows of coeff * f^(s)(x) * x^x_power * beta^j."""

    k: int
    rows: Tuple[CoefficientRow, ...]

    def derivative_orders(self) -> list[int]:
        return sorted({row.s for row in self.rows})

    def weight_poly(self, s: int) -> MultiPoly:
        """Polynomial in (x, b) multiplying f^(s)(x)."""
        return MultiPoly({(r.x_power, r.j, 0): r.coeff for r in self.rows if r.s == s})

    def at_beta_zero(self) -> CoefficientTable:
        return CoefficientTable(self.k, tuple(r for r in self.rows if r.j == 0))

    def apply(self, derivs: Sequence[MultiPoly]) -> MultiPoly:
        """Contract with symbolic derivative values ``derivs[s]``."""
        total = MultiPoly()
        for row in self.rows:
            total = total + derivs[row.s] * MultiPoly.monomial(row.coeff, row.x_power, row.j)
        return total

    def evaluate(self, derivs: Sequence[float], x: float, beta: float) -> float:
        need = max((r.s for r in self.rows), default=0)
        if len(derivs) <= need:
            raise DomainError(f"c_{self.k} needs derivatives up to order {need}, got {len(derivs) - 1}")
        total = 0.0
        for row in self.rows:
            total += float(row.coeff) * derivs[row.s] * x**row.x_power * beta**row.j
        return total

    def render(self) -> str:
        parts = []
        for s in self.derivative_orders():
            w = self.weight_poly(s)
            body = str(w)
            if len(w) > 1:
                body = f"({body})"
            parts.append(f"{body}*f^({s})")
        return f"c_{self.k} = " + (" + ".join(parts) if parts else "0")

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rows": [
                {"s": r.s, "j": r.j, "coeff": _frac_str(r.coeff), "x_power": r.x_power}
                for r in self.rows
            ],
        }


@lru_cache(maxsize=None)
def c_table(k: int) -> CoefficientTable:
    if k < 1:
        raise DomainError(f"c_table needs k >= 1, got {k}")
    rows = []
    for s in range(k, 2 * k + 1):
        for j in range(k + 1):
            a = a_coeff(k, s, j)
            if a:
                rows.append(CoefficientRow(s, j, Fraction(a, factorial(s) * factorial(j)), s + j))
    return CoefficientTable(k, tuple(rows))


def c_value(k: int, jet, beta: float) -> float:
    """Numeric c_k^beta(f, x) from a derivative jet."""
    return c_table(k).evaluate(jet.values, jet.x, beta)


def monomial_derivatives(r: int, upto: int) -> list[MultiPoly]:
    """Symbolic derivatives of t -> t^r at t = x, orders 0..upto."""
    return [
        MultiPoly.monomial(factorial(r) // factorial(r - s), r - s) if s <= r else MultiPoly()
        for s in range(upto + 1)
    ]


def expansion_poly(derivs: Sequence[MultiPoly], q: int) -> MultiPoly:
    """f(x) + sum_{k=1..q} c_k invn^k with symbolic derivative values."""
    total = derivs[0]
    for k in range(1, q + 1):
        total = total + c_table(k).apply(derivs) * INVN**k
    return total


def monomial_exactness_check(r: int) -> bool:
    """The expansion of e_r terminates at k = r and reproduces moment_poly(r)."""
    derivs = monomial_derivatives(r, 2 * r)
    return expansion_poly(derivs, r) == moment_poly(r)
