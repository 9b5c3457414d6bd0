"""Exact rational scalars and sparse polynomials in (x, b, invn).

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  ``b`` stands for the operator parameter beta and ``invn`` for
1/n; every moment and expansion coefficient is a polynomial in these three
indeterminates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Tuple, Union

BigRational = Fraction

Exponent = Tuple[int, int, int]  # (deg_x, deg_b, deg_invn)
Scalar = Union[int, Fraction]

VARIABLES = ("x", "b", "invn")


def _sort_key(exp: Exponent):
    dx, db, dn = exp
    return (dn, dx, db)


class MultiPoly:
    """Immutable sparse polynomial with rational coefficients.

    >>> x = MultiPoly.var("x")
    >>> b = MultiPoly.var("b")
    >>> str((x + b * x * x) * (x + b * x * x))
    'x^2 + 2*b*x^3 + b^2*x^4'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Scalar] | Iterable = ()):
        acc: dict[Exponent, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != 3 or min(exp) < 0:
                raise ValueError(f"bad exponent triple {exp!r}")
            acc[exp] = acc.get(exp, Fraction(0)) + Fraction(c)
        self._terms = {e: c for e, c in sorted(acc.items(), key=lambda t: _sort_key(t[0])) if c != 0}
        self._hash = None

    # construction helpers

    @classmethod
    def const(cls, c: Scalar) -> MultiPoly:
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str, power: int = 1) -> MultiPoly:
        idx = VARIABLES.index(name)
        exp = [0, 0, 0]
        exp[idx] = power
        return cls({tuple(exp): 1})

    @classmethod
    def monomial(cls, coeff: Scalar, dx: int = 0, db: int = 0, dn: int = 0) -> MultiPoly:
        return cls({(dx, db, dn): coeff})

    @classmethod
    def _raw(cls, terms: dict) -> MultiPoly:
        obj = cls.__new__(cls)
        obj._terms = {e: terms[e] for e in sorted(terms, key=_sort_key) if terms[e] != 0}
        obj._hash = None
        return obj

    # container protocol

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def coeff(self, dx: int = 0, db: int = 0, dn: int = 0) -> Fraction:
        return self._terms.get((dx, db, dn), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self, var: str) -> int:
        """Largest exponent of ``var``; -1 for the zero polynomial."""
        idx = VARIABLES.index(var)
        return max((e[idx] for e in self._terms), default=-1)

    def min_degree(self, var: str) -> int:
        idx = VARIABLES.index(var)
        return min((e[idx] for e in self._terms), default=-1)

    def coefficient_of(self, var: str, power: int) -> MultiPoly:
        """Collect the terms carrying ``var**power`` (power removed)."""
        idx = VARIABLES.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[idx] == power:
                e2 = list(e)
                e2[idx] = 0
                out[tuple(e2)] = c
        return MultiPoly._raw(out)

    def subs_zero(self, var: str) -> MultiPoly:
        return self.coefficient_of(var, 0)

    # arithmetic

    @staticmethod
    def _coerce(other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Fraction] = {}
        for (a1, b1, n1), c1 in self._terms.items():
            for (a2, b2, n2), c2 in other._terms.items():
                e = (a1 + a2, b1 + b2, n1 + n2)
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # evaluation

    def eval(self, x: Scalar, beta: Scalar, invn: Scalar) -> Fraction:
        """Exact value at a rational point."""
        x, beta, invn = Fraction(x), Fraction(beta), Fraction(invn)
        total = Fraction(0)
        for (dx, db, dn), c in self._terms.items():
            total += c * x**dx * beta**db * invn**dn
        return total

    def eval_float(self, x: float, beta: float, invn: float) -> float:
        total = 0.0
        for (dx, db, dn), c in self._terms.items():
            total += float(c) * x**dx * beta**db * invn**dn
        return total

    def __call__(self, x, beta, invn):
        return self.eval(x, beta, invn)

    # rendering

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"MultiPoly({render(self)!r})"

    def to_json(self) -> list:
        """List of ``[deg_x, deg_b, deg_invn, "p/q"]`` in canonical order."""
        return [[*e, _frac_str(c)] for e, c in self._terms.items()]

    @classmethod
    def from_json(cls, data) -> MultiPoly:
        return cls({(dx, db, dn): Fraction(c) for dx, db, dn, c in data})


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _factor(name: str, power: int) -> str:
    return name if power == 1 else f"{name}^{power}"


def render(p: MultiPoly) -> str:
    """Canonical text form, terms sorted by (deg_invn, deg_x, deg_b)."""
    if p.is_zero():
        return "0"
    pieces = []
    for (dx, db, dn), c in p:
        factors = [_factor(n, d) for n, d in (("b", db), ("x", dx), ("invn", dn)) if d]
        mag = abs(c)
        if mag != 1 or not factors:
            factors.insert(0, _frac_str(mag))
        body = "*".join(factors)
        if not pieces:
            pieces.append(body if c > 0 else "-" + body)
        else:
            pieces.append(("+ " if c > 0 else "- ") + body)
    return " ".join(pieces)


def poly_add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def poly_mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def poly_eval(p: MultiPoly, x: Scalar, beta: Scalar, invn: Scalar) -> Fraction:
    return p.eval(x, beta, invn)


X = MultiPoly.var("x")
B = MultiPoly.var("b")
INVN = MultiPoly.var("invn")
ONE = MultiPoly.const(1)
ZERO = MultiPoly()
