"""Built-in test functions and the function-spec mini-language.

Grammar (the single wire format used by every CLI subcommand)::

    monomial:r=R            t^R
    exp:A=V                 exp(V*t)
    poly:c0,c1,...          c0 + c1*t + ...
    sin | cos
    cutout:base=SPEC,delta=D
                            SPEC multiplied by the indicator |t - x| >= D,
                            x being the point where the operator is evaluated
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from math import factorial
from typing import Callable, Optional, Tuple

from postwidder._native import COS, EXP, POLY, SIN, NativeFunction
from postwidder.errors import DomainError, SpecParseError
from postwidder.opeval import OperatorParams, eval_exp_closed_form
from postwidder.symbolic import moment_poly


@dataclass(frozen=True)
class DerivativeJet:
    """f(x), f'(x), ..., f^(S)(x) at a point x > 0."""

    x: float
    values: Tuple[float, ...]

    def __post_init__(self):
        if not self.x > 0:
            raise DomainError(f"jet point must be positive, got {self.x}")
        if not self.values:
            raise DomainError("jet needs at least f(x)")
        if not all(math.isfinite(v) for v in self.values):
            raise DomainError("jet entries must be finite")

    @property
    def order(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class FunctionSpec:
    id: str
    func: Optional[Callable[[float], float]]
    deriv: Optional[Callable[[int, float], float]]
    growth_A: float
    closed_form: Optional[Callable[[float, float, float], float]] = None
    native: Optional[NativeFunction] = None
    base: Optional["FunctionSpec"] = None
    delta: float = 0.0
    center: Optional[float] = None

    @property
    def is_cutout(self) -> bool:
        return self.base is not None

    def at(self, x: float) -> FunctionSpec:
        """Bind a cutout to the evaluation point; other specs are returned as is."""
        if not self.is_cutout:
            return self
        native = self.base.native.with_cut(x, self.delta) if self.base.native else None
        return replace(self, center=float(x), native=native)

    def eval(self, t: float) -> float:
        if self.is_cutout:
            if self.center is None:
                raise DomainError(f"{self.id}: cutout must be bound to a point with .at(x)")
            if abs(t - self.center) < self.delta:
                return 0.0
            return self.base.eval(t)
        return self.func(t)

    __call__ = eval

    def derivative(self, s: int, x: float) -> float:
        if s < 0:
            raise DomainError("derivative order must be >= 0")
        if self.is_cutout:
            if self.center is None:
                raise DomainError(f"{self.id}: unbound cutout has no derivatives")
            d = abs(x - self.center)
            if d < self.delta:
                return 0.0
            if d == self.delta:
                raise DomainError(f"{self.id}: not differentiable at the cut edge {x}")
            return self.base.derivative(s, x)
        return self.deriv(s, x)

    def closed_form_image(self, n: float, beta: float, x: float) -> Optional[float]:
        if self.closed_form is None:
            return None
        return self.closed_form(n, beta, x)

    @property
    def has_closed_form(self) -> bool:
        return self.closed_form is not None


# ---------------------------------------------------------------------------
# constructors

def _num(v: float) -> str:
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def _poly_closed(coeffs):
    polys = [(c, moment_poly(r)) for r, c in enumerate(coeffs) if c != 0]

    def image(n, beta, x):
        return math.fsum(c * p.eval_float(x, beta, 1.0 / n) for c, p in polys)

    return image


def monomial(r: int) -> FunctionSpec:
    if r < 0:
        raise DomainError("monomial degree must be >= 0")
    coeffs = [0.0] * r + [1.0]

    def deriv(s, x):
        return float(factorial(r) // factorial(r - s)) * x ** (r - s) if s <= r else 0.0

    return FunctionSpec(f"monomial:r={r}", lambda t: t**r, deriv, 0.0, _poly_closed(coeffs),
                        NativeFunction(POLY, tuple(coeffs)))


def poly(coeffs) -> FunctionSpec:
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise DomainError("poly needs at least one coefficient")
    native = NativeFunction(POLY, tuple(coeffs))

    def deriv(s, x):
        return math.fsum(c * (factorial(i) // factorial(i - s)) * x ** (i - s)
                         for i, c in enumerate(coeffs) if i >= s)

    return FunctionSpec("poly:" + ",".join(_num(c) for c in coeffs), native, deriv, 0.0,
                        _poly_closed(coeffs), native)


def exponential(A: float) -> FunctionSpec:
    A = float(A)

    def image(n, beta, x):
        return eval_exp_closed_form(A, OperatorParams(n, beta, x))

    return FunctionSpec(f"exp:A={_num(A)}", lambda t: math.exp(A * t), lambda s, x: A**s * math.exp(A * x),
                        max(A, 0.0), image, NativeFunction(EXP, (A,)))


def _trig(kind: str) -> FunctionSpec:
    # derivative cycles starting at f itself
    if kind == "sin":
        cycle = (math.sin, math.cos, lambda v: -math.sin(v), lambda v: -math.cos(v))
        native = NativeFunction(SIN)
        part = lambda z: z.imag  # noqa: E731
    else:
        cycle = (math.cos, lambda v: -math.sin(v), lambda v: -math.cos(v), math.sin)
        native = NativeFunction(COS)
        part = lambda z: z.real  # noqa: E731

    def image(n, beta, x):
        return part(eval_exp_closed_form(1j, OperatorParams(n, beta, x)))

    return FunctionSpec(kind, cycle[0], lambda s, x: cycle[s % 4](x), 0.0, image, native)


def cutout(base: FunctionSpec, delta: float) -> FunctionSpec:
    if base.is_cutout:
        raise DomainError("nested cutouts are not supported")
    if not delta > 0:
        raise DomainError("cutout delta must be positive")
    return FunctionSpec(f"cutout:base={base.id},delta={_num(delta)}", None, None, base.growth_A,
                        None, None, base, float(delta))


# ---------------------------------------------------------------------------
# parser

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[a-z]+")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise SpecParseError(msg, self.text, self.pos)

    def peek(self, lit):
        return self.text.startswith(lit, self.pos)

    def expect(self, lit):
        if not self.peek(lit):
            self.error(f"expected {lit!r}")
        self.pos += len(lit)

    def number(self):
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group())

    def integer(self):
        start = self.pos
        v = self.number()
        if v != int(v) or any(c in self.text[start:self.pos] for c in ".eE"):
            self.pos = start
            self.error("expected an integer")
        return int(v)

    def spec(self) -> FunctionSpec:
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.error("expected a function name")
        name = m.group()
        start = self.pos
        self.pos = m.end()
        if name in ("sin", "cos"):
            return _trig(name)
        if name == "monomial":
            self.expect(":r=")
            r = self.integer()
            if r < 0:
                self.error("monomial degree must be >= 0")
            return monomial(r)
        if name == "exp":
            self.expect(":A=")
            return exponential(self.number())
        if name == "poly":
            self.expect(":")
            coeffs = [self.number()]
            while self.peek(",") and _NUMBER.match(self.text, self.pos + 1):
                self.pos += 1
                coeffs.append(self.number())
            return poly(coeffs)
        if name == "cutout":
            self.expect(":")
            base = delta = None
            delta_pos = self.pos
            for _ in range(2):
                if self.peek("base="):
                    self.pos += 5
                    base = self.spec()
                elif self.peek("delta="):
                    self.pos += 6
                    delta_pos = self.pos
                    delta = self.number()
                else:
                    self.error("expected 'base=' or 'delta='")
                if base is not None and delta is not None:
                    break
                self.expect(",")
            if not delta > 0:
                self.pos = delta_pos
                self.error("cutout delta must be positive")
            if base.is_cutout:
                self.error("nested cutouts are not supported")
            return cutout(base, delta)
        self.pos = start
        self.error(f"unknown function {name!r}")


def make_spec(text: str) -> FunctionSpec:
    """Parse a function spec string, e.g. ``"cutout:base=exp:A=1,delta=0.5"``."""
    p = _Parser(text.strip())
    spec = p.spec()
    if p.pos != len(p.text):
        p.error("trailing characters")
    return spec


def jet_of(spec: FunctionSpec, x: float, S: int) -> DerivativeJet:
    """Derivative jet (f(x), ..., f^(S)(x)) from the analytic derivative oracle."""
    if spec.is_cutout:
        raise DomainError(f"{spec.id}: cutout functions have no derivative jet")
    if S < 0:
        raise DomainError("jet order must be >= 0")
    return DerivativeJet(float(x), tuple(float(spec.derivative(s, x)) for s in range(S + 1)))
