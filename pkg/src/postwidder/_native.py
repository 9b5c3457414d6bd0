"""Plain-data description of catalog functions, readable by the compiled kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

POLY = 0
EXP = 1
SIN = 2
COS = 3


@dataclass(frozen=True)
class NativeFunction:
    """f(t) of a fixed kind, optionally zeroed on |t - cut_center| < cut_delta.

    ``params`` holds polynomial coefficients (POLY) or the exponent rate (EXP).
    """

    kind: int
    params: Tuple[float, ...] = ()
    cut_center: float = 0.0
    cut_delta: float = 0.0

    def __call__(self, t: float) -> float:
        if self.cut_delta > 0.0 and abs(t - self.cut_center) < self.cut_delta:
            return 0.0
        return self.base_value(t)

    def base_value(self, t: float) -> float:
        kind = self.kind
        if kind == POLY:
            acc = 0.0
            for c in reversed(self.params):
                acc = acc * t + c
            return acc
        if kind == EXP:
            return math.exp(self.params[0] * t)
        if kind == SIN:
            return math.sin(t)
        if kind == COS:
            return math.cos(t)
        raise ValueError(f"unknown native kind {kind}")

    def with_cut(self, center: float, delta: float) -> NativeFunction:
        return replace(self, cut_center=float(center), cut_delta=float(delta))

    def envelope(self, scale: float, poly_rate: float = 0.1) -> Tuple[float, float]:
        """(log C, rate) with |f(scale*t)| <= C * exp(rate*t) for t >= 0.

        Polynomials get a small artificial rate ``poly_rate`` using
        t^i <= (i / (e * rate))^i * exp(rate * t).
        """
        if self.kind == EXP:
            return 0.0, max(self.params[0], 0.0) * scale
        if self.kind in (SIN, COS):
            return 0.0, 0.0
        total = 0.0
        for i, c in enumerate(self.params):
            if c == 0.0:
                continue
            if i == 0:
                total += abs(c)
            else:
                total += abs(c) * (scale * i / (math.e * poly_rate)) ** i
        return math.log(total) if total > 0 else -math.inf, poly_rate
