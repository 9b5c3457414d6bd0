"""Falling factorials, binomials, Stirling numbers and the a(k, s, j) table.

Associated Stirling numbers use the unsigned convention: ``s2(i, j)`` counts
permutations of ``i`` elements with ``j`` cycles, none of them a fixed point.
Their double generating function is ``exp(-t*u) * (1 - t)**(-u)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Tuple

from postwidder.errors import DomainError


def falling_factorial(z, r: int) -> Fraction:
    """z (z-1) ... (z-r+1); the empty product is 1."""
    if r < 0:
        raise DomainError(f"falling factorial needs r >= 0, got {r}")
    z = Fraction(z)
    out = Fraction(1)
    for i in range(r):
        out *= z - i
    return out


def binom(z, m: int) -> Fraction:
    """Generalised binomial coefficient z^(falling m) / m!.

    Negative and rational upper arguments are allowed.
    """
    if m < 0:
        return Fraction(0)
    return falling_factorial(z, m) / factorial(m)


@dataclass(frozen=True)
class StirlingTable:
    """Unsigned Stirling numbers of the first kind, rows 0..max_r."""

    max_r: int
    entries: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, max_r: int) -> StirlingTable:
        rows = [[1]]
        for n in range(max_r):
            prev = rows[-1]
            row = [0] * (n + 2)
            for k in range(1, n + 2):
                row[k] = (n * prev[k] if k <= n else 0) + prev[k - 1]
            rows.append(row)
        return cls(max_r, tuple(tuple(r) for r in rows))

    def __call__(self, r: int, l: int) -> int:
        return self.entries[r][l]


@dataclass(frozen=True)
class AssocStirlingTable:
    """2-associated Stirling numbers of the first kind, s2(i, j) for j <= i <= max_i."""

    max_i: int
    entries: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, max_i: int) -> AssocStirlingTable:
        # s2(n+1, k) = n * (s2(n, k) + s2(n-1, k-1))
        rows = [[1], [0, 0]]
        for n in range(1, max_i):
            row = [0] * (n + 2)
            for k in range(1, n + 2):
                a = rows[n][k] if k <= n else 0
                c = rows[n - 1][k - 1] if k - 1 <= n - 1 else 0
                row[k] = n * (a + c)
            rows.append(row)
        return cls(max_i, tuple(tuple(r) for r in rows[: max_i + 1]))

    def __call__(self, i: int, j: int) -> int:
        if j > i:
            return 0
        return self.entries[i][j]


_lock = threading.Lock()
_tables: dict = {}


def _table(kind, size: int):
    with _lock:
        tab = _tables.get(kind)
        if tab is None or _size(tab) < size:
            tab = kind.build(max(size, 32))
            _tables[kind] = tab
        return tab


def _size(tab) -> int:
    return tab.max_r if isinstance(tab, StirlingTable) else tab.max_i


def stirling_table(max_r: int) -> StirlingTable:
    return _table(StirlingTable, max_r)


def assoc_stirling_table(max_i: int) -> AssocStirlingTable:
    return _table(AssocStirlingTable, max_i)


def stirling1_unsigned(r: int, l: int) -> int:
    """Unsigned Stirling number of the first kind [r; l]."""
    if not 0 <= l <= r:
        raise DomainError(f"stirling1_unsigned needs 0 <= l <= r, got r={r}, l={l}")
    return stirling_table(r)(r, l)


def assoc_stirling1(i: int, j: int) -> int:
    """Unsigned 2-associated Stirling number s2(i, j); zero when i < 2j."""
    if i < 0 or j < 0:
        raise DomainError(f"assoc_stirling1 needs non-negative indices, got ({i}, {j})")
    if 2 * j > i:
        return 0
    return assoc_stirling_table(i)(i, j)


def a_coeff(k: int, s: int, j: int) -> int:
    """The integer coefficient a(k, s, j) of central moments and expansion terms.

    Sum over i = j .. min(k, 2k - s) of
    binom(i-1, i-j) * s!/(s-i)! * s2(s-i, s-k); an empty range gives 0.
    """
    if min(k, s, j) < 0:
        raise DomainError(f"a_coeff needs non-negative indices, got ({k}, {s}, {j})")
    if s < k:
        # s2(., s-k) with negative second index: no such terms
        return 0
    total = Fraction(0)
    for i in range(j, min(k, 2 * k - s) + 1):
        if i > s:
            continue
        total += binom(i - 1, i - j) * (factorial(s) // factorial(s - i)) * assoc_stirling1(s - i, s - k)
    assert total.denominator == 1
    return int(total)


def a_coeff_beta0_reduction_check(k: int, s: int) -> bool:
    """a(k, s, 0) == s2(s, s - k) for k <= s <= 2k."""
    if not k <= s <= 2 * k:
        raise DomainError(f"reduction check needs k <= s <= 2k, got k={k}, s={s}")
    return a_coeff(k, s, 0) == assoc_stirling1(s, s - k)
