from fractions import Fraction
from math import comb as icomb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from postwidder import combinatorics as cb
from postwidder.errors import DomainError


def _series_assoc(i_max):
    """s2(i, j) from i! [t^i u^j] of (1 - t)^(-u) e^(-t u), expanded by hand.

    (1-t)^(-u) e^(-tu) = exp(u * sum_{m>=2} t^m / m); the j-th power of the
    inner sum, divided by j!, gives the coefficient of u^j.
    """
    inner = [Fraction(0)] * (i_max + 1)
    for m in range(2, i_max + 1):
        inner[m] = Fraction(1, m)
    table = {}
    power = [Fraction(1)] + [Fraction(0)] * i_max  # inner^j
    for j in range(i_max // 2 + 1):
        for i in range(i_max + 1):
            table[i, j] = power[i] * factorial(i) / factorial(j)
        nxt = [Fraction(0)] * (i_max + 1)
        for a, ca in enumerate(power):
            if ca:
                for b in range(2, i_max + 1 - a):
                    nxt[a + b] += ca * inner[b]
        power = nxt
    return table


def test_known_values():
    assert cb.assoc_stirling1(2, 1) == 1
    assert cb.assoc_stirling1(4, 2) == 3
    assert cb.assoc_stirling1(5, 2) == 20
    assert cb.stirling1_unsigned(3, 1) == 2
    assert cb.stirling1_unsigned(4, 2) == 11
    assert cb.a_coeff(2, 3, 0) == 2
    assert cb.a_coeff(1, 2, 0) == 1


def test_assoc_against_generating_function():
    table = _series_assoc(16)
    for (i, j), v in table.items():
        assert v == cb.assoc_stirling1(i, j), (i, j)


def test_assoc_recurrence():
    s2 = cb.assoc_stirling1
    for n in range(1, 25):
        for k in range(1, n):
            assert s2(n + 1, k) == n * (s2(n, k) + s2(n - 1, k - 1))


def test_unsigned_stirling_row_sums_are_factorials():
    for r in range(12):
        assert sum(cb.stirling1_unsigned(r, l) for l in range(r + 1)) == factorial(r)


def test_domain_errors():
    with pytest.raises(DomainError):
        cb.stirling1_unsigned(3, 4)
    with pytest.raises(DomainError):
        cb.stirling1_unsigned(-1, 0)
    with pytest.raises(DomainError):
        cb.assoc_stirling1(-1, 0)
    with pytest.raises(DomainError):
        cb.a_coeff_beta0_reduction_check(3, 7)


def test_assoc_zero_above_half():
    assert cb.assoc_stirling1(5, 3) == 0
    assert cb.assoc_stirling1(0, 0) == 1


@given(st.integers(-15, 15), st.integers(0, 12))
def test_binom_matches_falling_factorial(z, m):
    assert cb.binom(z, m) == cb.falling_factorial(z, m) / factorial(m)
    if z >= 0:
        assert cb.binom(z, m) == icomb(z, m)


def test_binom_special_cases():
    assert cb.binom(-1, 0) == 1
    assert cb.binom(5, -1) == 0
    assert cb.binom(Fraction(1, 2), 2) == Fraction(-1, 8)


def test_binom_reflection():
    for z in range(-6, 7):
        for m in range(8):
            assert cb.binom(-z, m) == (-1) ** m * cb.binom(z + m - 1, m)


@given(st.integers(-10, 10), st.integers(-10, 10), st.integers(0, 12))
def test_binomial_convolution_identity(a, b, m):
    rhs = sum(cb.binom(a - 1 - i, m - i) * cb.binom(b - 1 + i, i) for i in range(m + 1))
    assert cb.binom(a + b - 1, m) == rhs


def test_a_coeff_vanishes_beyond_2k():
    for k in range(0, 11):
        for s in range(2 * k + 1, 26):
            for j in range(k + 1):
                assert cb.a_coeff(k, s, j) == 0


def test_a_coeff_is_integer_and_nonnegative():
    for k in range(1, 7):
        for s in range(k, 2 * k + 1):
            for j in range(k + 1):
                v = cb.a_coeff(k, s, j)
                assert isinstance(v, int) and v >= 0


@pytest.mark.parametrize("k", range(1, 9))
def test_beta0_reduction(k):
    for s in range(k, 2 * k + 1):
        assert cb.a_coeff(k, s, 0) == cb.assoc_stirling1(s, s - k)


def test_tables_are_frozen():
    tab = cb.stirling_table(10)
    with pytest.raises(Exception):
        tab.max_r = 3
