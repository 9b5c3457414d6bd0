"""Hand-transcribed reference tables, kept in factored form.

Each c_k entry maps the derivative order s to the polynomial in (x, b)
multiplying f^(s)(x). Nothing here is generated by the package.
"""

from fractions import Fraction as F

from postwidder.algebra import B, INVN, ONE, X


def _p(*terms):
    """Sum of coeff * x^i * b^j from (coeff, i, j) triples."""
    out = 0 * ONE
    for c, i, j in terms:
        out = out + F(c) * X**i * B**j
    return out


C_TABLES = {
    1: {
        1: _p((1, 2, 1)),
        2: _p((F(1, 2), 2, 0)),
    },
    2: {
        2: _p((1, 3, 1), (F(1, 2), 4, 2)),
        3: _p((F(1, 3), 3, 0), (F(1, 2), 4, 1)),
        4: _p((F(1, 8), 4, 0)),
    },
    3: {
        3: _p((1, 4, 1), (1, 5, 2), (F(1, 6), 6, 3)),
        4: F(1, 12) * _p((3, 4, 0), (10, 5, 1), (3, 6, 2)),
        5: F(1, 24) * _p((4, 5, 0), (3, 6, 1)),
        6: _p((F(1, 48), 6, 0)),
    },
    4: {
        4: _p((1, 5, 1), (F(3, 2), 6, 2), (F(1, 2), 7, 3), (F(1, 24), 8, 4)),
        5: F(1, 60) * _p((12, 5, 0), (65, 6, 1), (40, 7, 2), (5, 8, 3)),
        6: F(1, 144) * _p((26, 6, 0), (42, 7, 1), (9, 8, 2)),
        7: F(1, 48) * _p((2, 7, 0), (1, 8, 1)),
        8: _p((F(1, 384), 8, 0)),
    },
}

_bx = B * X
CENTRAL_MOMENTS = {
    0: ONE,
    1: B * X**2 * INVN,
    2: X**2 * INVN + B * X**3 * (2 + _bx) * INVN**2,
    3: X**3 * (2 + 3 * _bx) * INVN**2 + B * X**4 * (6 + 6 * _bx + _bx**2) * INVN**3,
    4: 3 * X**4 * INVN**2
    + 2 * X**4 * (3 + _bx) * (1 + 3 * _bx) * INVN**3
    + B * X**5 * (24 + _bx * (6 + _bx) ** 2) * INVN**4,
}
