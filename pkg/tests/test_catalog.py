import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from postwidder.catalog import DerivativeJet, cutout, jet_of, make_spec
from postwidder.errors import DomainError, SpecParseError

SMOOTH = ["exp:A=1", "exp:A=-0.5", "monomial:r=3", "poly:1,-2,0.5", "sin", "cos"]


@pytest.mark.parametrize("text", SMOOTH)
@pytest.mark.parametrize("s", range(5))
def test_derivative_oracle_by_finite_differences(text, s):
    f = make_spec(text)
    x, h = 0.7, 1e-3
    # central difference of the (s)-th derivative
    fd = (f.derivative(s, x + h) - f.derivative(s, x - h)) / (2 * h)
    assert f.derivative(s + 1, x) == pytest.approx(fd, rel=1e-5, abs=1e-6)


@pytest.mark.parametrize("text", SMOOTH)
def test_derivative_zero_is_function(text):
    f = make_spec(text)
    for t in (0.1, 1.0, 2.5):
        assert f.derivative(0, t) == pytest.approx(f(t), rel=1e-15)


def test_parse_round_trips_ids():
    for text in SMOOTH + ["cutout:base=exp:A=1,delta=0.5"]:
        assert make_spec(make_spec(text).id).id == make_spec(text).id


def test_cutout_either_key_order():
    a = make_spec("cutout:base=exp:A=1,delta=0.5")
    b = make_spec("cutout:delta=0.5,base=exp:A=1")
    assert a.id == b.id and a.is_cutout and a.delta == 0.5


@pytest.mark.parametrize("text, pos", [
    ("bogus", 0),
    ("exp:A=", 6),
    ("monomial:r=1.5", 11),
    ("exp:A=1x", 7),
    ("cutout:base=exp:A=1", 19),
    ("cutout:base=exp:A=1,delta=0", 26),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(SpecParseError) as info:
        make_spec(text)
    assert info.value.position == pos
    assert f"at position {pos}" in str(info.value)


def test_nested_cutout_rejected():
    with pytest.raises(SpecParseError):
        make_spec("cutout:base=cutout:base=sin,delta=1,delta=1")


def test_cutout_behaviour():
    f = cutout(make_spec("exp:A=1"), 0.5).at(1.0)
    assert f(1.2) == 0.0
    assert f(1.6) == pytest.approx(math.exp(1.6))
    assert f.derivative(1, 1.1) == 0.0
    with pytest.raises(DomainError):
        f.derivative(1, 1.5)
    with pytest.raises(DomainError):
        cutout(make_spec("sin"), 0.5)(1.0)  # unbound


def test_jet_rejects_cutout_and_bad_point():
    with pytest.raises(DomainError):
        jet_of(make_spec("cutout:base=sin,delta=1"), 1.0, 2)
    with pytest.raises(DomainError):
        DerivativeJet(0.0, (1.0,))
    with pytest.raises(DomainError):
        DerivativeJet(1.0, (math.nan,))


def test_growth_constants():
    assert make_spec("exp:A=2").growth_A == 2
    assert make_spec("exp:A=-1").growth_A == 0
    assert make_spec("sin").growth_A == 0


@given(st.floats(0.05, 3.0), st.floats(0.0, 3.0), st.integers(10, 200))
def test_trig_closed_forms_are_bounded(x, beta, n):
    for name in ("sin", "cos"):
        v = make_spec(name).closed_form_image(n, beta, x)
        assert abs(v) <= 1.0 + 1e-12


def test_poly_closed_form_uses_moments():
    f = make_spec("poly:1,0,1")
    n, b, x = 10.0, 2.0, 1.5
    want = 1 + x**2 + (x**2 + 2 * b * x**3) / n + (2 * b * x**3 + b**2 * x**4) / n**2
    assert f.closed_form_image(n, b, x) == pytest.approx(want, rel=1e-15)
