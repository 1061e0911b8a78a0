from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symindex.scalars import (
    PrecisionError,
    Scalar,
    detect_rational,
    floor_E_frac_phi,
    get_precision,
    parse_scalar,
    scalar_from_json,
    scalar_to_json,
    set_precision,
)


def test_floor_E_frac_phi_integer():
    assert floor_E_frac_phi(1) == (1, 1, 0, 0)


def test_floor_E_frac_phi_five_fourths():
    assert floor_E_frac_phi(Fraction(5, 4)) == (1, 2, Fraction(1, 4), 1)


def test_floor_E_frac_phi_negative_half():
    fl, ce, fr, phi = floor_E_frac_phi(-0.5)
    assert (fl, ce, phi) == (-1, 0, 1)
    assert fr == Fraction(1, 2)


@given(st.fractions(max_denominator=10 ** 6))
@settings(max_examples=300, derandomize=True)
def test_floor_E_frac_phi_rational_consistency(x):
    fl, ce, fr, phi = floor_E_frac_phi(x)
    assert fl <= x <= ce
    assert ce - fl == phi
    assert phi in (0, 1)
    assert fr == x - fl
    assert (phi == 0) == (x.denominator == 1)


def test_floor_on_irrational_scalar():
    s2 = Scalar.sqrt(2)
    for m in (1, 5, 99, 12345):
        assert s2.mul_floor(m) == int(m * 2 ** 0.5)


def test_guard_band_detects_masked_rationals():
    # sqrt2/sqrt8 is exactly 1/2 but carries an irrational tag; doubling it
    # lands on an integer inside the guard band
    x = Scalar.sqrt(2) / Scalar.sqrt(8)
    assert not x.is_rational
    with pytest.raises(PrecisionError):
        x.mul_floor(2)


def test_sqrt_perfect_square_is_rational():
    assert Scalar.sqrt(4).is_rational
    assert Scalar.sqrt(4).fraction == 2
    assert Scalar.sqrt(Fraction(9, 4)).fraction == Fraction(3, 2)
    assert not Scalar.sqrt(2).is_rational


def test_tag_dispatch_in_equality():
    # equal values, different tags: never equal
    assert Scalar.rational(1, 2) != Scalar.sqrt(2) / Scalar.sqrt(8)


def test_arithmetic_tag_propagation():
    a = Scalar.rational(1, 3) + Scalar.rational(1, 6)
    assert a.is_rational and a.fraction == Fraction(1, 2)
    b = Scalar.sqrt(2) + Scalar.rational(1)
    assert not b.is_rational
    assert abs(float(b) - (2 ** 0.5 + 1)) < 1e-12


def test_detect_rational():
    assert detect_rational(Scalar.rational(2, 3)) == Fraction(2, 3)
    assert detect_rational(Scalar.sqrt(2)) is None
    assert detect_rational(Scalar.sqrt(2) / Scalar.sqrt(8)) == Fraction(1, 2)
    assert detect_rational(Scalar.golden() * 3 / Scalar.golden()) == 3


def test_parse_scalar_literals():
    assert parse_scalar("3/2").fraction == Fraction(3, 2)
    assert parse_scalar("2").fraction == 2
    assert parse_scalar("1.25").fraction == Fraction(5, 4)
    assert not parse_scalar("sqrt2").is_rational
    assert abs(float(parse_scalar("sqrt(3)")) - 3 ** 0.5) < 1e-12
    assert abs(float(parse_scalar("phi")) - (1 + 5 ** 0.5) / 2) < 1e-12
    with pytest.raises(ValueError):
        parse_scalar("noise")


def test_json_round_trip():
    r = Scalar.rational(7, 5)
    assert scalar_from_json(scalar_to_json(r)) == r
    s = Scalar.sqrt(3)
    back = scalar_from_json(scalar_to_json(s))
    assert not back.is_rational
    assert float(abs(s - back)) < 1e-90


def test_precision_bounds():
    old = get_precision()
    try:
        with pytest.raises(ValueError):
            set_precision(10)
        set_precision(60)
        assert get_precision() == 60
    finally:
        set_precision(old)
