from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from algclt.scalars import (
    GaussianRational,
    QPoly,
    RootNScaled,
    approx,
    exact_modulus,
    format_exact,
    gauss,
    parse_scalar,
)

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=20)
gaussians = st.builds(gauss, rationals, rationals)


def test_parse_rational_and_gaussian():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("1/2+3/4i") == gauss(Fraction(1, 2), Fraction(3, 4))
    assert parse_scalar("-i") == gauss(0, -1)
    with pytest.raises(TypeError):
        parse_scalar(0.5)


def test_gauss_collapses_to_fraction():
    assert isinstance(gauss(2, 0), Fraction)


@given(gaussians, gaussians)
def test_gaussian_field_identities(a, b):
    assert (a + b) - b == a
    assert a * b == b * a
    if b != 0:
        assert (a / b) * b == a


@given(gaussians)
def test_roundtrip_format(a):
    assert parse_scalar(format_exact(a)) == a


def test_modulus_and_approx():
    assert exact_modulus(gauss(3, 4)) == 5
    assert approx(gauss(1, -2)) == [1.0, -2.0]
    assert isinstance(exact_modulus(gauss(1, 1)), float)


def test_qpoly_arithmetic():
    q = QPoly.q()
    assert QPoly.q_integer(3) == 1 + q + q * q
    assert str((1 + q) * (1 + q)) == "1 + 2*q + q^2"
    assert (2 + q)(Fraction(1, 2)) == Fraction(5, 2)


def test_root_n_scaled():
    x = RootNScaled(Fraction(3), 4)
    assert float(x) == 1.5
    assert str(x) == "3/sqrt(4)"
    assert RootNScaled(Fraction(0), 3) == 0
