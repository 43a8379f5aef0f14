"""Model context and rational parsing."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bssym.model import ModelContext, format_rational, make_context, parse_rational

rationals = st.fractions(
    min_value=Fraction(-1000), max_value=Fraction(1000), max_denominator=1000
)
positive_rationals = st.fractions(
    min_value=Fraction(1, 1000), max_value=Fraction(1000), max_denominator=1000
)


def test_parse_rational_basic():
    assert parse_rational("1/20") == Fraction(1, 20)
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("7") == Fraction(7)
    assert parse_rational(" 2 / 50 ") == Fraction(1, 25)


@pytest.mark.parametrize("bad", ["1/0", "", "a/b", "1/2/3", "1.5", "0x3"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


@given(rationals)
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_format_rational_style():
    assert format_rational(Fraction(1, 20)) == "1/20"
    assert format_rational(Fraction(5)) == "5"
    assert format_rational(Fraction(-49, 800)) == "-49/800"


@given(rationals, positive_rationals)
def test_drift_identities(r, sigma2):
    ctx = make_context(r, sigma2)
    # the shifted drifts bracket the rate symmetrically
    assert ctx.rtilde == r - sigma2 / 2
    assert ctx.stilde == r + sigma2 / 2
    assert ctx.rtilde + ctx.sigma2 / 2 == ctx.r
    assert ctx.stilde - ctx.rtilde == ctx.sigma2


def test_default_context_values():
    ctx = make_context(Fraction(1, 20), Fraction(1, 25))
    assert ctx.rtilde == Fraction(3, 100)
    assert ctx.stilde == Fraction(7, 100)
    # squared Sharpe-like ratio used by the quadratic flow prefactor
    assert ctx.stilde**2 / (2 * ctx.sigma2) == Fraction(49, 800)


def test_context_float_views():
    ctx = make_context(Fraction(1, 20), Fraction(1, 25))
    assert ctx.r_f == 0.05
    assert ctx.sigma2_f == 0.04
    assert math.isclose(ctx.sigma_f, 0.2)
    assert ctx.rtilde_f == 0.03


def test_sigma2_must_be_positive():
    with pytest.raises(ValueError):
        make_context(Fraction(1, 20), Fraction(0))
    with pytest.raises(ValueError):
        make_context(Fraction(1, 20), Fraction(-1, 4))


def test_context_accepts_strings():
    ctx = make_context("1/20", "1/25")
    assert isinstance(ctx, ModelContext)
    assert ctx.r == Fraction(1, 20)


def test_context_json_uses_rational_strings():
    obj = make_context("1/20", "1/25").to_json()
    assert obj["r"] == "1/20"
    assert obj["sigma2"] == "1/25"
    assert obj["rtilde"] == "3/100"
