import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sharpald.errors import ArgumentError
from sharpald.exactnum import (as_rational, denom, dual_norm_upper, format_rational, l2_to_norm_factor, lcm_list,
                               norm_upper, parse_rational, sqrt_upper)


def test_denom_examples():
    assert denom(Fraction(3, 6)) == 2
    assert denom(Fraction(0)) == 1
    assert denom(Fraction(-4, 2)) == 1


def test_lcm_examples():
    assert lcm_list([2, 3, 4]) == 12
    assert lcm_list([1]) == 1
    assert lcm_list([6, 10, 15]) == 30
    with pytest.raises(ArgumentError):
        lcm_list([])


@given(st.lists(st.integers(1, 40), min_size=1, max_size=5))
def test_lcm_matches_brute_force(xs):
    top = max(xs)
    brute = next(k for k in range(top, math.prod(xs) + 1, top) if all(k % x == 0 for x in xs))
    assert lcm_list(xs) == brute


def test_sqrt_upper_examples():
    s = sqrt_upper(4, Fraction(1, 100))
    assert 2 <= s <= Fraction(202, 100)
    assert sqrt_upper(0, Fraction(1, 100)) == 0
    s = sqrt_upper(2, Fraction(1, 1000))
    assert s * s >= 2 and s <= Fraction(1001, 1000) * Fraction(14143, 10000)
    with pytest.raises(ArgumentError):
        sqrt_upper(-1)


@given(st.fractions(min_value=0, max_value=10**6), st.fractions(min_value=Fraction(1, 10**9), max_value=1))
def test_sqrt_upper_bracket(r, slack):
    s = sqrt_upper(r, slack)
    assert s * s >= r
    assert s * s <= r * (1 + slack) ** 2


def test_rational_parsing_roundtrip():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert format_rational(Fraction(-7, 3)) == "-7/3"
    assert format_rational(Fraction(4)) == "4"
    with pytest.raises(ArgumentError):
        as_rational(0.5)
    with pytest.raises(ArgumentError):
        as_rational(True)


@given(st.fractions())
def test_format_parse_roundtrip(r):
    assert parse_rational(format_rational(r)) == r


@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=1, max_size=5))
def test_norms_and_duals_pair(v):
    # Hoelder: |v . w| <= ||v||_* ||w|| for w ranging over the signs of v
    w = [Fraction(1 if x >= 0 else -1) for x in v]
    for norm in ("l1", "l2", "linf"):
        lhs = sum(abs(x) for x in v)
        assert lhs <= dual_norm_upper(v, norm) * norm_upper(w, norm)


def test_norm_conversion_factor():
    assert l2_to_norm_factor("l1", 4) == 1
    assert l2_to_norm_factor("l2", 4) == 1
    assert l2_to_norm_factor("linf", 4) == 2
