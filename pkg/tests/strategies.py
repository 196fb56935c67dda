"""Shared hypothesis strategies."""
from fractions import Fraction

from hypothesis import strategies as st

small_int = st.integers(min_value=-4, max_value=4)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def int_matrix(rows, cols, elements=small_int):
    return st.lists(st.lists(elements, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def square_matrix(draw, max_n=4, elements=rationals):
    n = draw(st.integers(1, max_n))
    return draw(st.lists(st.lists(elements, min_size=n, max_size=n), min_size=n, max_size=n))


def frac(x):
    return Fraction(x)
