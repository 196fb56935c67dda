"""Exact rational scalars and the number-theoretic helpers used by the penalty constants.

Rationals are :class:`fractions.Fraction` values.  ``Fraction`` already keeps
every value in lowest terms with a positive denominator, which is exactly the
canonical form the rest of the package relies on.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import ArgumentError

Rational = Fraction

DEFAULT_SLACK = Fraction(1, 10**6)

NORMS = ("l1", "l2", "linf")


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions, decimal strings and "p/q" strings to a Fraction.

    Floats are rejected: silently importing a binary float would defeat the
    purpose of exact arithmetic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ArgumentError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ArgumentError(f"cannot parse rational {value!r}") from exc
    if isinstance(value, float):
        raise ArgumentError(f"float {value!r} is not an exact rational; pass a string")
    raise ArgumentError(f"cannot interpret {value!r} as a rational")


def format_rational(r: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text) -> Fraction:
    return as_rational(text)


def denom(r: Fraction) -> int:
    # Fraction is always reduced and Fraction(0) == 0/1, so both cases collapse.
    return Fraction(r).denominator


def lcm_list(xs: Iterable[int]) -> int:
    xs = list(xs)
    if not xs:
        raise ArgumentError("lcm_list needs at least one element")
    for x in xs:
        if int(x) != x or x < 1:
            raise ArgumentError(f"lcm_list expects positive integers, got {x!r}")
    return reduce(math.lcm, (int(x) for x in xs))


def _exact_sqrt(r: Fraction):
    p, q = r.numerator, r.denominator
    sp, sq = math.isqrt(p), math.isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return None


def sqrt_upper(r, slack=DEFAULT_SLACK) -> Fraction:
    """Rational ``s`` with ``s >= sqrt(r)`` and ``s**2 <= r * (1 + slack)**2``."""
    r = as_rational(r)
    slack = as_rational(slack)
    if r < 0:
        raise ArgumentError(f"sqrt_upper of negative value {r}")
    if slack <= 0:
        raise ArgumentError("slack must be positive")
    if r == 0:
        return Fraction(0)
    exact = _exact_sqrt(r)
    if exact is not None:
        return exact
    limit = r * (1 + slack) ** 2
    bits = 8
    while True:
        q = 1 << bits
        t = r * q * q
        n = -((-t.numerator) // t.denominator)  # ceil
        s = math.isqrt(n)
        if s * s < n:
            s += 1
        cand = Fraction(s, q)
        if cand * cand <= limit:
            return cand
        bits *= 2


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ArgumentError("dot product of vectors with different lengths")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def dual_norm_name(norm: str) -> str:
    return {"l1": "linf", "linf": "l1", "l2": "l2"}[check_norm(norm)]


def check_norm(norm: str) -> str:
    if norm not in NORMS:
        raise ArgumentError(f"unknown norm {norm!r}; expected one of {NORMS}")
    return norm


def norm_sq_l2(v: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(x) * x for x in v), Fraction(0))


def norm_upper(v: Sequence[Fraction], norm: str, slack=DEFAULT_SLACK) -> Fraction:
    """Exact for l1 and linf, a rational over-estimate for l2."""
    check_norm(norm)
    if norm == "l1":
        return sum((abs(Fraction(x)) for x in v), Fraction(0))
    if norm == "linf":
        return max((abs(Fraction(x)) for x in v), default=Fraction(0))
    return sqrt_upper(norm_sq_l2(v), slack)


def dual_norm_upper(v: Sequence[Fraction], norm: str, slack=DEFAULT_SLACK) -> Fraction:
    """Upper bound on the dual norm of ``v`` with respect to the penalty norm ``norm``."""
    return norm_upper(v, dual_norm_name(norm), slack)


def l2_to_norm_factor(norm: str, dim: int, slack=DEFAULT_SLACK) -> Fraction:
    """Upper bound on sup ||u||_2 / ||u|| over nonzero u of length ``dim``.

    The same number bounds sup ||v||_* / ||v||_2, so it converts any
    Euclidean Cauchy-Schwarz estimate into one valid for ``norm``.
    """
    check_norm(norm)
    if norm in ("l1", "l2") or dim <= 1:
        return Fraction(1)
    return sqrt_upper(Fraction(dim), slack)
