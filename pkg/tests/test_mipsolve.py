import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sharpald import corpus
from sharpald.errors import ArgumentError, Unsupported
from sharpald.mipsolve import solve_alr, solve_by_enumeration, solve_mip, solve_salr
from sharpald.valuefn import salr_oracle

from oracles import mip_box_min


def test_reference_optima():
    a = solve_mip(corpus.inst_a())
    assert (a.z, a.x) == (-1, (1, 1))
    b = solve_mip(corpus.inst_b())
    assert (b.z, b.x) == (-1, (1, Fraction(1, 2)))
    c = solve_mip(corpus.inst_c())
    assert c.z == 1 and c.x[0] in (0, 1)


def test_infeasible_and_unbounded():
    inf = corpus.make_instance(A=[[2]], b=[1], integer=[0], c=[1], M=3)
    assert solve_mip(inf).status == "infeasible"
    unb = corpus.make_instance(E=[[-1, 0]], f=[0], integer=[0], c=[0, -1], n=2)
    assert solve_mip(unb).status == "unbounded"


@pytest.mark.parametrize("make", [corpus.random_pure_integer, corpus.random_milp, corpus.random_miqp])
@pytest.mark.parametrize("seed", range(6))
def test_branch_and_bound_matches_box_exhaustion(make, seed):
    inst = make(seed)
    bb = solve_mip(inst)
    assert bb.z == mip_box_min(inst)
    assert bb.z == solve_by_enumeration(inst).z


def test_salr_examples():
    A = corpus.inst_a()
    assert solve_salr(A, 1, "l1").z == -1
    with pytest.raises(Unsupported):
        solve_salr(A, 1, "l2")
    with pytest.raises(ArgumentError):
        solve_salr(A, 0)


def test_alr_matches_enumeration():
    A = corpus.inst_a()
    best = min(-x1 + (2 - x1 - x2) + abs(2 - x1 - x2)
               for x1, x2 in itertools.product(range(4), repeat=2) if 2 * x1 <= 3)
    assert solve_alr(A, [1], 1, "l1").z == best


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.fractions(min_value=Fraction(1, 8), max_value=4, max_denominator=8))
def test_salr_equals_value_function_minimum(seed, rho):
    inst = corpus.random_pure_integer(seed)
    exact = solve_salr(inst, rho, "l1")
    orc = salr_oracle(inst, rho, "l1")
    assert orc.certified
    assert exact.z == orc.value


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.sampled_from(["l1", "linf"]))
def test_salr_residual_is_consistent(seed, norm):
    inst = corpus.random_milp(seed)
    res = solve_salr(inst, 2, norm)
    if res.status == "optimal":
        fx = sum(c * v for c, v in zip(inst.objective.c, res.x))
        pen = sum(abs(v) for v in res.u) if norm == "l1" else max(abs(v) for v in res.u)
        assert res.z == fx + 2 * pen
