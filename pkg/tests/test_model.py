from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sharpald import corpus
from sharpald.errors import InstanceError, Undecidable, Unsupported
from sharpald.mipsolve import solve_mip
from sharpald.model import (Residual, check_recession_condition, make_instance, psd_certificate, residual,
                            to_standard_form, validate)
from sharpald.ratlinalg import RatMatrix


def milp_raw():
    return {"name": "m", "n": 2, "A": [[1, 1]], "b": ["3/2"], "E": [[1, 0]], "f": [1],
            "integer_indices": [0], "objective": {"kind": "linear", "c": [-1, 0]}}


def test_validate_well_formed():
    inst = validate(milp_raw())
    assert (inst.n, inst.m, inst.p, inst.n1) == (2, 1, 1, 1)
    assert inst.b == (Fraction(3, 2),)


def test_validate_reports_paths():
    raw = milp_raw()
    raw["A"] = [[1, 1, 1]]
    raw["objective"] = {"kind": "quadratic", "c": [0, 0], "Q": [[1, 0], [0, -1]]}
    with pytest.raises(InstanceError) as info:
        validate(raw)
    paths = [p for p, _ in info.value.violations]
    assert "A[0]" in paths and "objective.Q" in paths


def test_validate_requires_M_for_quadratic_paths():
    raw = milp_raw()
    validate(raw, require_M=True)  # linear objectives never need M
    raw["objective"] = {"kind": "quadratic", "c": [0, 0], "Q": [[2, 0], [0, 2]]}
    with pytest.raises(InstanceError):
        validate(raw, require_M=True)


def test_psd_certificate():
    assert psd_certificate(RatMatrix([[2, 1], [1, 2]]))[0]
    assert not psd_certificate(RatMatrix([[1, 2], [2, 1]]))[0]
    assert psd_certificate(RatMatrix([[1, 1], [1, 1]]))[0]


def test_residual_examples():
    inst = make_instance(A=[[1, 1]], b=[2], c=[0, 0])
    assert residual(inst, [0, 0]).u == (2,)
    assert residual(inst, [1, 1]).u == (0,)
    assert isinstance(residual(inst, [1, 0]), Residual)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=2, max_size=2))
def test_residual_matches_product(x):
    inst = corpus.inst_a()
    u = residual(inst, x).u
    assert u == tuple(b - a for b, a in zip(inst.b, inst.A @ x))
    assert (u == (0,)) == (x[0] + x[1] == 2)


def test_standard_form_split_and_slack():
    # one inequality, one free continuous variable
    inst = make_instance(A=[[1, 1]], b=[1], E=[[1, -1], [-1, 0]], f=[3, 0], integer=[0], c=[1, 1], M=3)
    std = to_standard_form(inst)
    assert std.n_slack == 1
    assert std.instance.n == 4  # x_I, x_C+, x_C-, slack
    assert solve_mip(std.instance).z == solve_mip(inst).z


def test_standard_form_identity():
    inst = make_instance(A=[[1, 1]], b=[2], E=[[-1, 0], [0, -1]], f=[0, 0], integer=[0], c=[1, 0])
    std = to_standard_form(inst)
    assert std.identity or std.instance.n == inst.n


def test_standard_form_quadratic_block():
    std = to_standard_form(corpus.inst_c())
    Q = std.instance.objective.Q
    # integer stays free, the continuous variable splits into (+, -)
    assert [list(r) for r in Q] == [[2, 0, 0], [0, 2, -2], [0, -2, 2]]


def test_standard_form_rejects_oracle():
    with pytest.raises(Unsupported):
        to_standard_form(corpus.norm_sq_oracle())


@pytest.mark.parametrize("seed", range(8))
def test_standard_form_preserves_value(seed):
    for inst in (corpus.random_pure_integer(seed), corpus.random_milp(seed), corpus.random_miqp(seed)):
        std = to_standard_form(inst)
        a, b = solve_mip(inst), solve_mip(std.instance)
        assert a.status == b.status and a.z == b.z
        if b.x is not None:
            assert inst.is_feasible_point(std.recover(b.x))


def test_recession_bounded_polytope_holds():
    assert check_recession_condition(corpus.inst_a()).holds


def test_recession_orthant_fails_with_certificate():
    inst = make_instance(E=[[-1, 0], [0, -1]], f=[0, 0], c=[0, 0], n=2)
    cert = check_recession_condition(inst)
    assert not cert.holds
    d = cert.direction
    assert sum(abs(v) for v in d) == 1
    assert all(v >= 0 for v in d)


def test_recession_strongly_convex_holds():
    inst = make_instance(E=[[-1, 0]], f=[0], c=[0, 0], Q=[[2, 0], [0, 2]], n=2)
    assert check_recession_condition(inst).holds
    assert check_recession_condition(corpus.norm_sq_oracle()).holds


def test_recession_oracle_needs_attestation():
    inst = make_instance(A=[[1, 1]], b=[1], n=2, oracle="linear", oracle_params={"coef": [1, 1]})
    with pytest.raises(Undecidable):
        check_recession_condition(inst)
    attested = make_instance(A=[[1, 1]], b=[1], n=2, oracle="linear", oracle_params={"coef": [1, 1]},
                             attest_recession=True)
    assert check_recession_condition(attested).attested
