from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sharpald.cvxsub import gradient_check, solve_qp, solve_smooth
from sharpald.errors import Unconverged
from sharpald.model import Objective
from sharpald.oracles import REGISTRY, make_oracle

from oracles import qp_min

small = st.integers(-3, 3)


@st.composite
def bounded_qp(draw):
    n = draw(st.integers(1, 3))
    L = draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))
    Q = [[sum(L[k][i] * L[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    c = draw(st.lists(small, min_size=n, max_size=n))
    Aeq = draw(st.lists(st.lists(small, min_size=n, max_size=n), max_size=1))
    beq = draw(st.lists(small, min_size=len(Aeq), max_size=len(Aeq)))
    extra = draw(st.lists(st.lists(small, min_size=n, max_size=n), max_size=6 - 2 * n))
    G = extra + [[int(i == j) for j in range(n)] for i in range(n)] + [[-int(i == j) for j in range(n)] for i in range(n)]
    h = draw(st.lists(st.integers(0, 3), min_size=len(G), max_size=len(G)))
    return Q, c, Aeq, beq, G, h


@given(bounded_qp())
def test_qp_matches_face_enumeration(data):
    Q, c, Aeq, beq, G, h = data
    res = solve_qp(Q, c, Aeq, beq, G, h)
    oracle = qp_min(Q, c, Aeq, beq, G, h)
    assert res.status != "unbounded"  # the box rows bound every variable
    if oracle is None:
        assert res.status == "infeasible"
    else:
        assert res.status == "optimal" and res.z == oracle
        assert res.kkt.verify(Q, c, Aeq, beq, G, h)


def test_qp_examples():
    # INST-C continuous piece at x_I = 1: min x_C^2 + 1 with x_C = 0
    res = solve_qp([[2]], [0], [[1]], [0], c0=1)
    assert res.z == 1 and res.x == (0,)
    assert solve_qp([[0]], [-1], [], [], [[-1]], [0]).status == "unbounded"
    assert solve_qp([[2]], [0], [[1]], [1], [[1]], [0]).status == "infeasible"


def test_smooth_norm_squared():
    obj = Objective("oracle", (Fraction(0), Fraction(0)), None, Fraction(0), make_oracle("sum_of_squares", 2),
                    (0, 1), (0.0, 0.0))
    res = solve_smooth(obj, [[1, 0]], [1], [[-1, 0], [0, -1]], [0, 0])
    assert abs(res.z - 1) <= 1e-6
    assert np.allclose(res.x, [1, 0], atol=1e-6)
    assert res.gap_bound <= 1e-8


def test_smooth_iteration_cap():
    obj = Objective("oracle", (Fraction(0),), None, Fraction(0),
                    make_oracle("logistic_ridge", 1, {"ridge": 0.001, "slopes": [1.0]}), (0,), (0.0,))
    with pytest.raises(Unconverged):
        solve_smooth(obj, [], [], [[1]], [100], tol=1e-14, max_iter=3, x0=[50.0])


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_registered_oracles_gradient(name):
    rng = np.random.default_rng(7)
    fn = make_oracle(name, 3)
    pts = rng.normal(size=(10, 3))
    assert gradient_check(fn, pts) <= 1e-5
