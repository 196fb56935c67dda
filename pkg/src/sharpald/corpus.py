"""Named reference instances and seeded random generators for desk-scale experiments."""
from __future__ import annotations

import random
from fractions import Fraction

from .model import ProblemInstance, make_instance


def inst_a() -> ProblemInstance:
    """min -x1 s.t. x1 + x2 = 2, 2 x1 <= 3, x in Z^2_+ (box M = 3 for enumeration)."""
    return make_instance(A=[[1, 1]], b=[2], E=[[2, 0], [-1, 0], [0, -1]], f=[3, 0, 0],
                         integer=[0, 1], c=[-1, 0], M=3, name="INST-A")


def inst_b() -> ProblemInstance:
    """min -x1 s.t. x1 + x2 = 3/2, x1 <= 1, x1 in Z_+, x2 >= 0."""
    return make_instance(A=[[1, 1]], b=["3/2"], E=[[1, 0], [-1, 0], [0, -1]], f=[1, 0, 0],
                         integer=[0], c=[-1, 0], M=2, name="INST-B")


def inst_c() -> ProblemInstance:
    """min x_I^2 + x_C^2 s.t. x_I + x_C = 1, |x_I| <= 2."""
    return make_instance(A=[[1, 1]], b=[1], integer=[0], c=[0, 0], Q=[[2, 0], [0, 2]], M=2, name="INST-C")


def threshold_one() -> ProblemInstance:
    """Two-point value function: phi(0) = 0, phi(-1) = -1, so the sharp penalty closes exactly at rho = 1."""
    return make_instance(A=[[-1]], b=[0], E=[[1], [-1]], f=[1, 0], integer=[0], c=[-1], M=1,
                         name="threshold-one")


def asymptotic_instance() -> ProblemInstance:
    """min -x1 - x2 s.t. x1 + x2 = 3/2, x1 <= 1, x1 in Z_+, 0 <= x2 <= 10.

    phi(u) = -3/2 - u near 0, so the squared-l2 relaxation gap is 1/(4 rho).
    """
    return make_instance(A=[[1, 1]], b=["3/2"], E=[[1, 0], [-1, 0], [0, -1], [0, 1]], f=[1, 0, 0, 10],
                         integer=[0], c=[-1, -1], name="asymptotic")


def asymptotic_gap(rho) -> Fraction:
    """Closed-form gap of :func:`asymptotic_instance` (valid for rho >= 1/19)."""
    return 1 / (4 * Fraction(rho))


def norm_sq_quadratic(rhs="3/2", M: int = 2) -> ProblemInstance:
    return make_instance(A=[[1, 1]], b=[rhs], integer=[0], c=[0, 0], Q=[[2, 0], [0, 2]], M=M,
                         name=f"normsq-quadratic-{rhs}")


def norm_sq_oracle(rhs="3/2", M: int = 2) -> ProblemInstance:
    return make_instance(A=[[1, 1]], b=[rhs], integer=[0], n=2, oracle="sum_of_squares", M=M,
                         name=f"normsq-oracle-{rhs}")


def _ints(rng, k, lo, hi):
    return [rng.randint(lo, hi) for _ in range(k)]


def _nonzero_row(rng, n, lo=-2, hi=2):
    while True:
        row = _ints(rng, n, lo, hi)
        if any(row):
            return row


def random_pure_integer(seed: int) -> ProblemInstance:
    """Bounded pure-integer program with n <= 4, M <= 3 and integral data, feasible by construction."""
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    M = rng.randint(1, 3)
    m = rng.randint(1, 2)
    x0 = _ints(rng, n, -M, M)
    A = [_nonzero_row(rng, n) for _ in range(m)]
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    E, f = [], []
    if rng.random() < 0.5:
        row = _nonzero_row(rng, n)
        E.append(row)
        f.append(sum(a * x for a, x in zip(row, x0)) + rng.randint(0, 2))
    c = _ints(rng, n, -3, 3)
    return make_instance(A=A, b=b, E=E, f=f, integer=range(n), c=c, M=M, n=n, name=f"pure-{seed}")


def random_milp(seed: int) -> ProblemInstance:
    """One or two integer variables plus two bounded nonnegative continuous ones; rational right-hand sides."""
    rng = random.Random(seed)
    n1 = rng.randint(1, 2)
    n = n1 + 2
    M = 2
    x0 = [Fraction(v) for v in _ints(rng, n1, -M, M)] + [Fraction(rng.randint(0, 6), 2) for _ in range(2)]
    m = rng.randint(1, 2)
    A = [_ints(rng, n1, -2, 2) + _nonzero_row(rng, 2, -2, 2) for _ in range(m)]
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    E, f = [], []
    for j in range(n1, n):
        lo, hi = [0] * n, [0] * n
        lo[j], hi[j] = -1, 1
        E += [lo, hi]
        f += [0, 4]
    c = _ints(rng, n, -3, 3)
    return make_instance(A=A, b=b, E=E, f=f, integer=range(n1), c=c, M=M, n=n, name=f"milp-{seed}")


def random_miqp(seed: int) -> ProblemInstance:
    """n1 <= 2 integer variables, one continuous; Q positive definite diagonal plus a rank-one coupling."""
    rng = random.Random(seed)
    n1 = rng.randint(1, 2)
    n = n1 + 1
    M = rng.randint(1, 2)
    d = _ints(rng, n, 1, 3)
    v = _ints(rng, n, -1, 1)
    Q = [[2 * (d[i] if i == j else 0) + 2 * v[i] * v[j] for j in range(n)] for i in range(n)]
    x0 = _ints(rng, n1, -M, M) + [rng.randint(-2, 2)]
    A = [_ints(rng, n1, -2, 2) + [rng.choice([-1, 1, 2])]]
    b = [sum(a * x for a, x in zip(A[0], x0))]
    c = _ints(rng, n, -3, 3)
    return make_instance(A=A, b=b, integer=range(n1), c=c, Q=Q, M=M, n=n, name=f"miqp-{seed}")


def picp_corpus(seed: int = 0, count: int = 12) -> list:
    return [inst_a()] + [random_pure_integer(seed * 1000 + k) for k in range(count)]


def milp_corpus(seed: int = 0, count: int = 5) -> list:
    return [inst_b()] + [random_milp(seed * 1000 + k) for k in range(count)]


def miqp_corpus(seed: int = 0, count: int = 3) -> list:
    return [inst_c()] + [random_miqp(seed * 1000 + k) for k in range(count)]


def full_corpus(seed: int = 0) -> list:
    return (picp_corpus(seed, 6) + milp_corpus(seed, 4) + miqp_corpus(seed, 3)
            + [threshold_one(), norm_sq_quadratic()])
