"""Exact two-phase primal simplex over the rationals with Bland's rule.

The general entry point solves

    min c^T x + c0   s.t.  Aeq x = beq,  G x <= h,  x free

and returns multipliers in the convention ``c = Aeq^T lam_eq - G^T lam_ineq``
with ``lam_ineq >= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArgumentError
from .exactnum import as_rational, dot

ZERO = Fraction(0)


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    x: tuple | None = None
    z: Fraction | None = None
    lam_eq: tuple | None = None
    lam_ineq: tuple | None = None
    basis: tuple = ()
    ray: tuple | None = None  # unbounded: direction d with c^T d < 0
    farkas: dict | None = None  # infeasible: {"y_eq", "y_ineq"}
    pivots: int = 0


def _vec(v):
    return [as_rational(x) for x in v]


class _Tableau:
    """Dense tableau ``T x = rhs`` kept in canonical form for the current basis."""

    def __init__(self, rows, rhs, ncols):
        self.rows = rows
        self.rhs = rhs
        self.ncols = ncols
        self.basis = [None] * len(rows)
        self.pivots = 0

    def pivot(self, r, j):
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            inv = 1 / piv
            self.rows[r] = row = [v * inv for v in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[j]
            if f:
                self.rows[i] = [a - f * b if b else a for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost):
        red = list(cost)
        for i, j in enumerate(self.basis):
            cb = cost[j]
            if cb:
                red = [a - cb * b if b else a for a, b in zip(red, self.rows[i])]
        return red

    def objective(self, cost):
        return sum((cost[j] * self.rhs[i] for i, j in enumerate(self.basis)), ZERO)

    def run(self, cost, allowed):
        """Bland's rule.  Returns None at optimality or the unbounded entering column."""
        while True:
            red = self.reduced_costs(cost)
            enter = next((j for j in range(self.ncols) if allowed[j] and red[j] < 0), None)
            if enter is None:
                return None, red
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return enter, red
            self.pivot(best[1], enter)


def solve_lp_general(c, Aeq=(), beq=(), G=(), h=(), c0=0) -> LPResult:
    c = _vec(c)
    n = len(c)
    Aeq = [_vec(r) for r in Aeq]
    G = [_vec(r) for r in G]
    beq, h = _vec(beq), _vec(h)
    me, mi = len(Aeq), len(G)
    m = me + mi
    # columns: x+ (n), x- (n), slacks (mi), artificials (m)
    n_struct = 2 * n + mi
    ncols = n_struct + m
    rows, rhs, sign = [], [], []
    for i in range(m):
        base = Aeq[i] if i < me else G[i - me]
        slack = [ZERO] * mi
        if i >= me:
            slack[i - me] = Fraction(1)
        r = base + [-v for v in base] + slack
        b = beq[i] if i < me else h[i - me]
        s = -1 if b < 0 else 1
        if s < 0:
            r, b = [-v for v in r], -b
        art = [ZERO] * m
        art[i] = Fraction(1)
        rows.append(r + art)
        rhs.append(b)
        sign.append(s)
    tab = _Tableau(rows, rhs, ncols)
    for i in range(m):
        tab.basis[i] = n_struct + i

    # phase 1
    cost1 = [ZERO] * n_struct + [Fraction(1)] * m
    allowed = [True] * ncols
    tab.run(cost1, allowed)
    red1 = tab.reduced_costs(cost1)
    if tab.objective(cost1) > 0:
        y = [sign[i] * (1 - red1[n_struct + i]) for i in range(m)]
        return LPResult("infeasible", farkas={"y_eq": tuple(y[:me]), "y_ineq": tuple(y[me:])}, pivots=tab.pivots)

    # drive zero-level artificials out where a structural pivot exists
    for i in range(m):
        if tab.basis[i] >= n_struct:
            j = next((j for j in range(n_struct) if tab.rows[i][j] != 0), None)
            if j is not None:
                tab.pivot(i, j)

    cost2 = c + [-v for v in c] + [ZERO] * mi + [ZERO] * m
    allowed = [True] * n_struct + [False] * m
    enter, red = tab.run(cost2, allowed)
    if enter is not None:
        d = [ZERO] * ncols
        d[enter] = Fraction(1)
        for i, j in enumerate(tab.basis):
            d[j] = -tab.rows[i][enter]
        ray = tuple(d[k] - d[n + k] for k in range(n))
        return LPResult("unbounded", ray=ray, pivots=tab.pivots)

    full = [ZERO] * ncols
    for i, j in enumerate(tab.basis):
        full[j] = tab.rhs[i]
    x = tuple(full[k] - full[n + k] for k in range(n))
    y = [sign[i] * -red[n_struct + i] for i in range(m)]
    z = dot(c, x) + as_rational(c0)
    return LPResult(
        "optimal",
        x=x,
        z=z,
        lam_eq=tuple(y[:me]),
        lam_ineq=tuple(-v for v in y[me:]),
        basis=tuple(tab.basis),
        pivots=tab.pivots,
    )


def check_kkt(res: LPResult, c, Aeq, beq, G, h) -> bool:
    """Primal feasibility, stationarity, sign and complementary slackness, all exact."""
    c, beq, h = _vec(c), _vec(beq), _vec(h)
    x = res.x
    if any(dot(_vec(r), x) != b for r, b in zip(Aeq, beq)):
        return False
    slack = [hv - dot(_vec(r), x) for r, hv in zip(G, h)]
    if any(s < 0 for s in slack):
        return False
    if any(l < 0 for l in res.lam_ineq):
        return False
    if any(l * s != 0 for l, s in zip(res.lam_ineq, slack)):
        return False
    for j in range(len(c)):
        g = sum((res.lam_eq[i] * as_rational(Aeq[i][j]) for i in range(len(Aeq))), ZERO)
        g -= sum((res.lam_ineq[i] * as_rational(G[i][j]) for i in range(len(G))), ZERO)
        if g != c[j]:
            return False
    return True


@dataclass
class RelaxationSolution:
    status: str
    x_star: tuple | None
    z: Fraction | None
    basis: tuple = ()
    lambda_A: tuple | None = None
    lambda_E: tuple | None = None
    lambda_box: tuple | None = None
    certificate: dict | None = field(default=None)


def solve_lp(inst, relax_integrality: bool = True, use_box: bool = True) -> RelaxationSolution:
    """Continuous relaxation of a linear-objective instance (box rows added when M is set)."""
    if inst.kind != "linear":
        raise ArgumentError("solve_lp needs a linear objective")
    if not relax_integrality and inst.integer:
        from .mipsolve import solve_mip

        sol = solve_mip(inst)
        return RelaxationSolution(sol.status, sol.x, sol.z)
    G, h = (inst.ineq_with_box() if use_box else (inst.E, inst.f_rhs))
    res = solve_lp_general(inst.objective.c, list(inst.A), inst.b, list(G), h, inst.objective.const)
    if res.status == "infeasible":
        return RelaxationSolution("infeasible", None, None, certificate=res.farkas)
    if res.status == "unbounded":
        return RelaxationSolution("unbounded", None, None, certificate={"ray": res.ray})
    p = inst.p
    return RelaxationSolution(
        "optimal", res.x, res.z, res.basis, res.lam_eq, res.lam_ineq[:p], res.lam_ineq[p:]
    )
