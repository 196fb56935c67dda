"""Desk-scale mixed-integer solvers: branch-and-bound, box enumeration and SALR/ALR lifts."""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .cvxsub import DEFAULT_TOL, solve_qp, solve_smooth
from .errors import ArgumentError, ResourceLimit, Unsupported
from .exactnum import as_rational, dot
from .lpsolve import solve_lp_general
from .model import Objective, ProblemInstance
from .ratlinalg import RatMatrix

DEFAULT_NODE_CAP = 200_000
DEFAULT_ENUM_CAP = 1_000_000
ZERO = Fraction(0)


@dataclass
class MipSolution:
    status: str  # optimal | infeasible | unbounded
    z: Fraction | float | None
    x: tuple | None
    node_count: int = 0
    enumerated: int | None = None
    approximate: bool = False

    @property
    def z_IP(self):
        return self.z


def _relaxation(inst: ProblemInstance, lo: dict, hi: dict, warm=()):
    """Continuous relaxation with branching bounds; returns (status, z, x, active_set)."""
    G, h = inst.ineq_with_box()
    G, h = [list(r) for r in G], list(h)
    n = inst.n
    for j, v in sorted(lo.items()):
        G.append([Fraction(-int(k == j)) for k in range(n)])
        h.append(-v)
    for j, v in sorted(hi.items()):
        G.append([Fraction(int(k == j)) for k in range(n)])
        h.append(v)
    obj = inst.objective
    if obj.kind == "linear":
        res = solve_lp_general(obj.c, list(inst.A), inst.b, G, h, obj.const)
        return res.status, res.z, res.x, ()
    res = solve_qp(list(obj.Q), obj.c, list(inst.A), inst.b, G, h, obj.const, warm=warm)
    active = res.kkt.active_set if res.kkt else ()
    return res.status, res.z, res.x, active


def _most_fractional(x, integer):
    best, best_j = ZERO, None
    for j in integer:
        frac = x[j] - math.floor(x[j])
        dist = min(frac, 1 - frac)
        if dist > best:
            best, best_j = dist, j
    return best_j


def _branch_and_bound(inst: ProblemInstance, node_cap: int) -> MipSolution:
    status, z, x, active = _relaxation(inst, {}, {})
    if status == "infeasible":
        return MipSolution("infeasible", None, None, 1)
    if status == "unbounded":
        # a rational recession ray scales to an integral one, so any feasible point makes it unbounded
        feas = _branch_and_bound(zero_objective(inst), node_cap)
        return MipSolution("unbounded" if feas.status == "optimal" else "infeasible", None, None, feas.node_count + 1)
    counter = itertools.count()
    heap = [(z, next(counter), {}, {}, x, active)]
    best_z, best_x = None, None
    nodes = 1
    while heap:
        z, _, lo, hi, x, active = heapq.heappop(heap)
        if best_z is not None and z >= best_z:
            break  # best-bound order: nothing left can improve
        j = _most_fractional(x, inst.integer)
        if j is None:
            best_z, best_x = z, x
            continue
        fl = math.floor(x[j])
        for side in ("down", "up"):
            lo2, hi2 = dict(lo), dict(hi)
            if side == "down":
                hi2[j] = min(hi2.get(j, fl), fl)
            else:
                lo2[j] = max(lo2.get(j, fl + 1), fl + 1)
            if j in lo2 and j in hi2 and lo2[j] > hi2[j]:
                continue
            nodes += 1
            if nodes > node_cap:
                raise ResourceLimit(f"branch-and-bound exceeded node cap {node_cap}", nodes, node_cap)
            st, zc, xc, act = _relaxation(inst, lo2, hi2, warm=(active,))
            if st != "optimal":
                continue
            if best_z is not None and zc >= best_z:
                continue
            heapq.heappush(heap, (zc, next(counter), lo2, hi2, xc, act))
    if best_z is None:
        return MipSolution("infeasible", None, None, nodes)
    return MipSolution("optimal", best_z, tuple(best_x), nodes)


def zero_objective(inst: ProblemInstance) -> ProblemInstance:
    return replace(inst, objective=Objective("linear", tuple(ZERO for _ in range(inst.n))))


def enumerate_integer_points(inst: ProblemInstance, cap: int = DEFAULT_ENUM_CAP) -> list:
    """All x_I with ||x_I||_inf <= M, lexicographic."""
    if inst.M is None:
        raise ArgumentError("enumerating integer points needs the bound M")
    M = int(inst.M)
    count = (2 * M + 1) ** inst.n1
    if count > cap:
        raise ResourceLimit(f"{count} integer points exceed cap {cap}", count, cap)
    return [tuple(Fraction(v) for v in p) for p in itertools.product(range(-M, M + 1), repeat=inst.n1)]


@dataclass
class RestrictedSolution:
    x_I: tuple
    status: str
    z: Fraction | float | None
    x: tuple | None
    lambda_A: tuple | None = None
    lambda_E: tuple | None = None
    approximate: bool = False


def solve_restricted(inst: ProblemInstance, x_I, tol: float = DEFAULT_TOL) -> RestrictedSolution:
    """Continuous subproblem with the integer variables fixed at ``x_I``."""
    x_I = tuple(as_rational(v) for v in x_I) if inst.objective.exact else tuple(x_I)
    fixed = dict(zip(inst.integer, x_I))
    C = inst.continuous
    A_C = [[r[j] for j in C] for r in inst.A]
    b_r = [bi - sum((r[j] * v for j, v in fixed.items()), ZERO) for r, bi in zip(inst.A, inst.b)]
    E_C = [[r[j] for j in C] for r in inst.E]
    f_r = [fi - sum((r[j] * v for j, v in fixed.items()), ZERO) for r, fi in zip(inst.E, inst.f_rhs)]
    obj = inst.objective.restricted(fixed)

    def assemble(xc):
        full = [None] * inst.n
        for j, v in fixed.items():
            full[j] = v
        for k, j in enumerate(C):
            full[j] = xc[k]
        return tuple(full)

    if not C:
        ok = all(v == 0 for v in b_r) and all(v >= 0 for v in f_r)
        if not ok:
            return RestrictedSolution(x_I, "infeasible", math.inf, None)
        val = obj.value(())
        return RestrictedSolution(x_I, "optimal", val, assemble(()), (), (), not obj.exact)

    if obj.kind == "linear":
        res = solve_lp_general(obj.c, A_C, b_r, E_C, f_r, obj.const)
        if res.status != "optimal":
            return RestrictedSolution(x_I, res.status, math.inf if res.status == "infeasible" else -math.inf, None)
        return RestrictedSolution(x_I, "optimal", res.z, assemble(res.x), res.lam_eq, res.lam_ineq)
    if obj.kind == "quadratic":
        res = solve_qp(list(obj.Q), obj.c, A_C, b_r, E_C, f_r, obj.const)
        if res.status != "optimal":
            return RestrictedSolution(x_I, res.status, math.inf if res.status == "infeasible" else -math.inf, None)
        return RestrictedSolution(x_I, "optimal", res.z, assemble(res.x), res.kkt.lambda_A, res.kkt.lambda_E)
    feas = solve_lp_general([ZERO] * len(C), A_C, b_r, E_C, f_r)
    if feas.status != "optimal":
        return RestrictedSolution(x_I, "infeasible", math.inf, None)
    res = solve_smooth(obj, A_C, b_r, E_C, f_r, tol=tol, x0=feas.x)
    return RestrictedSolution(x_I, "optimal", res.z, assemble(tuple(res.x)), tuple(res.lambda_A),
                              tuple(res.lambda_E), approximate=True)


def solve_by_enumeration(inst: ProblemInstance, cap: int = DEFAULT_ENUM_CAP, tol: float = DEFAULT_TOL,
                         pmap=map, keep_all: bool = False):
    """Minimum over S_I of the restricted continuous optima (ties: lexicographically first x_I)."""
    points = enumerate_integer_points(inst, cap)
    results = list(pmap(lambda p: solve_restricted(inst, p, tol), points))
    best = None
    for r in results:
        if r.status == "unbounded":
            sol = MipSolution("unbounded", None, None, enumerated=len(points))
            return (sol, results) if keep_all else sol
        if r.status == "optimal" and (best is None or r.z < best.z):
            best = r
    if best is None:
        sol = MipSolution("infeasible", None, None, enumerated=len(points))
    else:
        sol = MipSolution("optimal", best.z, best.x, enumerated=len(points), approximate=best.approximate)
    return (sol, results) if keep_all else sol


def solve_mip(inst: ProblemInstance, node_cap: int = DEFAULT_NODE_CAP, enum_cap: int = DEFAULT_ENUM_CAP,
              tol: float = DEFAULT_TOL, pmap=map) -> MipSolution:
    """Exact optimum for linear/quadratic kinds; box enumeration with smooth subsolves for oracles."""
    if inst.kind == "oracle":
        if inst.n1 and inst.M is None:
            raise ArgumentError("oracle objectives need the integer bound M")
        return solve_by_enumeration(inst, enum_cap, tol, pmap)
    return _branch_and_bound(inst, node_cap)


def is_feasible(inst: ProblemInstance, node_cap: int = DEFAULT_NODE_CAP) -> bool:
    return _branch_and_bound(zero_objective(inst), node_cap).status == "optimal"


@dataclass
class SalrSolution:
    status: str
    z: Fraction | float | None
    x: tuple | None
    u: tuple | None
    norm: str
    approximate: bool = False


def _lift(inst: ProblemInstance, norm: str, weight) -> ProblemInstance:
    """Replace A x = b by epigraph rows |b - A x|_i <= t_i (l1) or <= t (linf), cost weight * t."""
    m, n = inst.m, inst.n
    k = m if norm == "l1" else 1
    if m == 0:
        k = 0
    E_rows = [list(r) + [ZERO] * k for r in inst.E]
    f = list(inst.f_rhs)
    for i, (row, bi) in enumerate(zip(inst.A, inst.b)):
        t = [Fraction(-1) if (norm == "linf" or q == i) else ZERO for q in range(k)]
        E_rows.append([-v for v in row] + t)
        f.append(-bi)
        E_rows.append(list(row) + t)
        f.append(bi)
    obj = inst.objective.extended([weight] * k)
    return ProblemInstance(
        A=RatMatrix.empty(n + k), b=(), E=RatMatrix(E_rows, cols=n + k), f_rhs=tuple(f),
        integer=inst.integer, objective=obj, M=inst.M, name=f"{inst.name}-lift",
    )


def residual_of(inst: ProblemInstance, x) -> tuple:
    """b - A x; float coordinates (oracle kind) are converted exactly."""
    xq = tuple(Fraction(v) for v in x)
    return tuple(bi - ai for bi, ai in zip(inst.b, inst.A @ xq)) if inst.m else ()


def _check_norm(norm):
    if norm == "l2":
        raise Unsupported("exact SALR needs a polyhedral norm; use the value-function oracle for l2")
    if norm not in ("l1", "linf"):
        raise ArgumentError(f"unknown norm {norm!r}")


def solve_salr(inst: ProblemInstance, rho, norm: str = "l1", **kw) -> SalrSolution:
    """z_SALR(rho) = min_{x in X} f(x) + rho ||b - A x|| via the epigraph lift."""
    _check_norm(norm)
    rho = as_rational(rho)
    if rho <= 0:
        raise ArgumentError("rho must be positive")
    sol = solve_mip(_lift(inst, norm, rho), **kw)
    if sol.status != "optimal":
        return SalrSolution(sol.status, None, None, None, norm)
    x = sol.x[: inst.n]
    u = residual_of(inst, x)
    return SalrSolution("optimal", sol.z, x, u, norm, sol.approximate)


def solve_alr(inst: ProblemInstance, lam, rho, psi: str = "l1", **kw) -> SalrSolution:
    """min_{x in X} f(x) + lam^T (b - A x) + rho psi(b - A x) for psi in {l1, linf, sq_l2}."""
    lam = tuple(as_rational(v) for v in lam)
    if len(lam) != inst.m:
        raise ArgumentError(f"lambda has length {len(lam)}, expected {inst.m}")
    rho = as_rational(rho)
    if rho < 0:
        raise ArgumentError("rho must be nonnegative")
    At_lam = inst.A.T @ lam if inst.m else tuple(ZERO for _ in range(inst.n))
    obj = inst.objective.add_terms(dc=[-v for v in At_lam], dconst=dot(lam, inst.b))
    if psi == "sq_l2":
        if inst.kind == "oracle":
            raise Unsupported("squared-l2 augmentation is only folded into linear/quadratic objectives")
        AtA = inst.A.T @ inst.A if inst.m else RatMatrix.zeros(inst.n, inst.n)
        Atb = inst.A.T @ inst.b if inst.m else tuple(ZERO for _ in range(inst.n))
        obj = obj.add_terms(dc=[-2 * rho * v for v in Atb], dconst=rho * dot(inst.b, inst.b), dQ=AtA.scale(2 * rho))
        sol = solve_mip(replace(inst, objective=obj, A=RatMatrix.empty(inst.n), b=()), **kw)
        if sol.status != "optimal":
            return SalrSolution(sol.status, None, None, None, psi)
        u = residual_of(inst, sol.x)
        return SalrSolution("optimal", sol.z, sol.x, u, psi, sol.approximate)
    _check_norm(psi)
    shifted = replace(inst, objective=obj)
    if rho == 0:
        sol = solve_mip(replace(shifted, A=RatMatrix.empty(inst.n), b=()), **kw)
        if sol.status != "optimal":
            return SalrSolution(sol.status, None, None, None, psi)
        u = residual_of(inst, sol.x)
        return SalrSolution("optimal", sol.z, sol.x, u, psi, sol.approximate)
    return solve_salr(shifted, rho, psi, **kw)
