"""Continuous convex subproblems: exact active-set QP and a projected-gradient oracle solver."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, ResourceLimit, Unconverged
from .exactnum import as_rational, dot
from .lpsolve import solve_lp_general
from .ratlinalg import RatMatrix, nullspace, solve_linear

DEFAULT_ACTIVE_SET_CAP = 200_000
DEFAULT_TOL = 1e-8
ZERO = Fraction(0)


def _vec(v):
    return tuple(as_rational(x) for x in v)


def _rows(M):
    return [_vec(r) for r in M]


@dataclass(frozen=True)
class KktPoint:
    """Exact KKT point: Q x + c = Aeq^T lambda_A - G^T lambda_E, lambda_E >= 0, complementary."""

    x: tuple
    lambda_A: tuple
    lambda_E: tuple
    active_set: tuple

    def verify(self, Q, c, Aeq, beq, G, h) -> bool:
        x = self.x
        n = len(x)
        Qx = RatMatrix(Q, cols=n) @ x if n else ()
        for j in range(n):
            lhs = Qx[j] + as_rational(c[j])
            rhs = sum((la * as_rational(r[j]) for la, r in zip(self.lambda_A, Aeq)), ZERO)
            rhs -= sum((le * as_rational(r[j]) for le, r in zip(self.lambda_E, G)), ZERO)
            if lhs != rhs:
                return False
        if any(dot(_vec(r), x) != as_rational(b) for r, b in zip(Aeq, beq)):
            return False
        for le, r, hv in zip(self.lambda_E, G, h):
            s = as_rational(hv) - dot(_vec(r), x)
            if s < 0 or le < 0 or le * s != 0:
                return False
        return True


@dataclass
class QPResult:
    status: str  # optimal | infeasible | unbounded
    x: tuple | None = None
    z: Fraction | None = None
    kkt: KktPoint | None = None
    ray: tuple | None = None
    candidates: int = 0


def qp_value(Q, c, x, c0=0):
    n = len(x)
    Qx = RatMatrix(Q, cols=n) @ x if n else ()
    return dot(x, Qx) / 2 + dot(_vec(c), x) + as_rational(c0)


def _try_active_set(Q, c, Aeq, beq, G, h, W):
    """KKT point with active rows W, or None."""
    n, me, k = len(c), len(Aeq), len(W)
    size = n + me + k
    rows, rhs = [], []
    for j in range(n):
        rows.append(list(Q[j]) + [-r[j] for r in Aeq] + [G[i][j] for i in W])
        rhs.append(-c[j])
    for r, b in zip(Aeq, beq):
        rows.append(list(r) + [ZERO] * (me + k))
        rhs.append(b)
    for i in W:
        rows.append(list(G[i]) + [ZERO] * (me + k))
        rhs.append(h[i])
    K = RatMatrix(rows, cols=size)
    sol = solve_linear(K, rhs)
    if sol is None:
        return None
    lam_w = sol[n + me:]
    x = sol[:n]
    ok = all(v >= 0 for v in lam_w) and all(dot(G[i], x) <= h[i] for i in range(len(G)))
    if not ok:
        if not nullspace(K):
            return None
        # non-unique KKT solutions: search the solution set with an LP
        Gl = [list(G[i]) + [ZERO] * (me + k) for i in range(len(G))]
        Gl += [[ZERO] * (n + me) + [Fraction(-int(t == s)) for t in range(k)] for s in range(k)]
        hl = list(h) + [ZERO] * k
        res = solve_lp_general([ZERO] * size, rows, rhs, Gl, hl)
        if res.status != "optimal":
            return None
        sol = res.x
        x, lam_w = sol[:n], sol[n + me:]
    lam_full = [ZERO] * len(G)
    for i, v in zip(W, lam_w):
        lam_full[i] = v
    return KktPoint(tuple(x), tuple(sol[n:n + me]), tuple(lam_full), tuple(W))


def active_sets(mi, n, first=()):
    """Candidate active sets: warm-start guesses first, then by size and lexicographically."""
    seen = set()
    for W in first:
        W = tuple(sorted(W))
        if W not in seen:
            seen.add(W)
            yield W
    for k in range(min(n, mi) + 1):
        for W in itertools.combinations(range(mi), k):
            if W not in seen:
                yield W


def solve_qp(Q, c, Aeq=(), beq=(), G=(), h=(), c0=0, cap=DEFAULT_ACTIVE_SET_CAP, warm=()) -> QPResult:
    """Exact global minimizer of 1/2 x^T Q x + c^T x + c0 over {Aeq x = beq, G x <= h}."""
    c = _vec(c)
    n = len(c)
    Q = _rows(Q) if len(Q) else [tuple(ZERO for _ in range(n)) for _ in range(n)]
    Aeq, G = _rows(Aeq), _rows(G)
    beq, h = _vec(beq), _vec(h)
    if len(Q) != n or any(len(r) != n for r in Q):
        raise ArgumentError("Q must be n x n")

    feas = solve_lp_general([ZERO] * n, Aeq, beq, G, h)
    if feas.status == "infeasible":
        return QPResult("infeasible")
    # bounded below iff no d with Qd = 0, Aeq d = 0, G d <= 0, c^T d < 0
    box = [[Fraction(int(t == j)) for t in range(n)] for j in range(n)]
    box += [[-v for v in r] for r in box]
    ray = solve_lp_general(c, list(Q) + Aeq, [ZERO] * (n + len(Aeq)), G + box,
                           [ZERO] * len(G) + [Fraction(1)] * (2 * n))
    if ray.z < 0:
        return QPResult("unbounded", ray=ray.x)

    count = 0
    for W in active_sets(len(G), n, warm):
        count += 1
        if count > cap:
            raise ResourceLimit(f"active-set enumeration exceeded cap {cap}", count, cap)
        kkt = _try_active_set(Q, c, Aeq, beq, G, h, W)
        if kkt is not None:
            return QPResult("optimal", kkt.x, qp_value(Q, c, kkt.x, c0), kkt, candidates=count)
    # bounded convex QPs attain their minimum at a point whose active rows can be
    # reduced to at most n independent ones, so the loop always returns
    raise AssertionError("no KKT point found for a bounded feasible QP")


def brute_force_qp(Q, c, Aeq, beq, G, h, c0=0):
    """Minimum over KKT points of every active subset (no pruning); test oracle."""
    c = _vec(c)
    Q, Aeq, G, beq, h = _rows(Q), _rows(Aeq), _rows(G), _vec(beq), _vec(h)
    best = None
    for k in range(len(G) + 1):
        for W in itertools.combinations(range(len(G)), k):
            kkt = _try_active_set(Q, c, Aeq, beq, G, h, W)
            if kkt is not None:
                z = qp_value(Q, c, kkt.x, c0)
                if best is None or z < best:
                    best = z
    return best


@dataclass
class SmoothResult:
    x: np.ndarray
    z: float
    gap_bound: float
    iterations: int
    lambda_A: np.ndarray
    lambda_E: np.ndarray
    active_set: tuple
    approximate: bool = True


def _to_frac(v, limit=10**12):
    return tuple(Fraction(float(t)).limit_denominator(limit) for t in v)


def _up(v: float) -> Fraction:
    """Rational strictly above the float ``v``."""
    v = float(v)
    return Fraction(v) + (abs(Fraction(v)) + 1) / 10**9


def frank_wolfe_gap(objective, x, g, Aeq, beq, G, h):
    """Upper bound on f(x) - min f over the polyhedron from the linearization at x.

    When the polyhedron is unbounded the linearization is minimized over a
    level-set box instead.  With f = h(x_S) + c_N^T x_N and h mu-strongly
    convex, every point no worse than x satisfies
    ||y_S - x_S|| <= (||g_S|| + sqrt(||g_S||^2 + 2 mu (f(x) - l - h(x_S)))) / mu
    and c_N^T y_N <= f(x) - h(x_S) + ||g_S||^2 / (2 mu), where l = min c_N^T y_N.
    """
    gq = _to_frac(g)
    res = solve_lp_general(gq, Aeq, beq, G, h)
    if res.status == "unbounded":
        S, N, mu = objective.strong_split()
        if mu <= 0:
            return math.inf
        n = len(x)
        cN = [objective.c[j] if j in N else ZERO for j in range(n)]
        low = solve_lp_general(cN, Aeq, beq, G, h)
        if low.status != "optimal":
            return math.inf
        fx = float(objective.value(x))
        lin_N = sum(float(cN[j]) * x[j] for j in N)
        hS = fx - lin_N
        gS = float(np.linalg.norm([g[j] for j in S]))
        slack = max(fx - float(low.z) - hS, 0.0)
        R = (gS + math.sqrt(gS * gS + 2 * mu * slack)) / mu
        U = fx - hS + gS * gS / (2 * mu)
        Gb, hb = list(G), list(h)
        for j in S:
            e = [Fraction(int(t == j)) for t in range(n)]
            Gb += [e, [-v for v in e]]
            hb += [_up(x[j] + R), _up(-x[j] + R)]
        if N:
            Gb.append(cN)
            hb.append(_up(U))
        res = solve_lp_general(gq, Aeq, beq, Gb, hb)
    if res.status != "optimal":
        return math.inf
    # evaluate g^T (x - s) exactly on the rationalized gradient, then pad for the rounding of g
    xq = tuple(Fraction(float(v)) for v in x)
    exact = float(dot(gq, xq) - dot(gq, res.x))
    pad = sum(abs(float(a) - float(b)) * (abs(float(xv)) + abs(float(sv))) for a, b, xv, sv in zip(gq, g, xq, res.x))
    return exact + pad


def solve_smooth(objective, Aeq=(), beq=(), G=(), h=(), tol=DEFAULT_TOL, max_iter=20000, x0=None) -> SmoothResult:
    """Projected gradient with step 1/L and exact QP projections, certified by the Frank-Wolfe gap.

    ``objective`` needs ``value``, ``grad``, ``mu`` and ``L``.
    """
    Aeq, G = _rows(Aeq), _rows(G)
    beq, h = _vec(beq), _vec(h)
    n = objective.n
    if x0 is None:
        feas = solve_lp_general([ZERO] * n, Aeq, beq, G, h)
        if feas.status != "optimal":
            raise ArgumentError("smooth subproblem has an empty feasible region")
        x0 = feas.x
    x = np.array([float(v) for v in x0])
    L = float(objective.L)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    warm = [()]
    gap = math.inf
    it = 0
    check_every = 5
    for it in range(1, max_iter + 1):
        g = np.asarray(objective.grad(x), dtype=float)
        if it % check_every == 1 or check_every == 1:
            gap = frank_wolfe_gap(objective, x, g, Aeq, beq, G, h)
            if gap <= tol:
                break
        y = x - g / L
        if not G and not Aeq:
            x_new = y
        else:
            proj = solve_qp(ident, [-v for v in _to_frac(y)], Aeq, beq, G, h, warm=warm)
            warm = [proj.kkt.active_set]
            x_new = np.array([float(v) for v in proj.x])
        if np.allclose(x_new, x, rtol=0, atol=1e-15):
            check_every = 1
        x = x_new
    else:
        g = np.asarray(objective.grad(x), dtype=float)
        gap = frank_wolfe_gap(objective, x, g, Aeq, beq, G, h)
        if gap > tol:
            raise Unconverged(f"gap {gap:.3e} above tol {tol:.1e} after {max_iter} iterations", gap, x)
    lam_A, lam_E, active = smooth_multipliers(objective, x, Aeq, G, h)
    return SmoothResult(x, float(objective.value(x)), max(gap, 0.0), it, lam_A, lam_E, active)


def smooth_multipliers(objective, x, Aeq, G, h, tol=1e-7):
    """Least-squares multipliers on the numerically active rows (approximate)."""
    g = np.asarray(objective.grad(x), dtype=float)
    Gf = np.array([[float(v) for v in r] for r in G]) if G else np.zeros((0, len(x)))
    hf = np.array([float(v) for v in h])
    active = tuple(i for i in range(len(G)) if hf[i] - Gf[i] @ x <= tol * max(1.0, abs(hf[i])))
    Af = np.array([[float(v) for v in r] for r in Aeq]) if Aeq else np.zeros((0, len(x)))
    M = np.hstack([Af.T, -Gf[list(active)].T]) if (len(Aeq) or active) else np.zeros((len(x), 0))
    if M.shape[1]:
        sol, *_ = np.linalg.lstsq(M, g, rcond=None)
    else:
        sol = np.zeros(0)
    lam_A = sol[: len(Aeq)]
    lam_E = np.zeros(len(G))
    for k, i in enumerate(active):
        lam_E[i] = max(sol[len(Aeq) + k], 0.0)
    return lam_A, lam_E, active


def gradient_check(fn, points, h=1e-6) -> float:
    """Max relative deviation between central differences and the reported gradient."""
    worst = 0.0
    for p in points:
        x = np.asarray(p, dtype=float)
        g = np.asarray(fn.grad(x), dtype=float)
        for j in range(len(x)):
            e = np.zeros_like(x)
            e[j] = h
            fd = (float(fn.value(x + e)) - float(fn.value(x - e))) / (2 * h)
            worst = max(worst, abs(fd - g[j]) / max(1.0, abs(g[j])))
    return worst
