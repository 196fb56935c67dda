"""Explicit penalty constants and sufficient thresholds rho_star.

Every irrational quantity (Euclidean and Frobenius norms) is replaced by a
rational over-estimate from :func:`sqrt_upper`, so each threshold reported
here is at least the exact one.  Bounds derived with Euclidean Cauchy-Schwarz
steps are converted to the requested penalty norm with
:func:`l2_to_norm_factor`.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from .cvxsub import solve_qp, solve_smooth
from .errors import ArgumentError, TheoremHypothesisViolated, Unsupported
from .exactnum import (DEFAULT_SLACK, as_rational, check_norm, dual_norm_upper, format_rational, l2_to_norm_factor,
                       lcm_list, norm_sq_l2, norm_upper, sqrt_upper)
from .lpsolve import solve_lp, solve_lp_general
from .mipsolve import DEFAULT_ENUM_CAP, solve_by_enumeration, solve_mip, zero_objective
from .model import ProblemInstance, check_recession_condition, to_standard_form
from .ratlinalg import DEFAULT_BASIS_CAP, RatMatrix, enumerate_bases, frob_sq, rref

ZERO = Fraction(0)


def _q(v) -> Fraction:
    """Exact Fraction for rationals, exact binary value for floats."""
    return v if isinstance(v, Fraction) else Fraction(float(v))


def independent_rows(M: RatMatrix) -> list:
    """Indices of a lexicographically first maximal set of independent rows."""
    if M.rows == 0 or M.cols == 0:
        return []
    return rref(M.T)[1]


def row_reduced_bases(M: RatMatrix, cap: int = DEFAULT_BASIS_CAP):
    """Bases of M after dropping dependent rows; None when there are none."""
    rows = independent_rows(M)
    if not rows:
        return None
    return enumerate_bases(M.select_rows(rows), cap)


def beta_bound(M: RatMatrix, cap: int = DEFAULT_BASIS_CAP, slack=DEFAULT_SLACK) -> Fraction:
    """Upper bound on max ||B^-1||_F over invertible bases (0 when M has none)."""
    bases = row_reduced_bases(M, cap)
    if bases is None or not bases.bases:
        return ZERO
    return sqrt_upper(bases.max_inv_frob_sq, slack)


def integral_scale(A: RatMatrix, b) -> int:
    """Smallest positive integer s with s*A and s*b integral."""
    dens = [v.denominator for r in A for v in r] + [as_rational(v).denominator for v in b]
    return lcm_list(dens) if dens else 1


def kappa_lcm(std: ProblemInstance, phi0, cap: int = DEFAULT_BASIS_CAP) -> int:
    """lcm of objective denominators, |lcm of basis determinants of A_C| and denom(phi(0)).

    ``std`` must be a standard-form instance with integral A and b.
    """
    if not std.A.is_integral():
        raise ArgumentError("kappa_lcm needs integral constraint data; scale first")
    parts = [v.denominator for v in std.objective.c]
    C = list(std.continuous)
    if C:
        bases = row_reduced_bases(std.A.columns(C), cap)
        if bases is not None and bases.bases:
            parts.append(lcm_list(abs(int(d)) for d in bases.dets))
    parts.append(as_rational(phi0).denominator)
    return lcm_list(parts)


def _require_optimal(relax, z_IP):
    if relax.status != "optimal":
        raise Unsupported(f"continuous relaxation is {relax.status}; finite constants need an optimal relaxation")


@dataclass
class MilpConstants:
    kappa_lcm: int
    beta: Fraction
    Gamma: Fraction
    K: Fraction
    delta_max: Fraction  # exclusive upper end of the proven range
    delta: Fraction
    rho_star: Fraction
    z_IP: Fraction
    z_R: Fraction
    lambda_A: tuple
    lambda_A_dual_norm: Fraction
    scale: int
    norm: str
    c_C_norm: Fraction = ZERO
    notes: list = field(default_factory=list)


def milp_constants(inst: ProblemInstance, norm: str = "l1", relax=None, z_IP=None,
                   cap: int = DEFAULT_BASIS_CAP, slack=DEFAULT_SLACK) -> MilpConstants:
    """kappa, beta, Gamma = nu * beta * ||c_C||_2, K = max(kappa^2 Gamma, 1), delta = 1/(4K), rho_star.

    Computed on the standard form scaled by a common integer s so that A and b
    are integral; a perturbation u of the original is s*u in the scaled data,
    so Gamma and rho_star scale by s and delta by 1/s on the way back.
    """
    check_norm(norm)
    if inst.kind != "linear":
        raise ArgumentError("milp_constants needs a linear objective")
    relax = relax if relax is not None else solve_lp(inst)
    _require_optimal(relax, z_IP)
    if z_IP is None:
        sol = solve_mip(inst)
        if sol.status != "optimal":
            raise Unsupported(f"instance is {sol.status}")
        z_IP = sol.z
    z_IP = as_rational(z_IP)
    std = to_standard_form(inst).instance
    s = integral_scale(std.A, std.b)
    std_s = ProblemInstance(A=std.A.scale(s), b=tuple(s * v for v in std.b), E=std.E, f_rhs=std.f_rhs,
                            integer=std.integer, objective=std.objective, M=std.M, name=std.name)
    C = list(std_s.continuous)
    c_C = [std_s.objective.c[j] for j in C]
    beta = beta_bound(std_s.A.columns(C), cap, slack) if C else ZERO
    kappa = kappa_lcm(std_s, z_IP, cap)
    nu = l2_to_norm_factor(norm, inst.m, slack)
    cC2 = sqrt_upper(norm_sq_l2(c_C), slack) if c_C else ZERO
    gamma_s = nu * beta * cC2
    K = max(kappa * kappa * gamma_s, Fraction(1))
    delta_s = 1 / (4 * K)
    Gamma = s * gamma_s
    delta = delta_s / s
    dn = dual_norm_upper(relax.lambda_A, norm)
    rho = max(Gamma, dn + (z_IP - relax.z) / delta)
    notes = []
    if s != 1:
        notes.append(f"constraint rows scaled by {s} to make A and b integral")
    if not C:
        notes.append("no continuous variables: Gamma = 0")
    return MilpConstants(kappa, beta, Gamma, K, (1 / (2 * K)) / s, delta, rho, z_IP, relax.z,
                         tuple(relax.lambda_A), dn, s, norm, cC2, notes)


def picp_rho(z_IP, z_R, lam_A, norm: str = "l1", scale: int = 1) -> Fraction:
    """rho_star = (z_IP - z_R) + ||lambda_A||_* for integral A, b.

    With data scaled by s to become integral the threshold in original units
    is s (z_IP - z_R) + ||lambda_A||_*.
    """
    return scale * (as_rational(z_IP) - as_rational(z_R)) + dual_norm_upper(lam_A, norm)


@dataclass
class PicpConstants:
    rho_star: Fraction
    z_IP: Fraction
    z_R: Fraction
    lambda_A: tuple
    lambda_A_dual_norm: Fraction
    scale: int
    norm: str


def picp_constants(inst: ProblemInstance, norm: str = "l1", relax=None, z_IP=None) -> PicpConstants:
    if not inst.is_pure_integer:
        raise Unsupported("the pure-integer threshold needs an instance without continuous variables")
    if inst.kind != "linear":
        raise Unsupported("the pure-integer threshold is derived for linear objectives")
    relax = relax if relax is not None else solve_lp(inst)
    _require_optimal(relax, z_IP)
    if z_IP is None:
        sol = solve_mip(inst)
        if sol.status != "optimal":
            raise Unsupported(f"instance is {sol.status}")
        z_IP = sol.z
    s = integral_scale(inst.A, inst.b)
    rho = picp_rho(z_IP, relax.z, relax.lambda_A, norm, s)
    return PicpConstants(rho, as_rational(z_IP), relax.z, tuple(relax.lambda_A),
                         dual_norm_upper(relax.lambda_A, norm), s, norm)


@dataclass
class RestrictedMultiplierData:
    """Optimal integer assignments at u = 0 and a radius inside which they stay optimal."""

    phi0: Fraction | float
    S0: list  # x_I attaining phi(0)
    Gamma_direct: Fraction  # max dual norm of the restricted multipliers lambda_A over S0
    delta: Fraction | None  # None: no competing assignment, any radius works
    radii: list  # (x_I, reason, radius) for every competing assignment
    approximate: bool


def _domain_distance(inst: ProblemInstance, x_I, norm: str):
    """Distance (lower bound in ``norm``) from u = 0 to the u's making the restricted problem feasible."""
    fixed = dict(zip(inst.integer, x_I))
    C = inst.continuous
    m, k = inst.m, len(C)
    rhs = [bi - sum((r[j] * v for j, v in fixed.items()), ZERO) for r, bi in zip(inst.A, inst.b)]
    frhs = [fi - sum((r[j] * v for j, v in fixed.items()), ZERO) for r, fi in zip(inst.E, inst.f_rhs)]
    nt = m if norm == "l1" else 1
    Aeq = [[r[j] for j in C] + [Fraction(-int(q == i)) for q in range(m)] + [ZERO] * nt
           for i, r in enumerate(inst.A)]
    G = [[r[j] for j in C] + [ZERO] * (m + nt) for r in inst.E]
    h = list(frhs)
    for i in range(m):
        t = [Fraction(-1) if (nt == 1 or q == i) else ZERO for q in range(nt)]
        e = [Fraction(int(q == i)) for q in range(m)]
        G.append([ZERO] * k + e + t)
        G.append([ZERO] * k + [-v for v in e] + t)
        h += [ZERO, ZERO]
    res = solve_lp_general([ZERO] * (k + m) + [Fraction(1)] * nt, Aeq, rhs, G, h)
    if res.status != "optimal":
        return None
    # l2 distance is at least the linf distance computed here
    return res.z


def restricted_multiplier_data(inst: ProblemInstance, norm: str = "l1", tol: float = 1e-8, pmap=map,
                enum_cap: int = DEFAULT_ENUM_CAP) -> RestrictedMultiplierData:
    """Radius delta with phi(u) = min over S0 of Phi(u, x_I) whenever ||u|| <= delta and phi(u) <= phi(0).

    Each restricted value function is convex in u, so its multipliers give
    Phi(u, x_I) >= Phi(0, x_I) - ||lambda_A||_* ||u||.  A competing x_I with
    Phi(0, x_I) = phi(0) + psi therefore stays above phi(0) for
    ||u|| < psi / ||lambda_A||_*; an x_I infeasible at u = 0 stays infeasible
    closer than its domain distance.  Half the smallest such radius is used.
    """
    sol, parts = solve_by_enumeration(inst, enum_cap, tol, pmap, keep_all=True)
    if sol.status != "optimal":
        raise Unsupported(f"instance is {sol.status}")
    approx = sol.approximate
    phi0 = sol.z
    eps = 0 if not approx else 4 * tol * max(1.0, abs(float(phi0)))
    S0, others = [], []
    for r in parts:
        if r.status == "optimal" and abs(r.z - phi0) <= eps:
            S0.append(r)
        else:
            others.append(r)
    gamma = max((dual_norm_upper([_q(v) for v in r.lambda_A], norm) for r in S0), default=ZERO)
    radii = []
    for r in others:
        if r.status == "optimal":
            psi = _q(r.z) - _q(phi0)
            dn = dual_norm_upper([_q(v) for v in r.lambda_A], norm)
            radii.append((r.x_I, "value margin", None if dn == 0 else psi / dn))
        else:
            d = _domain_distance(inst, r.x_I, norm)
            radii.append((r.x_I, "domain distance", d))
    finite = [v for _, _, v in radii if v is not None]
    delta = min(finite) / 2 if finite else None
    return RestrictedMultiplierData(phi0, [r.x_I for r in S0], gamma, delta, radii, approx)


def relax_continuous(inst: ProblemInstance, tol: float = 1e-10):
    """(z_R lower bound, lambda_A, approximate) of the continuous relaxation (box rows included)."""
    G, h = inst.ineq_with_box()
    obj = inst.objective
    if obj.kind == "linear":
        r = solve_lp(inst)
        _require_optimal(r, None)
        return r.z, tuple(r.lambda_A), False
    if obj.kind == "quadratic":
        r = solve_qp(list(obj.Q), obj.c, list(inst.A), inst.b, list(G), h, obj.const)
        if r.status != "optimal":
            raise Unsupported(f"continuous relaxation is {r.status}")
        return r.z, tuple(r.kkt.lambda_A), False
    r = solve_smooth(obj, list(inst.A), inst.b, list(G), h, tol=tol)
    return _q(r.z - r.gap_bound), tuple(_q(v) for v in r.lambda_A), True


@dataclass
class MiqpConstants:
    K1: Fraction
    K2: Fraction
    beta_bar: Fraction
    Q_frob: Fraction
    A_I_frob: Fraction
    c_norm: Fraction
    b_norm: Fraction
    M_l2: Fraction  # bound on ||x_I||_2
    delta: Fraction
    rho_star: Fraction
    rho_star_direct: Fraction
    Gamma_direct: Fraction
    z_IP: Fraction
    z_R: Fraction
    lambda_A_dual_norm: Fraction
    norm: str
    norm_factor: Fraction
    notes: list = field(default_factory=list)


def _stacked_kkt(std: ProblemInstance) -> RatMatrix:
    """[[Q_CC, -A_C^T, A_C^T, -I], [A_C, 0, 0, 0]] on the standard form."""
    C = list(std.continuous)
    k, m = len(C), std.m
    Q = std.objective.Q
    QCC = [[Q[i, j] for j in C] for i in C]
    AC = [[std.A[i, j] for j in C] for i in range(m)]
    top = [QCC[a] + [-AC[i][a] for i in range(m)] + [AC[i][a] for i in range(m)] + [Fraction(-int(a == t)) for t in range(k)]
           for a in range(k)]
    bottom = [AC[i] + [ZERO] * (2 * m + k) for i in range(m)]
    return RatMatrix(top + bottom, cols=k + 2 * m + k)


def miqp_constants(inst: ProblemInstance, norm: str = "l1", z_IP=None, cap: int = DEFAULT_BASIS_CAP,
                   slack=DEFAULT_SLACK, pmap=map) -> MiqpConstants:
    """K1 = ||Q||_F beta_bar^2 and the closed-form K2, on the standard form.

    The integer block is bounded in Euclidean norm by sqrt(n1) * M.  The
    Euclidean bound K1 ||u||_2^2 + K2 ||u||_2 is converted to ``norm`` with
    ||u||_2 <= nu ||u||.
    """
    check_norm(norm)
    if inst.kind != "quadratic":
        raise ArgumentError("miqp_constants needs a quadratic objective")
    if inst.M is None:
        raise ArgumentError("miqp_constants needs the integer bound M")
    std = to_standard_form(inst).instance
    Abar = _stacked_kkt(std)
    bb = beta_bound(Abar, cap, slack)
    Q = std.objective.Q
    qf = sqrt_upper(frob_sq(Q), slack)
    I = list(std.integer)
    AI = std.A.columns(I) if I else RatMatrix.empty(0)
    aif = sqrt_upper(frob_sq(AI), slack) if I else ZERO
    cn = norm_upper(std.objective.c, "l2", slack)
    bn = norm_upper(std.b, "l2", slack)
    Ml2 = sqrt_upper(Fraction(len(I)), slack) * std.M if I else ZERO
    K1 = qf * bb * bb
    K2 = 2 * (bb * (cn + Ml2 * qf) + bb * (bn + Ml2 * aif)) * qf * bb + Ml2 * qf * bb + cn * bb
    nu = l2_to_norm_factor(norm, inst.m, slack)
    K1n, K2n = nu * nu * K1, nu * K2

    rmd = restricted_multiplier_data(inst, norm, pmap=pmap)
    zI = as_rational(z_IP) if z_IP is not None else rmd.phi0
    z_R, lam_A, _ = relax_continuous(inst)
    dn = dual_norm_upper(lam_A, norm)
    gap = zI - z_R
    delta = _balanced_delta(K1n, K2n, dn, gap, rmd.delta)
    rho = max(K1n * delta + K2n, dn + gap / delta)
    rho_direct = max(rmd.Gamma_direct, dn + (gap / rmd.delta if rmd.delta is not None else ZERO))
    notes = ["delta from restricted-multiplier radii, capped by the value balancing both terms"]
    return MiqpConstants(K1n, K2n, bb, qf, aif, cn, bn, Ml2, delta, rho, rho_direct, rmd.Gamma_direct, zI, z_R,
                         dn, norm, nu, notes)


def _balanced_delta(K1, K2, dn, gap, cap_delta) -> Fraction:
    """Radius minimizing max(K1 d + K2, dn + gap/d), at most ``cap_delta`` (None: unbounded) and 1."""
    if gap <= 0:
        best = Fraction(1)
    elif K1 == 0:
        best = gap / (K2 - dn) if K2 > dn else Fraction(1)
    else:
        # positive root of K1 d^2 + (K2 - dn) d - gap = 0, rounded down to a rational
        a, b = float(K1), float(K2 - dn)
        root = (-b + math.sqrt(b * b + 4 * a * float(gap))) / (2 * a)
        best = Fraction(root).limit_denominator(10**6)
        if best <= 0:
            best = Fraction(1, 10**6)
    best = min(best, Fraction(1))
    if cap_delta is not None:
        best = min(best, cap_delta)
    return best


@dataclass
class MicpConstants:
    Gamma: Fraction  # direct multiplier value (a valid choice under degeneracy)
    Gamma_formula: float | None
    mu: float
    L: float
    gamma: float | None
    beta: Fraction
    grad0_norm: float
    f0: float
    x_star_bound: float | None
    delta: Fraction | None
    rho_star: Fraction
    z_IP: float
    z_R: float
    lambda_A_dual_norm: Fraction
    norm: str
    path: str  # "bounded" (M given) or "recession" (box derived from the level set)
    M_used: Fraction
    approximate: bool
    notes: list = field(default_factory=list)


def _mu_L(inst: ProblemInstance):
    obj = inst.objective
    if obj.kind == "oracle":
        return obj.mu, obj.L
    if obj.kind == "quadratic":
        ev = np.linalg.eigvalsh(np.array([[float(v) for v in r] for r in obj.Q]))
        return max(float(ev[0]) * (1 - 1e-12), 0.0), float(ev[-1]) * (1 + 1e-12)
    return 0.0, 0.0


def _grad0(inst: ProblemInstance):
    obj = inst.objective
    z = [Fraction(0)] * inst.n
    if obj.kind == "oracle":
        return np.asarray(obj.grad(np.zeros(inst.n)), dtype=float), float(obj.value(np.zeros(inst.n)))
    return np.array([float(v) for v in obj.grad(z)]), float(obj.value(z))


def micp_gamma(inst: ProblemInstance, norm: str = "l1", tol: float = 1e-8, require_formula: bool = False,
               cap: int = DEFAULT_BASIS_CAP, slack=DEFAULT_SLACK, pmap=map) -> MicpConstants:
    """Direct Gamma from restricted multipliers over S0, the strongly convex formula bound, and rho_star.

    Without M the recession condition must hold and f must be strongly
    convex: a feasible point then bounds every optimal x, which supplies M.
    """
    check_norm(norm)
    if inst.kind == "linear":
        raise ArgumentError("use milp_constants for linear objectives")
    mu, L = _mu_L(inst)
    g0, f0 = _grad0(inst)
    gn = float(np.linalg.norm(g0))
    notes = []
    path = "bounded"
    work = inst
    if inst.M is None:
        path = "recession"
        cert = check_recession_condition(inst)
        if not cert.holds:
            raise TheoremHypothesisViolated(f"objective and feasible set share recession direction {cert.direction}")
        if mu <= 0:
            raise Unsupported("deriving the integer box needs a strongly convex objective")
        feas = solve_mip(zero_objective(inst))
        if feas.status != "optimal":
            raise Unsupported("instance is infeasible")
        fbar = float(inst.objective.value(feas.x)) - f0
        R = (gn + math.sqrt(gn * gn + 2 * mu * max(fbar, 0.0))) / mu
        M = Fraction(math.floor(R + 1e-9))
        work = replace(inst, M=M)
        notes.append(f"integer box M = {M} from the level set of a feasible point")
    if mu <= 0 and require_formula:
        raise Unsupported("the closed-form Gamma needs a strongly convex objective (mu > 0)")

    rmd = restricted_multiplier_data(work, norm, tol, pmap)
    z_IP = float(rmd.phi0)
    z_R, lam_A, approx_relax = relax_continuous(work, tol=min(tol, 1e-10))
    dn = dual_norm_upper(lam_A, norm)
    gap = max(_q(rmd.phi0) - _q(z_R), ZERO)
    rho = max(rmd.Gamma_direct, dn + (gap / rmd.delta if rmd.delta is not None else ZERO))

    C = list(inst.continuous)
    beta = ZERO
    if C:
        AC = inst.A.columns(C)
        EC = inst.E.columns(C)
        blocks = [b for b in (AC.T, -AC.T, -EC.T) if b.cols]
        beta = beta_bound(RatMatrix.hstack(blocks), cap, slack) if blocks else ZERO
    zshift = z_IP - f0
    gamma = math.sqrt(zshift) if zshift >= 0 else None
    xb = formula = None
    if mu > 0:
        xb = (gn + math.sqrt(max(gn * gn + 2 * mu * zshift, 0.0))) / mu
        nu = float(l2_to_norm_factor(norm, inst.m, slack))
        formula = nu * 2 * float(beta) * (L * xb + gn)
        notes.append("formula bound uses f shifted so that f(0) = 0")
    if zshift < 0:
        notes.append("z_IP below f(0): gamma = sqrt(f(xbar)) is undefined for the unshifted objective")
    approx = rmd.approximate or approx_relax
    return MicpConstants(rmd.Gamma_direct, formula, mu, L, gamma, beta, gn, f0, xb, rmd.delta, rho, z_IP,
                         float(z_R), dn, norm, path, work.M, approx, notes)


def _fmt(v):
    if v is None:
        return None
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    return v


PROVENANCE = {
    "kappa_lcm": ("exact", "lcm(objective denominators, |lcm basis dets of A_C|, denom(phi(0)))"),
    "beta": ("over-rounded", "max over invertible bases B of ||B^-1||_F"),
    "Gamma": ("over-rounded", "nu * beta * ||c_C||_2"),
    "K": ("over-rounded", "max(kappa^2 * Gamma, 1)"),
    "delta": ("exact", "1 / (4K)"),
    "delta_max": ("exact", "1 / (2K), exclusive"),
    "rho_star": ("over-rounded", "max(Gamma, ||lambda_A||_* + (z_IP - z_R) / delta)"),
    "K1": ("over-rounded", "||Q||_F * beta_bar^2"),
    "K2": ("over-rounded", "2(beta_bar(||c|| + M||Q||_F) + beta_bar(||b|| + M||A_I||_F))||Q||_F beta_bar"
                           " + M||Q||_F beta_bar + ||c|| beta_bar"),
    "Gamma_direct": ("exact", "max over S0 of ||lambda_A||_* of the restricted problems"),
    "Gamma_formula": ("approximate", "2 beta (L ||x*|| + ||grad f(0)||), ||x*|| from strong convexity"),
}


def constants_to_json(consts) -> dict:
    """Every field with its value; known constants also carry provenance and formula."""
    out = {"type": type(consts).__name__, "constants": {}}
    approx = getattr(consts, "approximate", False)
    for k, v in asdict(consts).items():
        entry = {"value": _fmt(v)}
        if k in PROVENANCE:
            prov, formula = PROVENANCE[k]
            if k == "delta" and isinstance(consts, MicpConstants):
                prov, formula = "certified", "half the smallest restricted-multiplier radius"
            elif k == "delta" and isinstance(consts, MiqpConstants):
                prov, formula = "certified", "min(balancing radius, 1, half the smallest restricted-multiplier radius)"
            if approx and prov != "over-rounded":
                prov = "approximate"
            entry["provenance"] = prov
            entry["formula"] = formula
        out["constants"][k] = entry
    return out
