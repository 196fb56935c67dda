"""Experiments on the sharp augmented Lagrangian dual: sweeps, thresholds, ascent and certificates."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .cvxsub import DEFAULT_TOL
from .errors import ArgumentError, SharpAldError, TheoremHypothesisViolated
from .exactnum import as_rational, check_norm, format_rational
from .mipsolve import solve_alr, solve_mip, solve_salr
from .model import ProblemInstance, check_recession_condition
from .penalty import (constants_to_json, micp_gamma, milp_constants, miqp_constants, picp_constants)
from .ratlinalg import DEFAULT_BASIS_CAP
from .valuefn import build_grid, salr_oracle

ZERO = Fraction(0)
# radius and pitch of the lattice used for l2 values when the reachable residuals cannot be listed
L2_GRID = (Fraction(1), Fraction(1, 8))


@dataclass
class SweepRecord:
    rho: Fraction
    z_salr: Fraction | float
    gap: Fraction | float
    norm: str
    fidelity: str  # exact | approximate | oracle-exhaustive | oracle-grid


def _z_ip(inst: ProblemInstance, z_IP=None, **kw):
    if z_IP is not None:
        return z_IP
    sol = solve_mip(inst, **kw)
    if sol.status != "optimal":
        raise ArgumentError(f"z_IP is undefined: instance is {sol.status}")
    return sol.z


def _l2_grid(inst: ProblemInstance, pmap=map):
    if inst.is_pure_integer and inst.M is not None:
        return None
    return build_grid(inst, *L2_GRID, norm="l2", pmap=pmap)


def salr_value(inst: ProblemInstance, rho, norm: str = "l1", pmap=map, l2_cache=None):
    """(z_SALR(rho), fidelity).

    ``l2_cache`` is a (grid, table) pair from an earlier l2 call on the same instance.
    """
    if norm in ("l1", "linf"):
        res = solve_salr(inst, rho, norm, pmap=pmap)
        if res.status != "optimal":
            raise SharpAldError(f"SALR subproblem is {res.status} at rho = {rho}")
        return res.z, "approximate" if res.approximate else "exact"
    grid, table = l2_cache if l2_cache is not None else (_l2_grid(inst, pmap), None)
    val = salr_oracle(inst, rho, norm, grid=grid, table=table, pmap=pmap)
    return val.value, "oracle-exhaustive" if grid is None else "oracle-grid"


def _l2_table(inst: ProblemInstance, pmap=map):
    """Grid and value table shared by every rho of an l2 sweep."""
    grid = _l2_grid(inst, pmap)
    probe = salr_oracle(inst, 1, "l2", grid=grid, pmap=pmap)
    return grid, probe.samples


def rho_sweep(inst: ProblemInstance, schedule, norm: str = "l1", z_IP=None, pmap=map) -> list:
    check_norm(norm)
    schedule = [as_rational(r) for r in schedule]
    if not schedule or any(r <= 0 for r in schedule):
        raise ArgumentError("rho schedule must be positive")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ArgumentError("rho schedule must be strictly increasing")
    z = _z_ip(inst, z_IP, pmap=pmap)
    if norm == "l2":
        cache = _l2_table(inst, pmap)
        vals = [salr_value(inst, r, norm, l2_cache=cache) for r in schedule]
    else:
        vals = list(pmap(lambda r: salr_value(inst, r, norm), schedule))
    return [SweepRecord(r, v, z - v, norm, fid) for r, (v, fid) in zip(schedule, vals)]


def sweep_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rho", "z_salr", "gap", "norm", "fidelity"])
    for r in records:
        w.writerow([_fmt(r.rho), _fmt(r.z_salr), _fmt(r.gap), r.norm, r.fidelity])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, Fraction) or isinstance(v, int):
        return format_rational(v)
    return repr(float(v))


def gap_closed(gap, exact: bool, closure_tol: float = 2 * DEFAULT_TOL) -> bool:
    return gap == 0 if exact else gap <= closure_tol


def bisect_threshold(inst: ProblemInstance, rho_hi, tol, norm: str = "l1", z_IP=None,
                     closure_tol: float = 2 * DEFAULT_TOL, pmap=map):
    """Bracket [lo, hi] of width <= tol around the infimum of gap-closing rho."""
    tol = as_rational(tol)
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    rho_hi = as_rational(rho_hi)
    z = _z_ip(inst, z_IP, pmap=pmap)
    exact = inst.objective.exact

    def closed(r):
        v, _ = salr_value(inst, r, norm, pmap)
        return gap_closed(z - v, exact, closure_tol)

    if not closed(rho_hi):
        raise ArgumentError(f"gap is not closed at rho_hi = {rho_hi}; bisection needs a closing upper end")
    lo, hi = ZERO, rho_hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if closed(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


@dataclass
class AscentResult:
    best: Fraction | float
    best_lambda: tuple
    trace: list  # (k, lambda, value)
    heuristic: bool = True


def ald_ascent(inst: ProblemInstance, rho, psi: str = "l1", steps: int = 20, a=1, lam0=None, z_IP=None,
               closure_tol: float = 2 * DEFAULT_TOL) -> AscentResult:
    """Subgradient ascent lambda += a/(k+1) (b - A x*) on the augmented dual.

    An unbounded inner problem means the step overshot; the step is halved
    back toward the previous multiplier until the inner problem is bounded.
    """
    rho = as_rational(rho)
    a = as_rational(a)
    lam = tuple(as_rational(v) for v in lam0) if lam0 is not None else tuple(ZERO for _ in range(inst.m))
    z = _z_ip(inst, z_IP)
    exact = inst.objective.exact
    trace = []
    best, best_lam = None, lam

    res = solve_alr(inst, lam, rho, psi)
    if res.status != "optimal":
        raise SharpAldError(f"inner problem is {res.status} at the starting multiplier")
    for k in range(steps):
        val = res.z
        if (val > z) if exact else (val > z + closure_tol):
            raise AssertionError(f"weak duality violated: {val} > z_IP = {z}")
        trace.append((k, lam, val))
        if best is None or val > best:
            best, best_lam = val, lam
        g = tuple(Fraction(v) for v in res.u)
        if all(v == 0 for v in g):
            break
        step = a / (k + 1)
        for _ in range(40):
            cand = tuple(l + step * gi for l, gi in zip(lam, g))
            nxt = solve_alr(inst, cand, rho, psi)
            if nxt.status == "optimal":
                break
            step /= 2
        else:
            break
        lam, res = cand, nxt
    return AscentResult(best, best_lam, trace)


@dataclass
class AsymptoticRecord:
    rho: Fraction
    value: Fraction | float
    gap: Fraction | float
    oracle_value: Fraction | float | None = None


def geometric_schedule(start=1, ratio=10, stop=10**4) -> list:
    out, r = [], as_rational(start)
    while r <= stop:
        out.append(r)
        r *= ratio
    return out


def asymptotic_experiment(inst: ProblemInstance, schedule=None, psi: str = "sq_l2", z_IP=None, oracle=None) -> list:
    """Gap of the squared-l2 augmented relaxation (lambda = 0) along a geometric rho schedule.

    ``oracle``, if given, maps rho to an independently computed value recorded alongside.
    """
    if psi != "sq_l2":
        raise ArgumentError("the asymptotic experiment uses the squared-l2 augmenting function")
    if inst.M is None:
        cert = check_recession_condition(inst)
        if not cert.holds:
            raise TheoremHypothesisViolated(f"common recession direction {cert.direction}")
    schedule = geometric_schedule() if schedule is None else [as_rational(r) for r in schedule]
    z = _z_ip(inst, z_IP)
    out = []
    for r in schedule:
        res = solve_alr(inst, [0] * inst.m, r, "sq_l2")
        if res.status != "optimal":
            raise SharpAldError(f"augmented relaxation is {res.status} at rho = {r}")
        out.append(AsymptoticRecord(r, res.z, z - res.z, oracle(r) if oracle else None))
    return out


def instance_class(inst: ProblemInstance) -> str:
    if inst.kind == "linear":
        return "PICP" if inst.is_pure_integer else "MILP"
    if inst.kind == "quadratic" and inst.M is not None:
        return "MIQP"
    return "MICP-a" if inst.M is not None else "MICP-b"


@dataclass
class PenaltyCertificate:
    instance: str
    cls: str
    norm: str
    rho_star: Fraction
    constants: dict
    rho_emp: tuple | None
    verdict: str  # closed | not-closed-at-cap
    z_IP: Fraction | float
    gap_at_rho_star: Fraction | float
    fidelity: str
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "class": self.cls,
            "norm": self.norm,
            "rho_star": _fmt(self.rho_star),
            "rho_emp_bracket": [_fmt(v) for v in self.rho_emp] if self.rho_emp else None,
            "verdict": self.verdict,
            "z_IP": _fmt(self.z_IP),
            "gap_at_rho_star": _fmt(self.gap_at_rho_star),
            "fidelity": self.fidelity,
            "constants": self.constants,
            "notes": list(self.notes),
        }


def theoretical_constants(inst: ProblemInstance, norm: str = "l1", pmap=map, cap: int = DEFAULT_BASIS_CAP):
    cls = instance_class(inst)
    if cls == "PICP":
        return cls, picp_constants(inst, norm)
    if cls == "MILP":
        return cls, milp_constants(inst, norm, cap=cap)
    if cls == "MIQP":
        return cls, miqp_constants(inst, norm, cap=cap, pmap=pmap)
    return cls, micp_gamma(inst, norm, cap=cap, pmap=pmap)


def certify(inst: ProblemInstance, norm: str = "l1", bisect_tol=None, closure_tol: float = 2 * DEFAULT_TOL,
            pmap=map, cap: int = DEFAULT_BASIS_CAP) -> PenaltyCertificate:
    """Theoretical rho_star, closure check at rho_star and an empirical bisection bracket."""
    check_norm(norm)
    cls, consts = theoretical_constants(inst, norm, pmap, cap)
    rho = consts.rho_star
    exact = inst.objective.exact
    work = inst if cls != "MICP-b" else replace(inst, M=consts.M_used)
    z = _z_ip(work, pmap=pmap)
    notes = []
    # z_SALR is concave and nondecreasing in rho, so closure for every rho > rho_star gives closure at rho_star;
    # rho_star may be 0 when the relaxation is tight, where the closure test uses a tiny positive rho instead
    probe = rho if rho > 0 else Fraction(1, 10**6)
    val, fid = salr_value(work, probe, norm, pmap)
    gap = z - val
    closed = gap_closed(gap, exact and fid == "exact", closure_tol)
    bracket = None
    if closed:
        tol = as_rational(bisect_tol) if bisect_tol is not None else max(probe / 64, Fraction(1, 10**6))
        bracket = bisect_threshold(work, probe, tol, norm, z, closure_tol, pmap)
    else:
        notes.append("gap not closed at the theoretical threshold")
    return PenaltyCertificate(inst.name, cls, norm, rho, constants_to_json(consts), bracket,
                              "closed" if closed else "not-closed-at-cap", z, gap, fid, notes)
