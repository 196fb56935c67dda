"""Value function phi(u), perturbation grids and the brute-force SALR oracle.

phi(u) is the optimal value of the instance with A x = b + u; infeasible
perturbations are kept with value +inf.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArgumentError, InvalidRho, ResourceLimit
from .exactnum import as_rational, check_norm, dual_norm_upper, format_rational, norm_sq_l2, norm_upper
from .mipsolve import enumerate_integer_points, is_feasible, solve_by_enumeration, solve_mip
from .model import ProblemInstance

DEFAULT_GRID_CAP = 100_000


@dataclass
class ValueSample:
    u: tuple
    phi: Fraction | float
    x: tuple | None
    restricted: list | None = None  # [(x_I, Phi(u, x_I))] when enumeration was used
    approximate: bool = False

    @property
    def feasible(self) -> bool:
        return self.phi != math.inf


def phi(inst: ProblemInstance, u, restricted: bool = False, pmap=map, **kw) -> ValueSample:
    """phi(u) = min f(x) over x in X with A x = b + u."""
    u = tuple(as_rational(v) for v in u)
    shifted = inst.shifted(u)
    if restricted:
        if inst.M is None:
            raise ArgumentError("restricted values need the integer bound M")
        sol, parts = solve_by_enumeration(shifted, pmap=pmap, keep_all=True)
        table = [(r.x_I, r.z) for r in parts]
    else:
        sol = solve_mip(shifted, pmap=pmap, **kw)
        table = None
    if sol.status == "infeasible":
        return ValueSample(u, math.inf, None, table)
    if sol.status == "unbounded":
        return ValueSample(u, -math.inf, None, table)
    return ValueSample(u, sol.z, sol.x, table, sol.approximate)


def norm_value(u, norm: str):
    """Exact norm for l1/linf; float for l2 (irrational in general)."""
    if norm == "l2":
        sq = norm_sq_l2(u)
        r = math.isqrt(sq.numerator), math.isqrt(sq.denominator)
        if r[0] ** 2 == sq.numerator and r[1] ** 2 == sq.denominator:
            return Fraction(r[0], r[1])
        return math.sqrt(sq)
    return norm_upper(u, norm)


def within(u, delta, norm: str) -> bool:
    if norm == "l2":
        return norm_sq_l2(u) <= Fraction(delta) ** 2
    return norm_upper(u, norm) <= delta


@dataclass
class UGrid:
    mode: str  # exact-enumeration | lattice-grid
    delta: Fraction | None
    samples: list
    norm: str
    pitch: Fraction | None = None
    complete: bool = False  # every reachable u within delta is present
    exhaustive: bool = False  # every reachable u at all is present
    feasible: list = field(default_factory=list)


def _integral_data(inst: ProblemInstance) -> bool:
    return inst.A.is_integral() and all(v.denominator == 1 for v in inst.b)


def _box_points(inst: ProblemInstance, cap: int):
    """(x, u = A x - b) for every integer box point satisfying E x <= f (pure-integer, M given)."""
    if not inst.is_pure_integer or inst.M is None:
        raise ArgumentError("reachable residual enumeration needs a pure-integer instance with M")
    for p in enumerate_integer_points(inst, cap):
        x = [None] * inst.n
        for j, v in zip(inst.integer, p):
            x[j] = v
        if all(lhs <= rhs for lhs, rhs in zip(inst.E @ x, inst.f_rhs)):
            yield tuple(x), tuple(ai - bi for bi, ai in zip(inst.b, inst.A @ x))


def reachable_perturbations(inst: ProblemInstance, cap: int = DEFAULT_GRID_CAP) -> list:
    """Every u = A x - b (so that x lies in H_u) over integer points of the box that satisfy E x <= f (pure-integer, M given)."""
    return sorted({u for _, u in _box_points(inst, cap)})


def exhaustive_table(inst: ProblemInstance, cap: int = DEFAULT_GRID_CAP) -> list:
    """phi at every reachable u from one pass over the box, sorted by u.

    Each box point belongs to exactly one H_u, so phi(u) is the smallest
    objective among the points landing on u.
    """
    best = {}
    for x, u in _box_points(inst, cap):
        val = inst.objective.value(x)
        if u not in best or val < best[u][0]:
            best[u] = (val, x)
    return [ValueSample(u, v, x) for u, (v, x) in sorted(best.items())]


def build_grid(inst: ProblemInstance, delta, pitch=None, norm: str = "l1", cap: int = DEFAULT_GRID_CAP,
               mode: str | None = None, pmap=map) -> UGrid:
    """Perturbation samples in N_delta(0), each tagged feasible or infeasible.

    exact-enumeration (pure-integer, integral A and b): the integral u with
    ||u|| <= delta; when M is given these come from enumerating the box, which
    also proves completeness.  lattice-grid: multiples of ``pitch`` per coordinate.
    """
    check_norm(norm)
    delta = as_rational(delta)
    if delta <= 0:
        raise ArgumentError("delta must be positive")
    if mode is None:
        mode = "exact-enumeration" if inst.is_pure_integer and _integral_data(inst) else "lattice-grid"
    m = inst.m
    if mode == "exact-enumeration":
        if not (inst.is_pure_integer and _integral_data(inst)):
            raise ArgumentError("exact enumeration needs a pure-integer instance with integral A and b")
        if inst.M is not None:
            everything = reachable_perturbations(inst, cap)
            reach = [u for u in everything if within(u, delta, norm)]
            return UGrid(mode, delta, reach, norm, complete=True, exhaustive=len(reach) == len(everything),
                         feasible=[True] * len(reach))
        r = int(math.floor(delta))
        count = (2 * r + 1) ** m
        if count > cap:
            raise ResourceLimit(f"{count} grid points exceed cap {cap}", count, cap)
        samples = [tuple(Fraction(v) for v in p) for p in itertools.product(range(-r, r + 1), repeat=m)]
        pitch_used = Fraction(1)
    elif mode == "lattice-grid":
        if pitch is None:
            raise ArgumentError("lattice-grid mode needs a pitch")
        pitch_used = as_rational(pitch)
        if pitch_used <= 0:
            raise ArgumentError("pitch must be positive")
        k = int(math.floor(delta / pitch_used))
        count = (2 * k + 1) ** m
        if count > cap:
            raise ResourceLimit(f"{count} grid points exceed cap {cap}", count, cap)
        samples = [tuple(v * pitch_used for v in p) for p in itertools.product(range(-k, k + 1), repeat=m)]
    else:
        raise ArgumentError(f"unknown grid mode {mode!r}")
    samples = [u for u in samples if within(u, delta, norm)]
    feas = list(pmap(lambda u: is_feasible(inst.shifted(u)), samples))
    return UGrid(mode, delta, samples, norm, pitch_used, complete=mode == "exact-enumeration", feasible=feas)


def u_radius(z_IP, z_R, lam_A, rho, norm: str = "l1") -> Fraction:
    """(z_IP - z_R) / (rho - ||lam_A||_*): every SALR minimizer's residual lies within it."""
    rho = as_rational(rho)
    dn = dual_norm_upper(lam_A, norm)
    if rho <= dn:
        raise InvalidRho(f"rho = {rho} must exceed the dual norm {dn} of lambda_A")
    return (as_rational(z_IP) - as_rational(z_R)) / (rho - dn)


@dataclass
class OracleValue:
    value: Fraction | float
    u: tuple | None
    certified: bool
    samples: list
    note: str = ""


def value_table(inst: ProblemInstance, grid: UGrid, pmap=map, **kw) -> list:
    """phi at every feasible grid sample (infeasible ones recorded as +inf)."""
    feas_u = [u for u, ok in zip(grid.samples, grid.feasible) if ok]
    vals = list(pmap(lambda u: phi(inst, u, **kw), feas_u))
    by_u = {s.u: s for s in vals}
    return [by_u.get(u, ValueSample(u, math.inf, None)) for u in grid.samples]


def salr_oracle(inst: ProblemInstance, rho, norm: str = "l1", grid: UGrid | None = None, table=None,
                radius=None, pmap=map) -> OracleValue:
    """min over grid samples of phi(u) + rho ||u||.

    Exact (certified) only when the grid provably holds every candidate
    residual: either it is a complete enumeration reaching past ``radius``
    (the bound from :func:`u_radius`) or it lists every reachable u.
    """
    rho = as_rational(rho)
    if rho < 0:
        raise ArgumentError("rho must be nonnegative")
    if grid is None:
        if not (inst.is_pure_integer and inst.M is not None):
            raise ArgumentError("a grid is required unless the instance is pure-integer with M")
        if table is None:
            table = exhaustive_table(inst)
        reach = [s.u for s in table]
        grid = UGrid("exact-enumeration", None, reach, norm, complete=True, exhaustive=True,
                     feasible=[True] * len(reach))
    if table is None:
        table = value_table(inst, grid, pmap)
    best, best_u = math.inf, None
    for s in table:
        if not s.feasible:
            continue
        val = s.phi + rho * norm_value(s.u, norm)
        if val < best:
            best, best_u = val, s.u
    by_radius = grid.complete and radius is not None and grid.delta is not None and grid.delta >= radius
    certified = bool(grid.exhaustive or by_radius) and norm != "l2" and not any(s.approximate for s in table)
    note = "complete enumeration" if certified else "grid coverage not certified; lower-fidelity value"
    return OracleValue(best, best_u, certified, table, note)


def export_csv(samples: list, n: int | None = None) -> str:
    """CSV with columns u_1..u_m, phi, feasible, x_1..x_n."""
    if not samples:
        return ""
    m = len(samples[0].u)
    if n is None:
        n = max((len(s.x) for s in samples if s.x is not None), default=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"u_{i + 1}" for i in range(m)] + ["phi", "feasible"] + [f"x_{j + 1}" for j in range(n)])
    for s in samples:
        ph = "inf" if s.phi == math.inf else ("-inf" if s.phi == -math.inf else _fmt(s.phi))
        xs = [_fmt(v) for v in s.x] if s.x is not None else [""] * n
        w.writerow([format_rational(v) for v in s.u] + [ph, int(s.feasible)] + xs)
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, Fraction) or isinstance(v, int):
        return format_rational(v)
    return repr(float(v))
