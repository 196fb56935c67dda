"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Lines are printed with capture disabled so they show up in a plain ``pytest`` run.
"""
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from sharpald import corpus
from sharpald.cli import main
from sharpald.cvxsub import gradient_check, solve_qp
from sharpald.lpsolve import solve_lp_general
from sharpald.mipsolve import solve_mip, solve_salr
from sharpald.penalty import micp_gamma, milp_constants, miqp_constants, picp_constants
from sharpald.oracles import REGISTRY, make_oracle
from sharpald.saldual import asymptotic_experiment, certify, geometric_schedule, rho_sweep
from sharpald.valuefn import (UGrid, build_grid, norm_value, phi, reachable_perturbations, salr_oracle, u_radius,
                              value_table)

from oracles import lp_vertex_min, mip_box_min, qp_min

RHOS = [Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)]


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, label="criterion"):
        with capsys.disabled():
            print(f"\n[{label} {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return emit


def test_criterion_01_salr_matches_value_function_oracle(report):
    start = time.perf_counter()
    mismatches, count = [], 0
    for seed in range(10):
        inst = corpus.random_pure_integer(seed)
        for rho in RHOS:
            orc = salr_oracle(inst, rho, "l1")
            got = solve_salr(inst, rho, "l1")
            count += 1
            if not orc.certified or got.z != orc.value:
                mismatches.append((inst.name, rho, got.z, orc.value))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 120
    report(1, ok, f"{count} (instance, rho) pairs, {len(mismatches)} mismatches, {elapsed:.1f}s (limit 120s)")
    assert ok, mismatches


def test_criterion_02_picp_closure_and_radius(report):
    failures, checked = [], 0
    for inst in corpus.picp_corpus(0, 6):
        pc = picp_constants(inst, "l1")
        base = pc.rho_star * Fraction(101, 100)
        for rho in (base, 2 * base, 4 * base, 10 * base):
            z = solve_salr(inst, rho, "l1").z
            if z != pc.z_IP:
                failures.append(("gap", inst.name, rho, pc.z_IP - z))
            table = [s for s in value_table(inst, build_grid_all(inst)) if s.feasible]
            radius = u_radius(pc.z_IP, pc.z_R, pc.lambda_A, rho, "l1") if rho > pc.lambda_A_dual_norm else None
            for s in table:
                checked += 1
                if s.phi + rho * norm_value(s.u, "l1") <= pc.z_IP:
                    if radius is None or norm_value(s.u, "l1") > radius:
                        failures.append(("radius", inst.name, rho, s.u))
    ok = not failures
    report(2, ok, f"7 PICP instances x 4 rho, {checked} table rows checked, {len(failures)} failures")
    assert ok, failures


def build_grid_all(inst):
    reach = reachable_perturbations(inst)
    return UGrid("exact-enumeration", None, reach, "l1", complete=True, exhaustive=True, feasible=[True] * len(reach))


def test_criterion_03_milp_lipschitz_region_and_closure(report):
    violations, one_sided, closures, samples = [], [], [], 0
    for inst in corpus.milp_corpus(0, 5):
        mc = milp_constants(inst, "l1")
        z = solve_mip(inst).z
        grid = build_grid(inst, mc.delta, mc.delta / 4, "l1")
        for s in value_table(inst, grid):
            if not s.feasible:
                continue
            samples += 1
            bound = mc.Gamma * norm_value(s.u, "l1")
            if abs(s.phi - z) > bound:
                violations.append((inst.name, s.u, s.phi - z, bound))
            if s.phi < z - bound:
                one_sided.append((inst.name, s.u))
        # a tight relaxation gives rho_star = 0, where closure is probed just above it
        probe = mc.rho_star if mc.rho_star > 0 else Fraction(1, 10**6)
        if solve_salr(inst, probe, "l1").z != z:
            closures.append(inst.name)
    names = sorted({v[0] for v in violations})
    ok = not violations and not closures
    report(3, ok, f"{samples} samples on 6 MILPs: {len(violations)} two-sided violations on {names or 'none'}; "
                  f"closure at rho_star failed on {closures or 'none'}")
    report("3", not one_sided and not closures,
           f"one-sided variant phi(u) >= phi(0) - Gamma||u||: {len(one_sided)} violations", label="info")
    assert ok, violations[:5]


def test_criterion_04_miqp_quadratic_bound(report):
    failures, samples = [], 0
    for inst in corpus.miqp_corpus(0, 3):
        qc = miqp_constants(inst, "l1")
        z = solve_mip(inst).z
        for k in range(-20, 21):
            u = [Fraction(k, 80)] + [Fraction(0)] * (inst.m - 1)
            s = phi(inst, u)
            if not s.feasible:
                continue
            samples += 1
            r = norm_value(u, "l1")
            if abs(s.phi - z) > qc.K1 * r * r + qc.K2 * r:
                failures.append((inst.name, u))
    ok = not failures and samples >= 4 * 20
    report(4, ok, f"{samples} samples with ||u|| <= 1/4 on 4 MIQPs, {len(failures)} violations")
    assert ok, failures


def test_criterion_05_strongly_convex_path(report):
    rows, ok = [], True
    for inst, tol in ((corpus.norm_sq_quadratic(), 0), (corpus.norm_sq_oracle(), 1e-6)):
        mc = micp_gamma(inst, "l1")
        cert = certify(inst, "l1")
        good = mc.Gamma <= mc.Gamma_formula and (cert.gap_at_rho_star == 0 if tol == 0 else
                                                   abs(cert.gap_at_rho_star) <= tol)
        ok &= good
        rows.append(f"{inst.kind}: Gamma {float(mc.Gamma):.4g} <= {mc.Gamma_formula:.4g}, "
                    f"gap {float(cert.gap_at_rho_star):.2g}")
    report(5, ok, "; ".join(rows))
    assert ok


def test_criterion_06_weak_duality_and_monotonicity(report):
    bad, sweeps = [], 0
    sched = [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4), Fraction(8)]
    insts = corpus.full_corpus(0) + corpus.milp_corpus(1, 3) + corpus.picp_corpus(1, 3)
    for inst in insts:
        norms = ["l1", "linf"] + (["l2"] if inst.is_pure_integer and inst.M is not None else [])
        for norm in norms:
            gaps = [r.gap for r in rho_sweep(inst, sched, norm)]
            sweeps += 1
            if any(g < 0 for g in gaps) or any(b > a for a, b in zip(gaps, gaps[1:])):
                bad.append((inst.name, norm, gaps))
    ok = not bad
    report(6, ok, f"{sweeps} sweeps over {len(insts)} instances, {len(bad)} violations")
    assert ok, bad


def _random_rows(rng, k, n, lo=-3, hi=3):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(k)]


def _box(n, r):
    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    return eye + [[-v for v in row] for row in eye], [r] * (2 * n)


def test_criterion_07_solver_oracles(report):
    rng = random.Random(2024)
    lp_bad = qp_bad = mip_bad = 0
    lp_n = qp_n = mip_n = 0
    for _ in range(40):
        n = rng.randint(1, 3)
        c = [rng.randint(-3, 3) for _ in range(n)]
        Aeq = _random_rows(rng, rng.randint(0, 1), n)
        beq = [rng.randint(-4, 4) for _ in Aeq]
        Gb, hb = _box(n, 4)
        G0 = _random_rows(rng, rng.randint(0, 2), n)
        G, h = G0 + Gb, [rng.randint(-4, 4) for _ in G0] + hb
        res = solve_lp_general(c, Aeq, beq, G, h)
        want = lp_vertex_min(c, Aeq, beq, G, h)
        lp_n += 1
        lp_bad += not ((want is None and res.status == "infeasible") or (res.status == "optimal" and res.z == want))
    for _ in range(40):
        n = rng.randint(1, 3)
        L = _random_rows(rng, n, n)
        Q = [[sum(L[k][i] * L[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        c = [rng.randint(-3, 3) for _ in range(n)]
        Aeq = _random_rows(rng, rng.randint(0, 1), n)
        beq = [rng.randint(-3, 3) for _ in Aeq]
        Gb, _ = _box(n, 0)
        G0 = _random_rows(rng, rng.randint(0, 6 - 2 * n), n)
        G = G0 + Gb
        h = [rng.randint(0, 3) for _ in G]
        res = solve_qp(Q, c, Aeq, beq, G, h)
        want = qp_min(Q, c, Aeq, beq, G, h)
        qp_n += 1
        qp_bad += not ((want is None and res.status == "infeasible") or (res.status == "optimal" and res.z == want))
    for make in (corpus.random_pure_integer, corpus.random_milp, corpus.random_miqp):
        for seed in range(12):
            inst = make(seed)
            if (2 * inst.M + 1) ** inst.n1 > 100:
                continue
            mip_n += 1
            mip_bad += solve_mip(inst).z != mip_box_min(inst)
    ok = lp_bad == qp_bad == mip_bad == 0
    report(7, ok, f"LP {lp_n - lp_bad}/{lp_n}, QP {qp_n - qp_bad}/{qp_n}, MIP {mip_n - mip_bad}/{mip_n} exact matches")
    assert ok


def test_criterion_08_gradient_check(report):
    rng = np.random.default_rng(11)
    worst = {}
    for name in sorted(REGISTRY):
        worst[name] = gradient_check(make_oracle(name, 3), rng.normal(size=(10, 3)))
    ok = all(v <= 1e-5 for v in worst.values())
    report(8, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (limit 1e-5)")
    assert ok


def test_criterion_09_asymptotic_closure(report):
    inst = corpus.asymptotic_instance()
    z = solve_mip(inst).z
    below = phi(inst, [Fraction(1, 8)]).phi < z
    recs = asymptotic_experiment(inst, geometric_schedule(1, 10, 10**4), oracle=corpus.asymptotic_gap)
    matches = all(r.gap == r.oracle_value for r in recs)
    ok = below and matches and recs[0].gap > 0 and recs[-1].gap <= Fraction(1, 1000) * abs(z) \
        and recs[-1].rho == 10**4
    report(9, ok, f"gap {float(recs[0].gap):.3g} at rho=1, {float(recs[-1].gap):.3g} at rho=1e4 "
                  f"(limit {0.001 * abs(z):.3g}), closed form matched: {matches}")
    assert ok


def test_criterion_10_selftest_determinism(report, tmp_path):
    outs = []
    for w in (1, 4):
        path = tmp_path / f"selftest-{w}.json"
        assert main(["selftest", "--workers", str(w), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1]
    report(10, ok, f"selftest output identical for workers 1 and 4 ({len(outs[0])} bytes)")
    assert ok
