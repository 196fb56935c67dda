"""Embedded corpus property suite behind the ``selftest`` command."""
from __future__ import annotations

from fractions import Fraction

from . import corpus
from .mipsolve import solve_by_enumeration, solve_mip
from .penalty import picp_constants
from .saldual import rho_sweep, salr_value
from .valuefn import salr_oracle

SCHEDULE = [Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)]


def _check(name, inst, ok, detail=""):
    return {"check": name, "instance": inst.name, "passed": bool(ok), "detail": detail}


def run_selftest(seed: int = 0, pmap=map) -> list:
    """One record per (check, instance); deterministic for a given seed whatever ``pmap`` is."""
    out = []
    for inst in corpus.full_corpus(seed):
        bb = solve_mip(inst, pmap=pmap)
        if inst.M is not None:
            en = solve_by_enumeration(inst, pmap=pmap)
            out.append(_check("mip-matches-enumeration", inst, bb.z == en.z, f"z = {bb.z}"))
        recs = rho_sweep(inst, SCHEDULE, "l1", z_IP=bb.z, pmap=pmap)
        gaps = [r.gap for r in recs]
        out.append(_check("weak-duality", inst, all(g >= 0 for g in gaps), " ".join(str(g) for g in gaps)))
        out.append(_check("gap-monotone", inst, all(b <= a for a, b in zip(gaps, gaps[1:]))))
        if inst.is_pure_integer and inst.kind == "linear":
            rho = picp_constants(inst, "l1", z_IP=bb.z).rho_star * Fraction(101, 100)
            z, _ = salr_value(inst, rho, "l1", pmap)
            out.append(_check("picp-closure", inst, z == bb.z, f"rho = {rho}"))
            orc = salr_oracle(inst, 1, "l1", pmap=pmap)
            z1, _ = salr_value(inst, 1, "l1", pmap)
            out.append(_check("salr-matches-value-function", inst, orc.certified and orc.value == z1))
    return out
