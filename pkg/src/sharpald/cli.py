"""Command-line entry point: ``python3 -m sharpald <command> [instance] [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from .cvxsub import DEFAULT_TOL
from .errors import (InstanceError, ResourceLimit, SharpAldError, TheoremHypothesisViolated, Unconverged,
                     Undecidable)
from .exactnum import NORMS, as_rational, format_rational
from .fileio import canonical_json, instance_hash, load_instance
from .lpsolve import solve_lp
from .mipsolve import DEFAULT_NODE_CAP, solve_mip, solve_salr
from .model import check_recession_condition
from .parallel import make_pmap
from .penalty import constants_to_json, relax_continuous
from .ratlinalg import DEFAULT_BASIS_CAP
from .saldual import (asymptotic_experiment, certify, geometric_schedule, rho_sweep, salr_value, sweep_csv,
                      theoretical_constants)
from .selftest import run_selftest
from .valuefn import DEFAULT_GRID_CAP, build_grid, export_csv, value_table

COMMANDS = ("validate", "relax", "solve", "valuefn", "constants", "salr", "sweep", "certify", "recession",
            "asymptotic", "selftest")

EXIT_OK, EXIT_INSTANCE, EXIT_RESOURCE, EXIT_HYPOTHESIS = 0, 1, 2, 3


@dataclasses.dataclass
class RunConfig:
    norm: str = "l1"
    tol: float = DEFAULT_TOL
    basis_cap: int = DEFAULT_BASIS_CAP
    node_cap: int = DEFAULT_NODE_CAP
    grid_cap: int = DEFAULT_GRID_CAP
    seed: int = 0
    output: str = "json"
    workers: int = 1

    def embedded(self) -> dict:
        # the worker count is left out so outputs do not depend on it
        d = dataclasses.asdict(self)
        del d["workers"]
        return d


def parse_caps(text: str | None, cfg: RunConfig) -> None:
    """``basis_cap=N,node_cap=N,grid_cap=N`` or a bare integer applied to all three."""
    if not text:
        return
    text = text.strip()
    if text.isdigit():
        cfg.basis_cap = cfg.node_cap = cfg.grid_cap = int(text)
    else:
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in ("basis_cap", "node_cap", "grid_cap"):
                raise argparse.ArgumentTypeError(f"unknown cap {key!r}")
            setattr(cfg, key, int(val))
    if min(cfg.basis_cap, cfg.node_cap, cfg.grid_cap) <= 0:
        raise argparse.ArgumentTypeError("caps must be positive")


def jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if dataclasses.is_dataclass(v) and not isinstance(v, type):
        return {f.name: jsonable(getattr(v, f.name)) for f in dataclasses.fields(v)}
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sharpald", description="Sharp augmented Lagrangian toolkit.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("instance", nargs="?", help="instance JSON file (not used by selftest)")
    p.add_argument("--norm", choices=NORMS, default="l1")
    p.add_argument("--rho", help="penalty parameter, e.g. 1/2")
    p.add_argument("--rho-max", help="largest rho of a halving schedule for sweep")
    p.add_argument("--schedule", help="comma-separated rho values")
    p.add_argument("--delta", help="perturbation radius for valuefn")
    p.add_argument("--pitch", help="lattice pitch for valuefn")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--caps", help="basis_cap=N,node_cap=N,grid_cap=N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the machine-readable result here")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _rationals(text: str) -> list:
    return [as_rational(t.strip()) for t in text.split(",") if t.strip()]


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise InstanceError([(f"--{name.replace('_', '-')}", "required for this command")])
    return val


def dispatch(args, cfg: RunConfig, pmap):
    """Returns (human text, JSON payload, CSV text or None)."""
    if args.command == "selftest":
        records = run_selftest(cfg.seed, pmap)
        failed = [r for r in records if not r["passed"]]
        text = f"{len(records) - len(failed)}/{len(records)} checks passed"
        for r in failed:
            text += f"\nFAIL {r['check']} on {r['instance']}"
        return text, {"checks": records, "passed": not failed}, None

    if args.instance is None:
        raise InstanceError([("instance", "an instance file is required")])
    inst = load_instance(args.instance)
    cmd = args.command
    if cmd == "validate":
        res = {"n": inst.n, "m": inst.m, "p": inst.p, "kind": inst.kind, "integer": list(inst.integer)}
        return f"valid instance {inst.name!r}: n={inst.n} m={inst.m} p={inst.p} kind={inst.kind}", res, None
    if cmd == "relax":
        if inst.kind == "linear":
            rel = solve_lp(inst)
            return f"relaxation {rel.status}: z_R = {jsonable(rel.z)}", jsonable(rel), None
        z, lam, approx = relax_continuous(inst, cfg.tol)
        res = {"status": "optimal", "z": z, "lambda_A": lam, "approximate": approx}
        return f"relaxation: z_R = {jsonable(z)}", jsonable(res), None
    if cmd == "solve":
        sol = solve_mip(inst, node_cap=cfg.node_cap, tol=cfg.tol, pmap=pmap)
        return f"{sol.status}: z_IP = {jsonable(sol.z)} at x = {jsonable(sol.x)}", jsonable(sol), None
    if cmd == "valuefn":
        grid = build_grid(inst, _need(args, "delta"), args.pitch, cfg.norm, cfg.grid_cap, pmap=pmap)
        table = value_table(inst, grid, pmap)
        res = {"mode": grid.mode, "complete": grid.complete, "samples": len(table),
               "table": [{"u": s.u, "phi": s.phi, "x": s.x} for s in table]}
        return f"{len(table)} samples ({grid.mode})", jsonable(res), export_csv(table, inst.n)
    if cmd == "constants":
        cls, consts = theoretical_constants(inst, cfg.norm, pmap, cfg.basis_cap)
        return f"{cls}: rho_star = {jsonable(consts.rho_star)}", {"class": cls, **constants_to_json(consts)}, None
    if cmd == "salr":
        rho = as_rational(_need(args, "rho"))
        if cfg.norm == "l2":
            z, fid = salr_value(inst, rho, "l2", pmap)
            return f"z_SALR({format_rational(rho)}) = {jsonable(z)} ({fid})", {"z": jsonable(z), "fidelity": fid}, None
        sol = solve_salr(inst, rho, cfg.norm, node_cap=cfg.node_cap, pmap=pmap)
        return f"z_SALR({format_rational(rho)}) = {jsonable(sol.z)}", jsonable(sol), None
    if cmd == "sweep":
        if args.schedule:
            schedule = _rationals(args.schedule)
        else:
            top = as_rational(_need(args, "rho_max"))
            schedule = [top / 2**k for k in range(7, -1, -1)]
        recs = rho_sweep(inst, schedule, cfg.norm, pmap=pmap)
        text = "\n".join(f"rho={jsonable(r.rho)} gap={jsonable(r.gap)} [{r.fidelity}]" for r in recs)
        return text, {"records": jsonable(recs)}, sweep_csv(recs)
    if cmd == "certify":
        cert = certify(inst, cfg.norm, pmap=pmap, cap=cfg.basis_cap)
        return f"{cert.cls}: rho_star = {format_rational(cert.rho_star)}, verdict {cert.verdict}", cert.to_json(), None
    if cmd == "recession":
        rc = check_recession_condition(inst)
        if not rc.holds:
            raise TheoremHypothesisViolated(f"shared recession direction {jsonable(rc.direction)}: {rc.reason}")
        return f"recession condition holds ({rc.reason})", jsonable(rc), None
    if cmd == "asymptotic":
        schedule = _rationals(args.schedule) if args.schedule else geometric_schedule()
        recs = asymptotic_experiment(inst, schedule)
        text = "\n".join(f"rho={jsonable(r.rho)} gap={jsonable(r.gap)}" for r in recs)
        return text, {"records": jsonable(recs)}, None
    raise InstanceError([("command", f"unknown command {cmd!r}")])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INSTANCE if exc.code else EXIT_OK
    cfg = RunConfig(norm=args.norm, tol=args.tol, seed=args.seed, output=args.format, workers=args.workers)
    try:
        parse_caps(os.environ.get("SHARP_ALD_CAP_OVERRIDE") or args.caps, cfg)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    pmap = make_pmap(cfg.workers)
    try:
        text, payload, csv_text = dispatch(args, cfg, pmap)
    except InstanceError as exc:
        for path, msg in exc.violations:
            print(f"{path}: {msg}", file=sys.stderr)
        return EXIT_INSTANCE
    except (ResourceLimit, Unconverged) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (TheoremHypothesisViolated, Undecidable) as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (SharpAldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    print(text)
    if args.out:
        digest = None
        if args.instance is not None:
            digest = instance_hash(load_instance(args.instance))
        header = {"command": args.command, "config": cfg.embedded(), "instance_sha256": digest}
        if cfg.output == "csv":
            if csv_text is None:
                print("error: this command has no CSV output", file=sys.stderr)
                return EXIT_INSTANCE
            lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in header.items()]
            Path(args.out).write_text("\n".join(lines) + "\n" + csv_text)
        else:
            Path(args.out).write_text(canonical_json({**header, "result": payload}) + "\n")
    if args.command == "selftest" and not payload["passed"]:
        return EXIT_INSTANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
