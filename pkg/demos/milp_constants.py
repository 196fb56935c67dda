"""Theoretical constants for a small MILP next to the empirically closing rho."""
from sharpald import corpus
from sharpald.saldual import certify

for make in (corpus.inst_b, lambda: corpus.random_milp(3)):
    cert = certify(make())
    consts = {k: v["value"] for k, v in cert.constants["constants"].items()}
    print(f"{cert.instance} ({cert.cls}): verdict {cert.verdict}")
    for key in ("kappa_lcm", "beta", "Gamma", "K", "delta"):
        if key in consts:
            print(f"  {key:>9} = {consts[key]}")
    print(f"  rho_star = {cert.rho_star}, empirical bracket = {[str(v) for v in cert.rho_emp]}")
