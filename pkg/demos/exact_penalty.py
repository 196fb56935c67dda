"""Sweep rho on small pure-integer programs and watch the sharp penalty close the gap."""
from fractions import Fraction

from sharpald import corpus
from sharpald.mipsolve import solve_mip
from sharpald.penalty import picp_constants
from sharpald.saldual import rho_sweep

for inst in (corpus.threshold_one(), corpus.inst_a()):
    print(f"{inst.name}: z_IP = {solve_mip(inst).z}, rho* = {picp_constants(inst).rho_star}")
    for rec in rho_sweep(inst, [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1, 2]):
        print(f"  rho = {str(rec.rho):>4}  z_SALR = {str(rec.z_salr):>5}  gap = {rec.gap}")
