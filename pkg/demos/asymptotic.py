"""Squared-l2 augmentation only closes the gap as rho grows; compare with 1/(4 rho)."""
from sharpald import corpus
from sharpald.saldual import asymptotic_experiment

recs = asymptotic_experiment(corpus.asymptotic_instance(), oracle=corpus.asymptotic_gap)
for r in recs:
    print(f"rho = {str(r.rho):>6}  gap = {float(r.gap):.6g}  closed form = {float(r.oracle_value):.6g}")
