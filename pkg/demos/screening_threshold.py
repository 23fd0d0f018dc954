"""Yukawa screening: energies near the binding threshold and the critical lambda.

As the screening parameter grows the ground state's decay length diverges,
so a fixed basis scale fails.  The adaptive walk tracks the state, and the
threshold is located by bisection plus a sqrt(-E) extrapolation.

    python3 demos/screening_threshold.py    (about half a minute)
"""
from raddirac import Yukawa
from raddirac.studies import critical_screening, screened_ground_energy

for lam in (0.2, 0.6, 1.0, 1.15, 1.18):
    E, beta = screened_ground_energy(Yukawa(1.0, lam))
    print(f"lambda = {lam:<5} E = {E:.10f}  (best beta {beta:g})")

res = critical_screening(1.0)
lo, hi = res.bracket
print(f"\nbisection bracket [{lo:.7f}, {hi:.7f}], {len(res.evaluations)} solves")
print(f"extrapolated critical lambda {res.lambda_crit:.7f}")
