"""Hydrogen-like uranium: why the log-Laguerre core and an adaptive scale matter.

The 1s state of Z=92 behaves like r^s near the nucleus with s = 0.74, a
branch point that polynomials and plain Laguerre functions resolve slowly.
This script compares the three schemes at equal size, then shows the
exponential convergence of the adaptive one and the beta walk behind it.

    python3 demos/heavy_atom_convergence.py
"""
from raddirac import Coulomb, coulomb_levels
from raddirac.potentials import singularity_exponent
from raddirac.studies import convergence_study, solve_states

Z, KAPPA = 92.0, -1
pot = Coulomb(Z)
print(f"Z = {Z:g}, kappa = {KAPPA}: origin exponent s = {singularity_exponent(Z, KAPPA):.6f}")
print("closed-form binding energies:", ", ".join(f"{e:.6f}" for e in coulomb_levels(Z, KAPPA, 5)))

print("\nmax relative error of the first 5 levels, N1 = 80, N2 = 60")
for scheme in ("slm", "llsm", "allsm"):
    row = convergence_study(pot, KAPPA, scheme, [80], [60]).rows[0]
    print(f"  {scheme:<6} {row['max_rel_error']:.2e}")

print("\nadaptive scheme, error versus the Laguerre block size")
rep = convergence_study(pot, KAPPA, "allsm", [80], [20, 30, 40, 50])
for row in rep.rows:
    print(f"  N2 = {row['N2']:>3}  error {row['max_rel_error']:.2e}")
print(f"  log10 slope per function: {rep.summary['slope_N1=80']:.3f}")

print("\nbeta walk for each state (N1 = 80, N2 = 40)")
s = solve_states(pot, KAPPA, 5, N1=80, N2=40)
for i, t in enumerate(s.traces):
    walk = " -> ".join(f"{st.beta:g}" for st in t.steps)
    print(f"  state {i}: {walk}  ({t.stop_reason}, final beta {t.final_beta:g})")
