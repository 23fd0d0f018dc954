"""Spurious levels from mismatched spinor bases, and how IDOM avoids them.

The plain Galerkin form of the Dirac operator (mode "raw") is indefinite.
When the lower component gets fewer functions than the upper one,
spurious levels appear between the hydrogen levels.  The inverse
formulation (mode "idom") works with the positive Gram matrix of D Phi and
stays clean for any split.

    python3 demos/spectral_pollution.py
"""
from raddirac.studies import pollution_study

K = (30, 45, 60, 90)
for mode in ("raw", "idom"):
    rep = pollution_study(n_upper=60, k_lower=K, mode=mode)
    print(f"mode {mode}: spurious levels among the first 10, by lower-component size")
    for row in rep.rows:
        marks = "".join("." if f == "physical" else "x" for f in row["flags"])
        print(f"  K = {row['k_lower']:>3}  {row['n_spurious']:>2}  {marks}")

rep = pollution_study(n_upper=60, k_lower=(30,), mode="raw")
print("\nraw, K = 30 (x marks a spurious level):")
for E, f in zip(rep.rows[0]["energies"], rep.rows[0]["flags"]):
    print(f"  {E:14.8f}  {'' if f == 'physical' else 'x'}")
