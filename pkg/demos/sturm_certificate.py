"""
Why p_m has exactly one positive root
=====================================

Descartes' rule cannot settle the count: the coefficients of ``p_m`` change
sign three or five times.  Sturm's theorem does: the chain of ``p_m`` has
three sign changes at zero and two at infinity for every ``m``, so exactly
one root lies in between.
"""

from alphacone import positive_root_count, sturm_sign_table, verify_bracket
from alphacone.conepolys import build_pm
from alphacone.ratpoly import descartes_sign_changes

SYMBOL = {1: "+", -1: "-", 0: "0"}

# Descartes alone is inconclusive.
for m in (2, 6, 7, 30):
    print(f"m = {m:3d}: Descartes sign changes = {descartes_sign_changes(build_pm(m))}")

# The Sturm sign table.  Individual entries change with m (for example the
# sixth member flips twice at infinity) but the totals never do.
print("\n  m   at 0                 at infinity          changes")
for m in (2, 3, 4, 5, 6, 7, 10, 11, 22, 23, 28, 29, 100):
    tab = sturm_sign_table(m)
    z = " ".join(SYMBOL[s] for s in tab.at_zero)
    i = " ".join(SYMBOL[s] for s in tab.at_infinity)
    print(f"{m:3d}   {z}   {i}   {tab.changes_at_zero} - {tab.changes_at_infinity}")

# Sweep: one root, and it lies between 2/m and 12/m.
ok = all(positive_root_count(m) == 1 and verify_bracket(m) for m in range(2, 201))
print("\nm = 2..200: one positive root inside (2/m, 12/m):", ok)
