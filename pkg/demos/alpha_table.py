"""
Critical exponents of weighted minimal cones
============================================

For each dimension ``m`` the cone ``(m-1) y^2 = alpha |x|^2`` becomes
weighted-area minimising once ``alpha`` reaches a critical value
``alpha_m``.  That value is the unique positive root of an integer
polynomial ``p_m`` of degree eight, so it can be pinned down exactly.
"""

from fractions import Fraction

from alphacone import build_pm, compute_alpha_m

# The polynomial for the plane case, constant term first.  Its constant
# term vanishes, so zero is a root that has to be stepped around.
p2 = build_pm(2)
print("p_2 coefficients:", [int(c) for c in p2.coeffs])

# Sturm isolation followed by bisection gives a rational bracket; the
# printed decimal is the half-even rounding of its midpoint.
res = compute_alpha_m(2, 9)
print("alpha_2 =", res.decimal)
print("bracket width < 1e-11:", res.isolator.width < Fraction(1, 10**11))
print("sign change:", p2(res.isolator.lo) < 0 < p2(res.isolator.hi))

# The full table.  alpha_m decreases like roughly 2.8/m.
for m in list(range(2, 14)) + [2017]:
    a = compute_alpha_m(m, 9).decimal
    print(f"m = {m:5d}   alpha_m = {a}   m * alpha_m = {m * float(a):.4f}")

# More digits cost almost nothing: bisection halves the bracket per step.
print("alpha_4 to 40 places:", compute_alpha_m(4, 40).decimal)
