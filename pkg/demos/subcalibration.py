"""
An explicit sub-calibration and where it stops working
======================================================

The field ``xi = -y^alpha grad F / |grad F|`` with
``F = (alpha^2 |x|^4 - (m-1)^2 y^4) / 4`` has non-positive divergence inside
the cone as long as a cubic ``Q`` stays non-negative on ``[0, oo)``.  That
holds exactly when ``alpha`` clears an explicit bound, which is larger
than ``alpha_m``; the field is a simpler but weaker certificate.
"""

import numpy as np

from alphacone.calib import (
    GridSpec,
    band_mask,
    div_xi_closed,
    div_xi_numeric,
    subcalibration_report,
)
from alphacone.conepolys import ConeParams, subcal_bound_test

# The closed-form divergence agrees with central differences.
r = np.linspace(0.1, 2.0, 50)
R, Y = (a.ravel() for a in np.meshgrid(r, r, indexing="ij"))
keep = band_mask(2, 11, R, Y, 0.05)
closed = div_xi_closed(2, 11, R[keep], Y[keep])
numeric = div_xi_numeric(2, 11, R[keep], Y[keep])
print("max relative FD error:", np.max(np.abs(numeric - closed) / np.abs(closed)))

# Smallest integer weight passing the exact bound, per dimension.
for m in range(2, 13):
    a = 1
    while not subcal_bound_test(ConeParams(m, a)):
        a += 1
    rep = subcalibration_report(m, a)
    print(f"m = {m:2d}  alpha = {a:2d}  max div inside {rep.max_div_inside: .2e}  passed {rep.passed}")

# Below the bound the sign condition genuinely fails near the cone, even
# though alpha = 4 is not far under alpha_2 = 5.88.
rep = subcalibration_report(2, 4, GridSpec(n_radial=120, n_height=120))
print("\nm = 2, alpha = 4: max div inside", rep.max_div_inside, "at", rep.worst_inside)
