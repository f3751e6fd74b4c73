"""Exact and numerical certificates for weighted minimal hypercones.

The cone ``C^alpha_m = {(x, y) in R^m x (0, oo) : (m-1) y^2 = alpha |x|^2}``
minimises the weighted area ``integral y^alpha dA`` once ``alpha`` is at least
the critical exponent ``alpha_m``.  This package computes ``alpha_m`` exactly
and checks the two constructions behind minimality numerically.

Submodules
----------
ratpoly     exact polynomials over the rationals, Sturm chains, root isolation
conepolys   the cone polynomials ``Q``, ``q_m``, ``P``, ``theta`` and ``p_m``
alpham      critical exponents and the exact claims built on them
foliation   the ODE foliation between barrier solutions
calib       the explicit sub-calibration field and its divergence
cli         the ``alphacone`` command
"""

__version__ = "0.1.0"

from .alpham import (
    AlphaResult,
    compute_alpha_m,
    gamma_window,
    lawson_check,
    positive_root_count,
    stability_floor_check,
    sturm_sign_table,
    verify_bracket,
)
from .conepolys import ConeParams, build_P, build_pm, build_Q, build_qm, theta
from .ratpoly import Interval, Poly

__all__ = [
    "AlphaResult",
    "ConeParams",
    "Interval",
    "Poly",
    "build_P",
    "build_Q",
    "build_pm",
    "build_qm",
    "compute_alpha_m",
    "gamma_window",
    "lawson_check",
    "positive_root_count",
    "stability_floor_check",
    "sturm_sign_table",
    "theta",
    "verify_bracket",
]
