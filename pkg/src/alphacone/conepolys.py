"""The polynomials that decide minimality of the cones ``C^alpha_m``.

Everything here is built exactly from the integer dimension ``m`` and a
rational weight ``alpha``:

* ``Q_{m,alpha}(t)``   cubic governing the explicit sub-calibration,
* ``q_m(alpha)``       quadratic carrying the sign of the cubic's discriminant,
* ``P(gamma)``         quartic deciding whether a lower solution ``gamma*g`` exists,
* the depressed form of ``P`` and its resolvent cubic,
* ``theta``            discriminant of that resolvent cubic,
* ``p_m(alpha)``       degree-8 certificate polynomial, ``theta`` up to a positive factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ratpoly import Poly, count_roots, sturm_chain, taylor_shift


@dataclass(frozen=True)
class ConeParams:
    """Dimension ``m >= 2`` and weight ``alpha > 0`` (exact)."""

    m: int
    alpha: Fraction

    def __post_init__(self):
        if isinstance(self.alpha, float):
            raise TypeError("alpha must be exact (int, Fraction or str)")
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def s(self) -> Fraction:
        """``m + alpha``, the combination that recurs everywhere."""
        return self.m + self.alpha


@dataclass(frozen=True)
class DepressedQuartic:
    """Coefficients of ``u**4 + p*u**2 + q*u + r``."""

    p: Fraction
    q: Fraction
    r: Fraction

    def as_poly(self) -> Poly:
        return Poly([self.r, self.q, self.p, 0, 1])


def build_Q(params: ConeParams) -> Poly:
    m1, a = params.m - 1, params.alpha
    return Poly([a**4, -3 * m1 * a**2, -3 * m1**2 * a, m1**4])


@lru_cache(maxsize=None)
def build_qm(m: int) -> Poly:
    if m < 2:
        raise ValueError("m must be >= 2")
    return Poly([1 - 4 * m, -(6 * m - 2), (m - 1) ** 2])


def Q_discriminant(params: ConeParams) -> Fraction:
    m1, a = params.m - 1, params.alpha
    return -27 * m1**6 * a**6 * build_qm(params.m)(a)


def subcal_bound_test(params: ConeParams) -> bool:
    """``alpha >= (2 m^{3/2} + 3m - 1)/(m-1)^2``, decided by the sign of ``q_m``.

    ``q_m(0) = 1 - 4m < 0`` and ``q_m`` opens upward, so on ``alpha > 0`` the
    inequality is exactly ``q_m(alpha) >= 0``.
    """
    return build_qm(params.m)(params.alpha) >= 0


def P_coefficients(params: ConeParams) -> tuple[Fraction, ...]:
    """``(a0, a1, a2, a3, a4)``."""
    m, a = params.m, params.alpha
    s = m + a
    return (
        -8 * (m - 1) * a,
        4 * m**2 * a + 4 * a**2 * m - 4 * a**2 - 5 * a - m + 1,
        s * (2 * m + 6 * a - 4 * m * a - 1),
        -(s**2) * (s + 1),
        s**3,
    )


def build_P(params: ConeParams) -> Poly:
    return Poly(P_coefficients(params))


def upper_window_end(params: ConeParams) -> Fraction:
    """``1 - 1/(m+alpha)``; the roots of interest lie in ``(0, this)``."""
    return 1 - 1 / params.s


def depressed_quartic(params: ConeParams) -> DepressedQuartic:
    """Shift ``P`` by ``(m+alpha+1)/(4(m+alpha))`` and divide by ``a4``."""
    s = params.s
    shifted = taylor_shift(build_P(params), (s + 1) / (4 * s))
    c = shifted.scale(1 / shifted.lc)
    if c[3] != 0:
        raise ArithmeticError("cubic term survived the depressing shift")
    return DepressedQuartic(p=c[2], q=c[1], r=c[0])


def depressed_quartic_closed_form(params: ConeParams) -> DepressedQuartic:
    """Closed forms for ``p, q, r``; an independent cross-check of the shift."""
    m, a = params.m, params.alpha
    s = m + a
    p = -(3 * m**2 - 10 * m + 11 + 3 * a**2 + 2 * (19 * m - 21) * a) / (8 * s**2)
    q = -(
        a**3 + a**2 * (11 - 13 * m) - a * (m - 1) * (13 * m + 23) + (m - 3) * (m - 1) ** 2
    ) / (8 * s**3)
    r = -(
        3 * a**4 + 172 * a**3 - 1630 * a**2 + 204 * a + 3 * m**4
        - 180 * a * m**3 - 20 * m**3 - 366 * a**2 * m**2 + 1796 * a * m**2
        + 34 * m**2 - 180 * a**3 * m + 1988 * a**2 * m - 1788 * a * m + 12 * m - 45
    ) / (256 * s**4)
    return DepressedQuartic(p, q, r)


def scaled_p2_minus_4r(params: ConeParams) -> Fraction:
    """Expanded polynomial form of ``16 (m+alpha)^4 (p^2 - 4r)``."""
    m, a = params.m, params.alpha
    return (
        3 * a**4
        + 4 * (3 * m - 5) * a**3
        + (274 * m**2 - 316 * m + 50) * a**2
        + 4 * (m - 1) * (3 * m**2 + 52 * m + 45) * a
        + (m - 1) ** 2 * (3 * m**2 - 14 * m + 19)
    )


def resolvent_cubic(d: DepressedQuartic) -> Poly:
    return Poly([-d.q**2, d.p**2 - 4 * d.r, 2 * d.p, 1])


def theta_from(d: DepressedQuartic) -> Fraction:
    p, q = d.p, d.q
    e = p**2 - 4 * d.r
    return 4 * p**2 * e**2 - 4 * e**3 - 36 * p * e * q**2 + 32 * p**3 * q**2 - 27 * q**4


def theta(params: ConeParams) -> Fraction:
    return theta_from(depressed_quartic(params))


def pm_coefficients(m: int) -> tuple[int, ...]:
    """Integer coefficients of ``p_m``, constant term first."""
    return (
        -((m - 2) ** 3) * (m - 1) ** 2 * m,
        -2 * (m - 1) * (22 * m**6 - 148 * m**5 + 363 * m**4 - 381 * m**3 + 185 * m**2 - 60 * m + 2),
        16 * m**8 - 192 * m**7 + 984 * m**6 - 2864 * m**5 + 1001 * m**4
        + 4184 * m**3 - 3870 * m**2 + 794 * m - 52,
        -2 * (16 * m**7 - 208 * m**6 + 250 * m**5 + 2302 * m**4 - 3214 * m**3 - 588 * m**2 + 1566 * m - 123),
        -(m - 1) * (16 * m**5 + 48 * m**4 - 1712 * m**3 + 6672 * m**2 - 4321 * m - 641),
        2 * (32 * m**5 - 224 * m**4 + 1238 * m**3 - 2738 * m**2 + 2545 * m - 852),
        -(16 * m**4 - 256 * m**3 + 584 * m**2 - 496 * m + 153),
        -4 * (m - 1) * (8 * m**2 + 3),
        16 * (m - 1) ** 2,
    )


@lru_cache(maxsize=None)
def build_pm(m: int) -> Poly:
    if m < 2:
        raise ValueError("m must be >= 2")
    return Poly(pm_coefficients(m))


def theta_pm_identity_check(params: ConeParams) -> bool:
    """``(m+alpha)^12 * theta == 16 alpha (m-1) p_m(alpha)``, exactly."""
    m, a = params.m, params.alpha
    return params.s**12 * theta(params) == 16 * a * (m - 1) * build_pm(m)(a)


def qm_positive_root_count(m: int) -> int:
    return count_roots(sturm_chain(build_qm(m)), (Fraction(0), float("inf")))
