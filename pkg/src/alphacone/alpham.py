"""Critical exponents ``alpha_m`` and the exact claims built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .conepolys import (
    ConeParams,
    build_P,
    build_pm,
    theta,
    upper_window_end,
)
from .ratpoly import (
    Interval,
    Poly,
    cauchy_bound,
    chain_signs,
    count_roots,
    deflate_at,
    derivative,
    evaluate,
    isolate_roots,
    poly_gcd,
    refine_root,
    round_half_even,
    sign_variations,
    sturm_chain,
)

INF = math.inf


class RootCountNotOne(RuntimeError):
    """``p_m`` does not have exactly one positive root (must never happen)."""


class ChainTooShort(RuntimeError):
    """The Sturm chain of ``p_m`` has fewer than nine members."""


@dataclass(frozen=True)
class AlphaResult:
    m: int
    isolator: Interval
    decimal: str
    digits: int


@dataclass(frozen=True)
class SignTable:
    """Signs (-1, 0, +1) of ``p_{m,0..8}`` at ``alpha = 0`` and ``alpha -> oo``."""

    m: int
    at_zero: tuple[int, ...]
    at_infinity: tuple[int, ...]
    changes_at_zero: int
    changes_at_infinity: int


@dataclass(frozen=True)
class GammaWindow:
    """Sub-interval of ``(0, 1 - 1/(m+alpha))`` on which ``P >= 0``."""

    window: Interval
    gamma_star: Fraction
    P_at_gamma_star: Fraction


def _check_m(m: int) -> None:
    if int(m) != m or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m!r}")


@lru_cache(maxsize=None)
def pm_chain(m: int):
    return sturm_chain(build_pm(m))


@lru_cache(maxsize=None)
def _origin_margin(m: int) -> Fraction:
    """A rational ``eps`` in ``(0, 1]`` with no root of ``p_m`` in ``(0, eps]``."""
    p = build_pm(m)
    reduced = deflate_at(p, 0)
    chain = sturm_chain(reduced) if reduced.degree > 0 else None
    eps = Fraction(1)
    while True:
        if evaluate(p, eps) != 0 and (
            chain is None or count_roots(chain, (Fraction(0), eps)) == 0
        ):
            return eps
        eps /= 2


def positive_root_count(m: int) -> int:
    """Distinct roots of ``p_m`` in ``(0, oo)``."""
    _check_m(m)
    chain = pm_chain(m)
    if evaluate(chain[0], 0) != 0:
        return count_roots(chain, (Fraction(0), INF))
    return count_roots(chain, (_origin_margin(m), INF))


def _positive_isolator(m: int) -> Interval:
    p = build_pm(m)
    lo = _origin_margin(m) if evaluate(p, 0) == 0 else Fraction(0)
    ivs = isolate_roots(p, (lo, cauchy_bound(p)))
    if len(ivs) != 1:
        raise RootCountNotOne(f"p_{m} has {len(ivs)} positive roots")
    return ivs[0]


def compute_alpha_m(m: int, digits: int = 9) -> AlphaResult:
    """Isolate and refine the unique positive root of ``p_m``.

    The bracket is bisected to width below ``10**-(digits+2)`` and its
    midpoint rounded half-even, so the last printed digit is stable.
    """
    _check_m(m)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    p = build_pm(m)
    iv = refine_root(p, _positive_isolator(m), digits + 2)
    return AlphaResult(m, iv, round_half_even(iv.mid, digits), digits)


def verify_bracket(m: int) -> bool:
    """``p_m(2/m) < 0 < p_m(12/m)``, exactly."""
    _check_m(m)
    p = build_pm(m)
    return evaluate(p, Fraction(2, m)) < 0 < evaluate(p, Fraction(12, m))


def sturm_sign_table(m: int) -> SignTable:
    _check_m(m)
    chain = pm_chain(m)
    if len(chain) < 9:
        raise ChainTooShort(f"Sturm chain of p_{m} has {len(chain)} members")
    z = chain_signs(chain, Fraction(0))
    i = chain_signs(chain, INF)
    return SignTable(m, z, i, sign_variations(z), sign_variations(i))


def gamma_window(params: ConeParams, digits: int = 30) -> Optional[GammaWindow]:
    """Rational window where ``P >= 0`` and the interior maximiser ``gamma*``.

    Returns ``None`` when the resolvent discriminant is negative, in which case
    ``P`` has no root in ``(0, 1 - 1/(m+alpha))``.
    """
    m, a = params.m, params.alpha
    if a <= Fraction(2, m):
        raise ValueError("gamma_window requires alpha > 2/m")
    th = theta(params)
    if th < 0:
        return None
    P = build_P(params)
    end = upper_window_end(params)
    if th == 0:
        # double root: gcd(P, P') is linear over Q, so the root is rational
        g = poly_gcd(P, derivative(P))
        if g.degree != 1:
            raise ArithmeticError("expected a single double root")
        r = -g[0]
        return GammaWindow(Interval(r, r), r, evaluate(P, r))
    roots = isolate_roots(P, (Fraction(0), end))
    if len(roots) != 2:
        raise ArithmeticError(f"expected two roots of P in the window, found {len(roots)}")
    r1 = refine_root(P, roots[0], digits)
    r2 = refine_root(P, roots[1], digits)
    window = Interval(r1.hi, r2.lo)
    gamma_star = _interior_maximiser(P, window, digits)
    value = evaluate(P, gamma_star)
    if value < 0:
        raise ArithmeticError("P(gamma*) < 0 inside the window")
    return GammaWindow(window, gamma_star, value)


def _interior_maximiser(P: Poly, window: Interval, digits: int) -> Fraction:
    dP = derivative(P)
    crit = isolate_roots(dP, window)
    if len(crit) == 1:
        try:
            iv = refine_root(dP, crit[0], digits)
            cand = iv.mid
            if evaluate(P, cand) >= 0:
                return cand
        except ArithmeticError:
            pass
    return window.mid


def lawson_check(k: int, h: int) -> bool:
    """``h - 1 >= alpha_k``, decided as ``p_k(h-1) >= 0``."""
    if k < 2 or h < 2:
        raise ValueError("k and h must be >= 2")
    return evaluate(build_pm(k), h - 1) >= 0


def _sqrt8_le(x: Fraction) -> bool:
    """``sqrt(8) <= x`` for rational ``x``."""
    return x >= 0 and x * x >= 8


def stability_floor_check(m: int, digits: int = 9) -> bool:
    """``m + alpha_m >= 4 + sqrt(8)`` using the lower isolator end.

    For ``m = 4`` additionally ``alpha_4 - sqrt(8) < 1/1000`` using the
    upper end.  All comparisons are exact squarings.
    """
    _check_m(m)
    iv = compute_alpha_m(m, digits).isolator
    ok = _sqrt8_le(m + iv.lo - 4)
    if m == 4:
        # hi < sqrt(8) + 1/1000  <=>  not (sqrt(8) <= hi - 1/1000)
        ok = ok and not _sqrt8_le(iv.hi - Fraction(1, 1000))
    return ok
