"""Exact univariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction` values stored lowest degree
first.  Besides ring arithmetic the module provides the real-root toolkit
used by the rest of the package: Descartes sign counting, Sturm chains,
Sturm root counting, and bisection-based isolation and refinement.  Every
result is exact; floating point never enters this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]


class EndpointIsRoot(ValueError):
    """A Sturm count was requested at an endpoint that is a root."""


class NoSignChange(ValueError):
    """The polynomial has the same sign at both ends of the bracket."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return Fraction(x)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


class Poly:
    """Dense univariate polynomial with rational coefficients.

    ``Poly([c0, c1, c2])`` is ``c0 + c1*x + c2*x**2``.  Trailing zero
    coefficients are stripped so the zero polynomial has ``coeffs == ()``
    and ``degree == -1``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def monomial(cls, degree: int, coeff: Number = 1) -> "Poly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        """Leading coefficient (zero for the zero polynomial)."""
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly([{', '.join(str(c) for c in self.coeffs)}])"

    def __call__(self, x: Number) -> Fraction:
        return evaluate(self, x)

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self), len(other))
        return Poly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        if not self or not other:
            return Poly()
        out = [Fraction(0)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        result = Poly([1])
        for _ in range(n):
            result = result * self
        return result

    def __divmod__(self, other) -> tuple["Poly", "Poly"]:
        return poly_divmod(self, _as_poly(other))

    def __floordiv__(self, other) -> "Poly":
        return poly_divmod(self, _as_poly(other))[0]

    def __mod__(self, other) -> "Poly":
        return poly_divmod(self, _as_poly(other))[1]

    def scale(self, c: Number) -> "Poly":
        c = _frac(c)
        return Poly(c * a for a in self.coeffs)

    def compose_neg(self) -> "Poly":
        """Return ``p(-x)``."""
        return Poly(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([x])


@dataclass(frozen=True)
class Interval:
    """Closed rational interval ``[lo, hi]``; root brackets use its interior."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: {self.lo} > {self.hi}")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class SturmChain:
    chain: tuple[Poly, ...]

    def __len__(self) -> int:
        return len(self.chain)

    def __getitem__(self, i: int) -> Poly:
        return self.chain[i]

    def __iter__(self):
        return iter(self.chain)


# -- arithmetic ---------------------------------------------------------------


def evaluate(p: Poly, x: Number) -> Fraction:
    """Horner evaluation, exact."""
    x = _frac(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return Poly(i * c for i, c in enumerate(p.coeffs) if i > 0)


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db, lcb = b.degree, b.lc
    if len(rem) - 1 < db:
        return Poly(), a
    quot = [Fraction(0)] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        c = rem[k + db] / lcb
        quot[k] = c
        if c:
            for j, bc in enumerate(b.coeffs):
                rem[k + j] -= c * bc
    return Poly(quot), Poly(rem[:db])


def monic(p: Poly) -> Poly:
    return p.scale(1 / p.lc) if p else p


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (zero if both inputs are zero)."""
    while b:
        a, b = b, a % b
    return monic(a)


def primitive_part(p: Poly) -> Poly:
    """Scale ``p`` by a *positive* rational to coprime integer coefficients.

    Signs of values are preserved, which is all Sturm counting needs.
    """
    if not p:
        return p
    den = reduce(math.lcm, (c.denominator for c in p.coeffs), 1)
    nums = [c.numerator * (den // c.denominator) for c in p.coeffs]
    g = reduce(math.gcd, (abs(n) for n in nums), 0)
    return Poly(Fraction(n, g) for n in nums)


def taylor_shift(p: Poly, c: Number) -> Poly:
    """Return ``q`` with ``q(x) = p(x + c)`` by repeated synthetic division."""
    c = _frac(c)
    a = list(p.coeffs)
    n = len(a)
    if c == 0 or n < 2:
        return Poly(a)
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            a[k] += c * a[k + 1]
    return Poly(a)


def descartes_sign_changes(p: Poly) -> int:
    """Sign changes in the coefficient sequence, zeros skipped."""
    if not p:
        raise ValueError("Descartes' rule is undefined for the zero polynomial")
    return sign_variations(_sign(c) for c in p.coeffs)


def sign_variations(signs: Iterable[int]) -> int:
    count, prev = 0, 0
    for s in signs:
        if s == 0:
            continue
        if prev and s != prev:
            count += 1
        prev = s
    return count


def cauchy_bound(p: Poly) -> Fraction:
    """``1 + max|a_i|/|a_n|``; every real root lies strictly inside ±bound."""
    if p.degree < 1:
        return Fraction(1)
    lc = abs(p.lc)
    return 1 + max(abs(c) for c in p.coeffs[:-1]) / lc


# -- Sturm machinery ----------------------------------------------------------


def sturm_chain(p: Poly, normalize: bool = True) -> SturmChain:
    """Canonical Sturm chain ``p, p', -rem(p, p'), ...``.

    Remainders use exact rational division.  With ``normalize`` every
    element is replaced by its positive primitive multiple, which leaves all
    sign patterns unchanged but keeps the integers short.  For a
    non-squarefree input the chain stops at the last nonzero remainder
    (a multiple of ``gcd(p, p')``).
    """
    if not p:
        raise ValueError("Sturm chain of the zero polynomial")
    fix = primitive_part if normalize else (lambda q: q)
    chain = [fix(p)]
    d = derivative(p)
    if not d:
        return SturmChain(tuple(chain))
    chain.append(fix(d))
    while True:
        r = -(chain[-2] % chain[-1])
        if not r:
            break
        chain.append(fix(r))
    return SturmChain(tuple(chain))


def _sign_at_infinity(p: Poly, positive: bool) -> int:
    s = _sign(p.lc)
    if not positive and p.degree % 2 == 1:
        s = -s
    return s


def chain_signs(chain: SturmChain, x) -> tuple[int, ...]:
    """Signs of every chain element at ``x`` (a rational or ``±math.inf``)."""
    if isinstance(x, float):
        if x == math.inf:
            return tuple(_sign_at_infinity(q, True) for q in chain)
        if x == -math.inf:
            return tuple(_sign_at_infinity(q, False) for q in chain)
        raise TypeError("finite points must be exact rationals")
    return tuple(_sign(evaluate(q, x)) for q in chain)


def sign_changes_at(chain: SturmChain, x) -> int:
    return sign_variations(chain_signs(chain, x))


def _endpoints(iv) -> tuple:
    if isinstance(iv, Interval):
        return iv.lo, iv.hi
    lo, hi = iv
    conv = lambda e: e if isinstance(e, float) and math.isinf(e) else _frac(e)
    return conv(lo), conv(hi)


def count_roots(chain: SturmChain, iv) -> int:
    """Distinct real roots of ``chain[0]`` in the open interval ``iv``.

    ``iv`` is an :class:`Interval` or a pair whose entries may be
    ``±math.inf``.  Finite endpoints must not be roots.
    """
    lo, hi = _endpoints(iv)
    for e in (lo, hi):
        if not isinstance(e, float) and evaluate(chain[0], e) == 0:
            raise EndpointIsRoot(f"{e} is a root; perturb the endpoint")
    return sign_changes_at(chain, lo) - sign_changes_at(chain, hi)


def deflate_at(p: Poly, x: Number) -> Poly:
    """Divide out every factor ``(t - x)`` of ``p``."""
    x = _frac(x)
    lin = Poly([-x, 1])
    while p and evaluate(p, x) == 0:
        p = p // lin
    return p


def _split_point(p: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    # a non-root inside (lo, hi), preferring the midpoint
    k = 2
    while True:
        for j in range(1, k):
            if math.gcd(j, k) != 1:
                continue
            x = lo + (hi - lo) * Fraction(j, k)
            if evaluate(p, x) != 0:
                return x
        k += 1


def isolate_roots(p: Poly, iv) -> list[Interval]:
    """Isolating intervals for the distinct real roots of ``p`` inside ``iv``.

    The returned intervals are disjoint, ordered, have non-root endpoints
    and each contains exactly one distinct root in its interior.
    Infinite endpoints are replaced by the Cauchy bound.
    """
    if not p:
        raise ValueError("cannot isolate roots of the zero polynomial")
    lo, hi = _endpoints(iv)
    bound = cauchy_bound(p)
    lo = -bound if isinstance(lo, float) else max(lo, -bound)
    hi = bound if isinstance(hi, float) else min(hi, bound)
    if lo >= hi:
        return []
    # roots sitting exactly on the endpoints are outside the open interval
    q = deflate_at(deflate_at(p, lo), hi)
    if q.degree < 1:
        return []
    chain = sturm_chain(q)
    out: list[Interval] = []
    stack = [(lo, hi, count_roots(chain, (lo, hi)))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(Interval(a, b))
            continue
        c = _split_point(q, a, b)
        vc = sign_changes_at(chain, c)
        stack.append((c, b, vc - sign_changes_at(chain, b)))
        stack.append((a, c, sign_changes_at(chain, a) - vc))
    out.sort(key=lambda i: i.lo)
    return out


def refine_root(p: Poly, iv: Interval, digits: int) -> Interval:
    """Bisect an isolating interval of a simple root to width ``< 10**-digits``."""
    target = Fraction(1, 10**digits)
    lo, hi = iv.lo, iv.hi
    slo, shi = _sign(evaluate(p, lo)), _sign(evaluate(p, hi))
    if slo * shi >= 0:
        raise NoSignChange(f"p has no strict sign change on [{lo}, {hi}]")
    if hi - lo < target:
        return iv
    while hi - lo >= target:
        mid = (lo + hi) / 2
        s = _sign(evaluate(p, mid))
        if s == 0:
            # exact hit; any nearby points lie inside the isolating interval
            delta = min(target, hi - lo) / 4
            return Interval(mid - delta, mid + delta)
        if s == slo:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def round_half_even(x: Fraction, digits: int) -> str:
    """Decimal string of ``x`` rounded half-to-even to ``digits`` places."""
    n = round(x * 10**digits)  # Fraction.__round__ is half-even
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + s
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def poly_from_roots(roots: Sequence[Number]) -> Poly:
    return reduce(lambda acc, r: acc * Poly([-_frac(r), 1]), roots, Poly([1]))
