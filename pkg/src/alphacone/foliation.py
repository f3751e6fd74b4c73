"""Foliation of the weighted cone by extremal hypersurfaces.

In the reduced half-plane a rotationally symmetric hypersurface is written
in polar form ``(|x|, y) = e^{v(t)} (cos t, sin t)``.  Extremality is a second
order equation for ``v``; with ``w = v'`` it becomes

    w' = H(t, w) = (1 + w^2) * (m + alpha + K(t) * w),
    K(t) = (m - alpha - 1 - (m + alpha - 1) cos 2t) / sin 2t.

``g = -(m + alpha)/K`` is an exact zero of ``H`` (an upper solution) and,
whenever the quartic ``P`` is non-negative at ``gamma``, ``gamma * g`` is a
lower solution.  Solutions launched inside the funnel between them stay
there, blow up at the cone angle ``t_hat`` and vanish at ``0`` and ``pi/2``.

The integrator is scipy's DOP853 driven one accepted step at a time so the
funnel can be checked after every step.  Close to ``t_hat`` the state is
switched to ``u = 1/w``, which stays bounded and tends to zero at the pole.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.integrate import DOP853, quad
from scipy.interpolate import PchipInterpolator

from .alpham import gamma_window
from .conepolys import ConeParams, build_P

BELOW = "below"
ABOVE = "above"
BRANCHES = (BELOW, ABOVE)


class AtPole(ValueError):
    """Evaluation requested at (or too near) the cone angle."""


class NotBelowOne(ValueError):
    """``gamma`` is outside ``(0, 1 - 1/(m+alpha))``."""


class BarrierEscape(RuntimeError):
    """The numerical solution left the funnel between the barriers."""


class StepUnderflow(RuntimeError):
    """The adaptive step size collapsed."""


class AngleNearCone(ValueError):
    """Auxiliary function queried within ``eps`` of the cone angle."""


class NoAdmissibleGamma(ValueError):
    """No ``gamma`` with ``P(gamma) >= 0`` exists for these parameters."""


# -- closed-form ingredients ---------------------------------------------------


def t_hat(m, alpha) -> float:
    """Angle of the cone in the ``(|x|, y)`` half-plane."""
    return math.atan(math.sqrt(alpha / (m - 1)))


def t_hat_arccos(m, alpha) -> float:
    """The same angle through ``arccos``; kept as an independent check."""
    return 0.5 * math.acos((m - alpha - 1) / (m + alpha - 1))


def coef_K(m, alpha, t):
    """Coefficient of ``w`` inside the braces of ``H``."""
    t2 = 2 * np.asarray(t, dtype=float)
    return (m - alpha - 1 - (m + alpha - 1) * np.cos(t2)) / np.sin(t2)


def rhs_H(m, alpha, t, w):
    return (1 + w * w) * (m + alpha + coef_K(m, alpha, t) * w)


def g_upper(m, alpha, t, eps: float = 0.0):
    """Upper solution ``(m+alpha) sin 2t / ((m+alpha-1) cos 2t - (m-alpha-1))``."""
    t = np.asarray(t, dtype=float)
    th = t_hat(m, alpha)
    if np.any(np.abs(t - th) <= eps) or np.any(
        (m + alpha - 1) * np.cos(2 * t) - (m - alpha - 1) == 0
    ):
        raise AtPole(f"g is singular at t_hat = {th}")
    out = (m + alpha) * np.sin(2 * t) / ((m + alpha - 1) * np.cos(2 * t) - (m - alpha - 1))
    return out if out.ndim else float(out)


def g_prime(m, alpha, t):
    t2 = 2 * np.asarray(t, dtype=float)
    d = (m + alpha - 1) * np.cos(t2) - (m - alpha - 1)
    return 2 * (m + alpha) * ((m + alpha - 1) - (m - alpha - 1) * np.cos(t2)) / d**2


def inv_g(m, alpha, t):
    """``1/g``, finite through the pole."""
    return -coef_K(m, alpha, t) / (m + alpha)


def quad_margin(m, alpha, gamma):
    """Coefficients of ``a cos^2(2t) - 2b cos(2t) + c`` and the bound ``c - b^2/a``.

    Exact when all inputs are ints/Fractions, float otherwise.
    """
    s = m + alpha
    if not 0 < gamma < 1 - 1 / s:
        raise NotBelowOne(f"gamma={gamma} outside (0, 1 - 1/(m+alpha))")
    a = (1 - gamma) * ((s - 1) ** 2 - gamma**2 * s**2)
    b = (m - alpha - 1) * (s - 1 - gamma * s)
    c = (1 - gamma) * gamma**2 * s**2 - 2 * gamma * (s - 1) + (1 - gamma) * (m - alpha - 1) ** 2
    return a, b, c, c - b * b / a


def lower_solution_defect(m, alpha, gamma, t):
    """``H(t, gamma g) - gamma g'``; non-negative iff ``gamma g`` is a lower solution."""
    g = g_upper(m, alpha, t)
    return rhs_H(m, alpha, t, gamma * g) - gamma * g_prime(m, alpha, t)


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class FoliationConfig:
    m: int
    alpha: float
    gamma: float
    eps: float = 1e-5
    tol: float = 1e-12
    n: int = 2001
    switch: float = 1e3

    def __post_init__(self):
        th = t_hat(self.m, self.alpha)
        if not 0 < self.eps < min(th, math.pi / 2 - th) / 4:
            raise ValueError(f"eps={self.eps} must lie in (0, t_hat/4) on both branches")
        if not 0 < self.gamma < 1 - 1 / (self.m + self.alpha):
            raise NotBelowOne(f"gamma={self.gamma} outside (0, 1 - 1/(m+alpha))")
        if self.n < 5:
            raise ValueError("need at least 5 samples")

    @property
    def t_hat(self) -> float:
        return t_hat(self.m, self.alpha)


def certified_config(m: int, alpha, **kwargs) -> FoliationConfig:
    """Float configuration whose ``alpha`` and ``gamma`` are certified exactly.

    ``alpha`` is first rounded to a double; the exact rational value of that
    double is what gets certified, so no rounding sits between certificate
    and integration.  ``gamma*`` is rounded to a double and nudged toward the
    window midpoint until ``P`` is non-negative at its exact value.
    """
    a = float(alpha)
    params = ConeParams(m, Fraction(a))
    win = gamma_window(params)
    if win is None:
        raise NoAdmissibleGamma(f"no admissible gamma for m={m}, alpha={alpha}")
    P = build_P(params)
    g = float(win.gamma_star)
    towards = float(win.window.mid)
    while P(Fraction(g)) < 0 or not (win.window.lo <= Fraction(g) <= win.window.hi):
        g = math.nextafter(g, towards)
    return FoliationConfig(m=m, alpha=a, gamma=g, **kwargs)


# -- integration ---------------------------------------------------------------


@dataclass
class _Segment:
    t0: float
    t1: float
    interp: Callable
    var: str  # "w" or "u"


@dataclass
class FoliationSolution:
    """Samples of one branch of the foliation.

    ``t_samples`` increases; ``w_samples`` and ``v_samples`` follow it.
    ``u_samples`` is ``1/w`` and stays finite at the pole.
    """

    branch: str
    cfg: FoliationConfig
    t_samples: np.ndarray
    w_samples: np.ndarray
    u_samples: np.ndarray
    v_samples: Optional[np.ndarray] = None
    accepted_t: np.ndarray = field(default=None, repr=False)
    accepted_inside: np.ndarray = field(default=None, repr=False)
    launch: str = "lower"
    switch_t: Optional[float] = None
    pole_crossing: float = math.nan
    quad_error: float = math.nan
    segments: list = field(default_factory=list, repr=False)

    def w_at(self, t):
        return _eval_segments(self.segments, t, "w")

    def u_at(self, t):
        return _eval_segments(self.segments, t, "u")

    @property
    def containment_fraction(self) -> float:
        return float(np.mean(self.accepted_inside))


def _eval_segments(segments, t, want):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    starts = [min(s.t0, s.t1) for s in segments]
    ordered = sorted(range(len(segments)), key=lambda i: starts[i])
    keys = [starts[i] for i in ordered]
    out = np.empty_like(t)
    for j, tj in enumerate(t):
        k = max(bisect.bisect_right(keys, tj) - 1, 0)
        seg = segments[ordered[k]]
        y = float(seg.interp(tj)[0])
        out[j] = y if seg.var == want else 1.0 / y
    return out


def _domain(cfg: FoliationConfig, branch: str) -> tuple[float, float]:
    th = cfg.t_hat
    if branch == BELOW:
        return cfg.eps, th - cfg.eps
    if branch == ABOVE:
        return math.pi / 2 - cfg.eps, th + cfg.eps
    raise ValueError(f"unknown branch {branch!r}")


def _barriers_w(cfg, t):
    g = g_upper(cfg.m, cfg.alpha, t)
    return min(cfg.gamma * g, g), max(cfg.gamma * g, g)


def _barriers_u(cfg, t):
    ig = inv_g(cfg.m, cfg.alpha, t)
    b = (ig, ig / cfg.gamma)
    return min(b), max(b)


def _inside(cfg, t, y, var) -> bool:
    lo, hi = (_barriers_w if var == "w" else _barriers_u)(cfg, t)
    slack = 1e3 * cfg.tol * max(abs(lo), abs(hi)) + 1e-300
    return lo - slack <= y <= hi + slack


def _integrate(cfg: FoliationConfig, branch: str, launch: str) -> FoliationSolution:
    m, a = cfg.m, cfg.alpha
    t0, t1 = _domain(cfg, branch)
    g0 = g_upper(m, a, t0)
    w0 = cfg.gamma * g0 if launch == "lower" else 0.5 * (1 + cfg.gamma) * g0

    def f_w(t, y):
        return [rhs_H(m, a, t, y[0])]

    def f_u(t, y):
        u = y[0]
        return [-(1 + u * u) * ((m + a) + coef_K(m, a, t) / u)]

    atol = cfg.tol * 1e-3
    var, solver = "w", DOP853(f_w, t0, [w0], t1, rtol=cfg.tol, atol=atol)
    segments, acc_t, acc_in = [], [t0], [True]
    switch_t = None
    while solver.status == "running":
        t_old = solver.t
        msg = solver.step()
        if solver.status == "failed":
            raise StepUnderflow(f"{branch} branch: {msg} at t={t_old}")
        segments.append(_Segment(t_old, solver.t, solver.dense_output(), var))
        y = float(solver.y[0])
        ok = _inside(cfg, solver.t, y, var)
        acc_t.append(solver.t)
        acc_in.append(ok)
        if not ok:
            raise BarrierEscape(f"{branch} branch left the funnel at t={solver.t}")
        if var == "w" and abs(y) > cfg.switch and solver.status == "running":
            var, switch_t = "u", solver.t
            solver = DOP853(f_u, solver.t, [1.0 / y], t1, rtol=cfg.tol, atol=atol)

    u_end = float(solver.y[0]) if var == "u" else 1.0 / float(solver.y[0])
    slope = f_u(t1, [u_end])[0]
    crossing = t1 - u_end / slope

    tt = _sample_times(cfg, branch)
    sol = FoliationSolution(
        branch=branch,
        cfg=cfg,
        t_samples=tt,
        w_samples=np.empty(0),
        u_samples=np.empty(0),
        accepted_t=np.array(acc_t),
        accepted_inside=np.array(acc_in),
        launch=launch,
        switch_t=switch_t,
        pole_crossing=crossing,
        segments=segments,
    )
    sol.w_samples = sol.w_at(tt)
    sol.u_samples = sol.u_at(tt)
    return sol


def integrate_w(cfg: FoliationConfig, branch: str) -> FoliationSolution:
    """Integrate one branch from its outer end toward the cone angle.

    The launch is on the lower barrier ``gamma*g``; if the funnel is left,
    the integration is repeated from the funnel midpoint before giving up.
    """
    try:
        return _integrate(cfg, branch, "lower")
    except BarrierEscape:
        return _integrate(cfg, branch, "mid")


# -- sampling grid -------------------------------------------------------------
#
# Samples are uniform in sigma = -log|t - t_hat| so they cluster at the pole,
# where w ~ 1/(t_hat - t) and v ~ -log(t_hat - t) is linear in sigma.


def _sigma_range(cfg, branch):
    t0, t1 = _domain(cfg, branch)
    th = cfg.t_hat
    return -math.log(abs(t0 - th)), -math.log(abs(t1 - th))


def _sigma_grid(cfg: FoliationConfig, branch: str, n: int):
    s0, s1 = _sigma_range(cfg, branch)
    sigma = np.linspace(s0, s1, n)
    sgn = -1.0 if branch == BELOW else 1.0
    e = np.exp(-sigma)
    t = cfg.t_hat + sgn * e
    lo, hi = sorted(_domain(cfg, branch))
    return sigma, np.clip(t, lo, hi), sgn * -e, sgn * e  # sigma, t, dt/ds, d2t/ds2


def _sample_times(cfg, branch):
    _, t, _, _ = _sigma_grid(cfg, branch, cfg.n)
    return t if branch == BELOW else t[::-1]


# -- antiderivative ------------------------------------------------------------


def _cumtrapz(y, dx):
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * dx)
    return out


def build_v(sol: FoliationSolution) -> FoliationSolution:
    """Antiderivative of ``w`` vanishing at the outer end of the branch.

    Trapezoid sums in ``sigma`` on the sample grid and on a grid with the
    midpoints added are combined by Richardson extrapolation; their
    difference is kept as ``quad_error``.  The first sample cell holds the
    launch transient and is integrated adaptively instead.  The missing
    piece between the truncated end and ``0`` (or ``pi/2``) is
    ``eps * w(eps) / 2`` because ``w`` vanishes linearly there.
    """
    cfg = sol.cfg
    sigma, t, ts, _ = _sigma_grid(cfg, sol.branch, 2 * cfg.n - 1)
    w = sol.w_at(t)
    f = w * ts  # dv/dsigma
    h = sigma[1] - sigma[0]
    fine = _cumtrapz(f, h)[::2]
    coarse = _cumtrapz(f[::2], 2 * h)
    v = fine + (fine - coarse) / 3.0
    err = float(np.max(np.abs(fine - coarse)) / 3.0)

    first, _ = quad(lambda x: sol.w_at(x)[0], t[0], t[2], epsabs=0.0, epsrel=1e-13, limit=200)
    v[1:] += first - v[1]
    tail = cfg.eps * w[0] / 2
    # above the cone the sweep runs from pi/2 - eps down to the pole
    v += tail if sol.branch == BELOW else -tail
    if sol.branch == ABOVE:
        v = v[::-1]
    return replace(sol, v_samples=v, quad_error=err)


# -- certificates --------------------------------------------------------------


def ode_residual(sol: FoliationSolution) -> float:
    """Max relative residual of the dense solution at interior samples.

    The derivative is a five-point difference of the interpolant; in the
    reciprocal region the residual is taken for ``u' = -u^2 H(t, 1/u)``.
    """
    cfg = sol.cfg
    m, a = cfg.m, cfg.alpha
    worst = 0.0
    tt = sol.t_samples[1:-1]
    lo, hi = sorted(_domain(cfg, sol.branch))
    for t in tt:
        seg = _segment_at(sol.segments, t)
        h = abs(seg.t1 - seg.t0)
        d = 1e-3 * min(h, t - lo, hi - t)
        if d <= 0:
            continue
        d = 2.0 ** math.floor(math.log2(d))  # keeps t +- k*d exact
        want = seg.var
        pts = t + d * np.array([-2.0, -1.0, 1.0, 2.0])
        y = _eval_segments(sol.segments, pts, want)
        deriv = (y[0] - 8 * y[1] + 8 * y[2] - y[3]) / (12 * d)
        y0 = _eval_segments(sol.segments, [t], want)[0]
        if want == "w":
            rhs = rhs_H(m, a, t, y0)
        else:
            rhs = -(1 + y0 * y0) * ((m + a) + coef_K(m, a, t) / y0)
        worst = max(worst, abs(deriv - rhs) / (1 + abs(rhs)))
    return worst


def _segment_at(segments, t):
    for s in segments:
        if min(s.t0, s.t1) <= t <= max(s.t0, s.t1):
            return s
    return segments[-1]


def euler_lagrange_residual(sol: FoliationSolution) -> float:
    """Max relative residual of ``v'' = (1 + v'^2)(m + alpha + K v')``.

    ``v'`` and ``v''`` come from fourth-order central differences of
    ``v_samples`` in the uniform ``sigma`` variable, converted back to ``t``.
    Near ``t = 0`` the factor ``K ~ -alpha/t`` amplifies errors in ``v'``,
    which is why second-order stencils are not enough.
    """
    if sol.v_samples is None:
        raise ValueError("build_v first")
    cfg = sol.cfg
    sigma, t, ts, tss = _sigma_grid(cfg, sol.branch, cfg.n)
    v = sol.v_samples if sol.branch == BELOW else sol.v_samples[::-1]
    h = sigma[1] - sigma[0]
    vm2, vm1, v0, vp1, vp2 = v[:-4], v[1:-3], v[2:-2], v[3:-1], v[4:]
    vs = (-vp2 + 8 * vp1 - 8 * vm1 + vm2) / (12 * h)
    vss = (-vp2 + 16 * vp1 - 30 * v0 + 16 * vm1 - vm2) / (12 * h**2)
    ts, tss, ti = ts[2:-2], tss[2:-2], t[2:-2]
    vdot = vs / ts
    vddot = (vss - vdot * tss) / ts**2
    rhs = rhs_H(cfg.m, cfg.alpha, ti, vdot)
    return float(np.max(np.abs(vddot - rhs) / (1 + np.abs(rhs))))


# -- the foliation and its auxiliary function ---------------------------------


@dataclass
class Foliation:
    cfg: FoliationConfig
    below: FoliationSolution
    above: FoliationSolution
    _interp: dict = field(default_factory=dict, repr=False)

    def branch(self, name: str) -> FoliationSolution:
        return self.below if name == BELOW else self.above

    def v_at(self, branch: str, t):
        if branch not in self._interp:
            s = self.branch(branch)
            self._interp[branch] = PchipInterpolator(s.t_samples, s.v_samples, extrapolate=True)
        return self._interp[branch](t)


def foliate(cfg: FoliationConfig) -> Foliation:
    """Both branches, each with its antiderivative built."""
    return Foliation(cfg, *(build_v(integrate_w(cfg, b)) for b in BRANCHES))


def level_curve(sol: FoliationSolution, lam: float):
    """Points ``lam * e^{v(t)} (cos t, sin t)`` at the branch samples."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if sol.v_samples is None:
        raise ValueError("build_v first")
    r = lam * np.exp(sol.v_samples)
    return r * np.cos(sol.t_samples), r * np.sin(sol.t_samples)


def F_bold(fol: Foliation, radial, height):
    """Signed auxiliary function whose level sets are the foliation leaves.

    ``sqrt(r^2 + y^2) * exp(-v(angle))``, positive inside the cone and
    negative above it.
    """
    radial = np.asarray(radial, dtype=float)
    height = np.asarray(height, dtype=float)
    if np.any(radial <= 0) or np.any(height <= 0):
        raise ValueError("radial and height must be positive")
    ang = np.arctan2(height, radial)
    th = fol.cfg.t_hat
    if np.any(np.abs(ang - th) < fol.cfg.eps):
        raise AngleNearCone("query within eps of the cone angle")
    below = ang < th
    v = np.where(below, fol.v_at(BELOW, ang), fol.v_at(ABOVE, ang))
    out = np.hypot(radial, height) * np.exp(-v) * np.where(below, 1.0, -1.0)
    return out if out.ndim else float(out)
