"""Command-line front end: ``alphacone <subcommand> ...``.

Every subcommand prints one record, either as JSON (the default) or as CSV.
Exit status is 0 when every check held, 1 when a check failed and 2 on a
usage error.  Records never contain timestamps or unseeded randomness, so
identical flags give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .alpham import (
    compute_alpha_m,
    lawson_check,
    stability_floor_check,
    sturm_sign_table,
    verify_bracket,
)
from .calib import GridSpec, subcalibration_report
from .conepolys import (
    ConeParams,
    build_P,
    build_pm,
    build_qm,
    depressed_quartic,
    depressed_quartic_closed_form,
    qm_positive_root_count,
    scaled_p2_minus_4r,
    theta,
    theta_pm_identity_check,
    upper_window_end,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CHECKS = ("q", "quartic", "sturm", "identity", "bracket", "lawson", "stability")


@dataclass
class OutputRecord:
    command: str
    params: dict
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    status: str = "pass"

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.status == "pass" else EXIT_FAIL


# -- encoding ------------------------------------------------------------------


def cell(value: Any) -> Any:
    """Canonical scalar used by both encoders.

    Fractions become ``"num/den"``, floats their shortest repr, booleans and
    ``None`` their JSON spelling.  Strings and ints pass through.
    """
    value = _native(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(str(cell(v)) for v in value)
    return value


def _native(value: Any) -> Any:
    """numpy scalars to their Python counterparts."""
    if isinstance(value, np.generic):
        return value.item()
    return value


def _jsonable(value: Any) -> Any:
    value = _native(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float) and math.isfinite(value):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    return cell(value)


def to_json(rec: OutputRecord) -> str:
    body = {
        "command": rec.command,
        "params": _jsonable(rec.params),
        "status": rec.status,
        "summary": _jsonable(rec.summary),
        "rows": [_jsonable(r) for r in rec.rows],
    }
    return json.dumps(body, indent=2, sort_keys=False)


def to_csv(rec: OutputRecord) -> str:
    """Rows as a table; records without rows emit their summary as one row."""
    rows = rec.rows or [rec.summary]
    buf = io.StringIO()
    if not rows:
        return ""
    header = list(rows[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([cell(r.get(k)) for k in header])
    return buf.getvalue()


def render(rec: OutputRecord, fmt: str) -> str:
    return to_csv(rec) if fmt == "csv" else to_json(rec) + "\n"


# -- argument types ------------------------------------------------------------


def parse_m_list(text: str) -> list[int]:
    """``"2..13"``, ``"2,7,11"`` or a mix like ``"2..5,10"``; each ``m >= 2``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                a, b = part.split("..")
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad m list {text!r}") from None
    if not out or min(out) < 2:
        raise argparse.ArgumentTypeError("every m must be an integer >= 2")
    return out


def parse_fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("alpha must be positive")
    return value


def parse_lambdas(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from None
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise argparse.ArgumentTypeError("lambdas must be positive")
    return vals


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def float_pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    if not 0 < a < b:
        raise argparse.ArgumentTypeError("need 0 < lo < hi")
    return a, b


# -- alpha-table ---------------------------------------------------------------


def cmd_alpha_table(m_list, digits: int = 9) -> OutputRecord:
    rows = []
    for m in m_list:
        res = compute_alpha_m(m, digits)
        rows.append(
            {
                "m": m,
                "alpha": res.decimal,
                "isolator_lo": res.isolator.lo,
                "isolator_hi": res.isolator.hi,
            }
        )
    return OutputRecord("alpha-table", {"m": list(m_list), "digits": digits}, rows)


# -- verify --------------------------------------------------------------------


def _random_alpha(rng: random.Random, m: int) -> Fraction:
    # strictly above 2/m so the quartic window is non-degenerate
    return Fraction(2, m) + Fraction(rng.randint(1, 2000), rng.randint(1, 97))


def _verify_q(m_list, **_):
    rows = []
    for m in m_list:
        count = qm_positive_root_count(m)
        ok = count == 1 and build_qm(m)(0) < 0
        rows.append({"m": m, "positive_roots": count, "ok": ok})
    return rows


def _verify_quartic(m_list, seed: int, samples: int, **_):
    rng = random.Random(seed)
    rows = []
    for m in m_list:
        for _k in range(samples):
            a = _random_alpha(rng, m)
            params = ConeParams(m, a)
            d = depressed_quartic(params)
            ok = d == depressed_quartic_closed_form(params)
            ok = ok and 16 * params.s**4 * (d.p**2 - 4 * d.r) == scaled_p2_minus_4r(params)
            rows.append({"m": m, "alpha": a, "ok": ok})
    return rows


def _verify_sturm(m_list, **_):
    rows = []
    for m in m_list:
        tab = sturm_sign_table(m)
        ok = tab.changes_at_zero - tab.changes_at_infinity == 1
        rows.append(
            {
                "m": m,
                "signs_at_zero": " ".join("+-0"[[1, -1, 0].index(s)] for s in tab.at_zero),
                "signs_at_infinity": " ".join("+-0"[[1, -1, 0].index(s)] for s in tab.at_infinity),
                "changes_at_zero": tab.changes_at_zero,
                "changes_at_infinity": tab.changes_at_infinity,
                "ok": ok,
            }
        )
    return rows


def _verify_identity(m_list, seed: int, samples: int, **_):
    rng = random.Random(seed)
    rows = []
    for _k in range(samples):
        m = rng.choice(m_list)
        a = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**4))
        rows.append({"m": m, "alpha": a, "ok": theta_pm_identity_check(ConeParams(m, a))})
    return rows


def _verify_bracket(m_list, **_):
    return [{"m": m, "ok": verify_bracket(m)} for m in m_list]


def lawson_expected(k: int, h: int) -> bool:
    return k + h >= 9 or (k, h) in {(3, 5), (5, 3), (4, 4)}


def _verify_lawson(sum_max: int, **_):
    rows = []
    for k in range(2, sum_max - 1):
        for h in range(2, sum_max - k + 1):
            got = lawson_check(k, h)
            rows.append({"k": k, "h": h, "minimizing": got, "ok": got == lawson_expected(k, h)})
    return rows


def _verify_stability(m_list, **_):
    return [{"m": m, "ok": stability_floor_check(m)} for m in m_list]


_VERIFIERS = {
    "q": _verify_q,
    "quartic": _verify_quartic,
    "sturm": _verify_sturm,
    "identity": _verify_identity,
    "bracket": _verify_bracket,
    "lawson": _verify_lawson,
    "stability": _verify_stability,
}

_DEFAULT_M = {
    "q": "2..50",
    "quartic": "2..30",
    "sturm": "2,3,4,5,6,7,10,11,22,23,28,29,100",
    "identity": "2..30",
    "bracket": "2..200",
    "lawson": "2..13",
    "stability": "2..13",
}


def cmd_verify(which: str, m_list=None, sum_max: int = 16, seed: int = 0, samples: Optional[int] = None):
    if which not in _VERIFIERS:
        raise ValueError(f"unknown check {which!r}")
    if m_list is None:
        m_list = parse_m_list(_DEFAULT_M[which])
    if samples is None:
        samples = 100 if which == "identity" else 3
    rows = _VERIFIERS[which](m_list=m_list, sum_max=sum_max, seed=seed, samples=samples)
    failures = [r for r in rows if not r["ok"]]
    params: dict = {"which": which}
    if which == "lawson":
        params["sum_max"] = sum_max
    else:
        params["m"] = list(m_list)
    if which in ("quartic", "identity"):
        params.update(seed=seed, samples=samples)
    summary = {"checked": len(rows), "failed": len(failures)}
    return OutputRecord("verify", params, rows, summary, "pass" if not failures else "fail")


# -- foliate -------------------------------------------------------------------


def _best_quartic_value(params: ConeParams, n: int = 4001) -> float:
    """Largest sampled value of ``P`` on ``(0, 1 - 1/(m+alpha))``."""
    P = build_P(params)
    end = float(upper_window_end(params))
    coeffs = [float(c) for c in P.coeffs]
    best = -math.inf
    for i in range(1, n):
        g = end * i / n
        best = max(best, sum(c * g**k for k, c in enumerate(coeffs)))
    return best


def cmd_foliate(
    m: int,
    alpha: Fraction,
    eps: float = 1e-5,
    tol: float = 1e-12,
    lambdas=(1.0,),
    n: int = 2001,
    force: bool = False,
):
    """Integrate both branches and sample level curves.

    Returns ``(record, curve_rows)``; the curve rows are written separately.
    """
    # imported here: scipy is only needed by this subcommand
    from .foliation import (
        BRANCHES,
        BarrierEscape,
        NoAdmissibleGamma,
        StepUnderflow,
        certified_config,
        euler_lagrange_residual,
        foliate,
        level_curve,
        ode_residual,
    )

    params = {"m": m, "alpha": alpha, "eps": eps, "tol": tol, "lambdas": list(lambdas), "force": force}
    exact = ConeParams(m, Fraction(float(alpha)))
    above_critical = build_pm(m)(exact.alpha) >= 0
    summary: dict = {"alpha_above_critical": above_critical}
    if not above_critical and not force:
        summary["error"] = "alpha below alpha_m; use --force to explore"
        return OutputRecord("foliate", params, [], summary, "fail"), []
    if float(exact.alpha) <= 2 / m or theta(exact) < 0:
        summary["margin"] = _best_quartic_value(exact)
        summary["error"] = "no admissible gamma: the quartic is negative on its window"
        return OutputRecord("foliate", params, [], summary, "fail"), []
    try:
        cfg = certified_config(m, alpha, eps=eps, tol=tol, n=n)
        fol = foliate(cfg)
    except NoAdmissibleGamma as exc:
        summary["error"] = str(exc)
        return OutputRecord("foliate", params, [], summary, "fail"), []
    except (BarrierEscape, StepUnderflow) as exc:
        summary["error"] = f"{type(exc).__name__}: {exc}"
        return OutputRecord("foliate", params, [], summary, "fail"), []

    summary.update(gamma=cfg.gamma, t_hat=cfg.t_hat, margin=float(build_P(exact)(Fraction(cfg.gamma))))
    rows, curves = [], []
    ok = True
    for b in BRANCHES:
        sol = fol.branch(b)
        row = {
            "branch": b,
            "launch": sol.launch,
            "containment": sol.containment_fraction,
            "ode_residual": ode_residual(sol),
            "euler_lagrange_residual": euler_lagrange_residual(sol),
            "pole_crossing": sol.pole_crossing,
            "pole_offset": abs(sol.pole_crossing - cfg.t_hat),
            "quad_error": sol.quad_error,
        }
        row["ok"] = (
            row["containment"] == 1.0
            and row["ode_residual"] < 1e-8
            and row["euler_lagrange_residual"] < 1e-5
            and row["pole_offset"] <= eps
        )
        ok = ok and row["ok"]
        rows.append(row)
        for lam in lambdas:
            rr, yy = level_curve(sol, lam)
            for t, r, y, w, v in zip(sol.t_samples, rr, yy, sol.w_samples, sol.v_samples):
                curves.append(
                    {"branch": b, "lambda": lam, "t": float(t), "radial": float(r),
                     "height": float(y), "w": float(w), "v": float(v)}
                )
    return OutputRecord("foliate", params, rows, summary, "pass" if ok else "fail"), curves


def write_curves(path: Path, curves: list) -> None:
    """Level-curve samples as CSV, whatever format the record uses."""
    path.write_text(to_csv(OutputRecord("curves", {}, curves)))


# -- subcalib ------------------------------------------------------------------


def cmd_subcalib(m: int, alpha: Fraction, grid: GridSpec = GridSpec(), tolerance: float = 1e-10):
    rep = subcalibration_report(m, float(alpha), grid, tolerance)
    summary = {
        "max_div_inside": rep.max_div_inside,
        "max_div_outside": rep.max_div_outside,
        "min_div_outside": rep.min_div_outside,
        "norm_bound_ok": rep.norm_bound_ok,
        "boundary_alignment_err": rep.boundary_alignment_err,
        "worst_inside": list(rep.worst_inside) if rep.worst_inside else None,
        "worst_outside": list(rep.worst_outside) if rep.worst_outside else None,
        "n_inside": rep.n_inside,
        "n_outside": rep.n_outside,
        "tolerance": rep.tolerance,
    }
    params = {
        "m": m,
        "alpha": alpha,
        "radial": list(grid.radial),
        "height": list(grid.height),
        "n_radial": grid.n_radial,
        "n_height": grid.n_height,
        "band": grid.band,
    }
    return OutputRecord("subcalib", params, [], summary, "pass" if rep.passed else "fail")


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphacone", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_format(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    a = sub.add_parser("alpha-table", help="critical exponents alpha_m")
    a.add_argument("--m", type=parse_m_list, default=parse_m_list("2..13"), help="e.g. 2..13 or 2,7,2017")
    a.add_argument("--digits", type=positive_int, default=9)
    add_format(a)

    v = sub.add_parser("verify", help="exact checks over a range of m")
    v.add_argument("--which", choices=CHECKS, required=True)
    v.add_argument("--m", type=parse_m_list, default=None)
    v.add_argument("--sum-max", type=int, default=16, help="lawson: largest k+h")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=positive_int, default=None)
    add_format(v)

    f = sub.add_parser("foliate", help="integrate the foliation and sample level curves")
    f.add_argument("--m", type=int, required=True)
    f.add_argument("--alpha", type=parse_fraction, required=True)
    f.add_argument("--eps", type=positive_float, default=1e-5)
    f.add_argument("--tol", type=positive_float, default=1e-12)
    f.add_argument("--n", type=positive_int, default=2001, help="samples per branch")
    f.add_argument("--lambdas", type=parse_lambdas, default=[1.0])
    f.add_argument("--out", type=Path, default=None, help="CSV file for the level-curve samples")
    f.add_argument("--force", action="store_true", help="run below alpha_m")
    add_format(f)

    s = sub.add_parser("subcalib", help="sign check of the explicit sub-calibration")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--alpha", type=parse_fraction, required=True)
    s.add_argument("--radial", type=float_pair, default=(0.1, 2.0))
    s.add_argument("--height", type=float_pair, default=(0.1, 2.0))
    s.add_argument("--n-radial", type=positive_int, default=80)
    s.add_argument("--n-height", type=positive_int, default=80)
    s.add_argument("--band", type=float, default=0.01)
    s.add_argument("--tolerance", type=positive_float, default=1e-10)
    add_format(s)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "alpha-table":
        rec = cmd_alpha_table(args.m, args.digits)
    elif args.command == "verify":
        if args.sum_max < 4:
            parser.error("--sum-max must be >= 4")
        rec = cmd_verify(args.which, args.m, args.sum_max, args.seed, args.samples)
    elif args.command == "foliate":
        if args.m < 2:
            parser.error("--m must be >= 2")
        try:
            rec, curves = cmd_foliate(
                args.m, args.alpha, args.eps, args.tol, args.lambdas, args.n, args.force
            )
        except ValueError as exc:
            parser.error(str(exc))
        if args.out is not None and curves:
            write_curves(args.out, curves)
            rec.summary["curves_written"] = len(curves)
    else:
        if args.m < 2:
            parser.error("--m must be >= 2")
        try:
            grid = GridSpec(args.radial, args.height, args.n_radial, args.n_height, args.band)
        except ValueError as exc:
            parser.error(str(exc))
        rec = cmd_subcalib(args.m, args.alpha, grid, args.tolerance)
    sys.stdout.write(render(rec, args.format))
    return rec.exit_code


if __name__ == "__main__":
    sys.exit(main())
