"""Command-line front end: ``oscint {eval,coeffs,verify,figdata}``.

Data goes to stdout (or ``--out``), diagnostics to stderr.  Exit codes:
0 success, 1 failed verification, 2 bad arguments, 3 numeric failure,
4 cancellation failure in a symbolic expansion.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, TextIO

import numpy as np

from . import closedform, oracle, specfun, symbolic
from .errors import DomainError

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_NUMERIC, EXIT_CANCEL = 0, 1, 2, 3, 4
FALLBACK_TOL = 1e-8
FIGURES = ("spectrum", "fresnel-circle", "z-trajectory", "ik", "i1-j1", "derivatives")
SUITES = ("identities", "limits", "derivatives", "routes")


class UsageError(Exception):
    """Bad command-line input; maps to exit 2."""


class NumericFailure(Exception):
    """A numeric operation failed; maps to exit 3."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_range(text: str) -> list[float]:
    """``a:b:n`` → n equispaced points; a bare number → [number]."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1 or (n > 1 and not a < b):
                raise UsageError(f"bad range {text!r}: need start < end and count ≥ 1")
            return [a] if n == 1 else [float(x) for x in np.linspace(a, b, n)]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}: {exc}") from None
    raise UsageError(f"bad range {text!r}; expected start:end:count")


def parse_k(text: str) -> list[int]:
    """``3`` or ``1..5``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            ks = list(range(lo, hi + 1))
        else:
            ks = [int(text)]
    except ValueError:
        raise UsageError(f"bad k {text!r}; expected an integer or lo..hi") from None
    if not ks or ks[0] < 1:
        raise UsageError(f"k must be ≥ 1, got {text!r}")
    return ks


def parse_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def default_tol() -> float:
    raw = os.environ.get("OSCINT_DEFAULT_TOL")
    if raw is None:
        return FALLBACK_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"OSCINT_DEFAULT_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError("OSCINT_DEFAULT_TOL must be positive")
    return tol


@contextlib.contextmanager
def output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def numeric(label: str, fn: Callable, *args):
    try:
        return fn(*args)
    except DomainError as exc:
        raise UsageError(f"{label}: {exc}") from None
    except (ArithmeticError, OverflowError) as exc:
        raise NumericFailure(f"{label} failed: {exc}") from None


def ode_grid(taus: Sequence[float]) -> tuple[oracle.GridSpec, slice]:
    """Grid whose samples include ``taus`` (equispaced or a single point)."""
    lo, hi = min(taus), max(taus)
    start = min(closedform.DEFAULT_TAU_REF, lo - 10.0)
    if len(taus) == 1:
        return oracle.GridSpec(tau_start=start, sample_from=hi - 1.0, tau_end=hi, n_points=2), slice(1, 2)
    return oracle.GridSpec(tau_start=start, sample_from=lo, tau_end=hi, n_points=len(taus)), slice(None)


# ----------------------------------------------------------------------- eval


def cmd_eval(args) -> int:
    ks = parse_k(args.k)
    taus = parse_range(args.tau)
    if args.quantity == "J" and ks != [1]:
        raise UsageError("J is only available for k = 1")
    rows = []
    for k in ks:
        for tau in taus:
            if args.quantity == "I":
                v = numeric(f"i_k(k={k}, tau={tau})", closedform.i_k, k, tau)
                rows.append((k, tau, v.value, v.method, v.err_estimate))
            else:
                v = numeric(f"j1_closed(tau={tau})", closedform.j1_closed, tau)
                rows.append((1, tau, v, "closed_form", 1e-12))
    if args.oracle:
        grid, pick = ode_grid(taus)
        if args.quantity == "I":
            curves = numeric("ode_cascade", oracle.ode_cascade, max(ks), grid)
            for k in ks:
                c = curves[k - 1]
                for tau, val, err in zip(taus, c.values[pick], c.err[pick]):
                    rows.append((k, tau, val, "ode", err))
        else:
            grid = oracle.GridSpec(tau_start=closedform.DEFAULT_TAU_REF, sample_from=grid.first_sample,
                                   tau_end=grid.tau_end, n_points=grid.n_points)
            c = numeric("ode_j1", oracle.ode_j1, grid)
            for tau, val, err in zip(taus, c.values[pick], c.err[pick]):
                rows.append((1, tau, val, "ode", err))
    with output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "tau", "value", "method", "err_estimate"])
        for k, tau, val, method, err in rows:
            w.writerow([k, fmt(tau), fmt(val), method, fmt(err)])
    return EXIT_OK


# --------------------------------------------------------------------- coeffs


def cmd_coeffs(args) -> int:
    ks = parse_k(args.k)
    docs, texts, status = [], [], EXIT_OK
    for k in ks:
        expr = symbolic.sym_expression(k)
        report = symbolic.verify_cancellation(expr)
        if not report.passed:
            print(f"k={k}: transcendental constants survive: {report.offending}", file=sys.stderr)
            status = EXIT_CANCEL
        docs.append(symbolic.render(expr, "structured"))
        texts.append(symbolic.render(expr, "text"))
    with output(args.out) as fh:
        if args.format == "structured":
            json.dump(docs[0] if len(docs) == 1 else docs, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")
        elif args.format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "prefactor", "kind", "a", "b", "coeff"])
            for d in docs:
                for t in d["terms"]:
                    w.writerow([d["k"], d["prefactor"], t["kind"], t["a"], t.get("b", ""), t["coeff"]])
        else:
            fh.write("\n".join(texts) + "\n")
    return status


# --------------------------------------------------------------------- verify


@dataclass(frozen=True)
class Check:
    id: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)


IDENTITY_SAMPLES = {
    "conservation": ([-5.0, -1.0, 0.0, 1.0, 5.0], [0.1, 0.5, 1.0, 2.0]),
    "initial_population": ([-1e6], [0.1, 0.5, 1.0, 2.0]),
    "fresnel_modulus": ([-3.0, -1.0, 0.0, 1.0, 2.0, 5.0], [0.0]),
    "r_antiderivative": ([-3.0, 0.0, 2.0], [0.0]),
    "i2_double_integral": ([-2.0, 0.0, 3.0], [0.0]),
}
INTEGRAL_SAMPLES = ([-2.0, 0.0, 3.0], [0.5, 2.0])


def suite_identities(tol: float, taus, nus) -> list[Check]:
    out = []
    for name in oracle.IDENTITIES:
        dt, dn = IDENTITY_SAMPLES.get(name, INTEGRAL_SAMPLES)
        ts = dt if taus is None or name == "initial_population" else taus
        ns = dn if nus is None or name in oracle.NU_FREE else nus
        rep = oracle.verify_identity(name, [(t, n) for t in ts for n in ns], tol)
        for r in rep.results:
            if r.error:
                print(f"{name} at τ={r.tau}, ν={r.nu}: {r.error}", file=sys.stderr)
        out.append(Check(name, rep.max_residual, tol))
    return out


def suite_limits(tol: float, taus, nus) -> list[Check]:
    out = []
    for k in range(1, 6):
        at0, _ = closedform.known_limits(k)
        out.append(Check(f"crossing_k{k}", abs(closedform.i_k(k, 0.0).value / at0 - 1), tol))
    curves = oracle.ode_cascade(5, oracle.GridSpec(tau_start=-40.0, tau_end=60.0, n_points=2))
    for k, c in enumerate(curves, start=1):
        _, inf = closedform.known_limits(k)
        out.append(Check(f"asymptote_k{k}", abs(c.values[-1] / inf - 1), 0.02))
    return out


def richardson_nu_derivative(n: int, tau: float, h: float = 1e-2) -> float:
    """∂^n_ν |D_{−iν−1}(−iμ₀τ)|² at ν = 0 by Richardson-extrapolated central differences."""
    z = closedform.pcf_argument(tau)

    def m(nu):
        return abs(specfun.pcf(complex(-1.0, -nu), z)) ** 2

    def central(step):
        if n == 1:
            return (m(step) - m(-step)) / (2 * step)
        if n == 2:
            return (m(step) - 2 * m(0.0) + m(-step)) / step ** 2
        raise DomainError("finite differences are provided for n = 1, 2")

    return (4 * central(h / 2) - central(h)) / 3


def derivative_residual(n: int, tau: float) -> float:
    ref = closedform.d_modsq_deriv(n, 0, tau)
    fd = richardson_nu_derivative(n, tau)
    return abs(fd - ref) / max(abs(ref), 1e-2)


def suite_derivatives(tol: float, taus, nus) -> list[Check]:
    ts = taus if taus is not None else list(np.linspace(-4.0, 6.0, 21))
    return [Check(f"d{n}_modsq", max(derivative_residual(n, t) for t in ts), max(tol, 1e-4))
            for n in (1, 2)]


def suite_routes(tol: float, taus, nus) -> list[Check]:
    ts = taus if taus is not None else list(np.linspace(-6.0, 10.0, 321))
    grid, pick = ode_grid(ts)
    curves = oracle.ode_cascade(5, grid)
    out = []
    for k in range(1, 6):
        closed = np.array([closedform.i_k(k, t).value for t in ts])
        out.append(Check(f"ode_k{k}", float(np.max(np.abs(closed - curves[k - 1].values[pick]))), max(tol, 1e-6)))
        explicit = max(abs(closedform.i_k_explicit(k, t).value - c) for t, c in zip(ts[::16], closed[::16]))
        out.append(Check(f"explicit_k{k}", explicit, tol))
    j = oracle.ode_j1(oracle.GridSpec(tau_start=closedform.DEFAULT_TAU_REF, sample_from=grid.first_sample,
                                      tau_end=grid.tau_end, n_points=grid.n_points))
    jc = np.array([closedform.j1_closed(t) for t in ts])
    out.append(Check("j1_ode", float(np.max(np.abs(jc - j.values[pick]))), max(tol, 1e-6)))
    return out


SUITE_FNS = {"identities": suite_identities, "limits": suite_limits,
             "derivatives": suite_derivatives, "routes": suite_routes}


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    if not tol > 0:
        raise UsageError("--tol must be positive")
    taus = parse_range(args.tau) if args.tau else None
    nus = parse_list(args.nu) if args.nu else None
    checks = numeric(f"verify suite {args.suite}", SUITE_FNS[args.suite], tol, taus, nus)
    with output(args.out) as fh:
        if args.format == "structured":
            doc = {"suite": args.suite,
                   "results": [{"id": c.id, "residual": c.residual, "pass": c.passed} for c in checks]}
            json.dump(doc, fh, sort_keys=True)
            fh.write("\n")
        else:
            width = max(len(c.id) for c in checks)
            for c in checks:
                fh.write(f"{c.id:<{width}}  {c.residual:.3e}  tol {c.tol:.1e}  {'PASS' if c.passed else 'FAIL'}\n")
    failed = [c.id for c in checks if not c.passed]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# -------------------------------------------------------------------- figdata


def fig_spectrum(args):
    taus = parse_range(args.tau or "-40:40:2048")
    vals = np.array([abs(specfun.pcf(-1.0, closedform.pcf_argument(t))) ** 2 for t in taus])
    curve = oracle.SampledCurve(np.array(taus), vals, np.zeros(len(taus)))
    spec = oracle.fourier_spectrum(curve)
    return ["omega", "modulus"], zip(spec.tau, spec.values)


def fig_fresnel_circle(args):
    taus = parse_range(args.tau or "-10:10:801")
    rows = []
    for t in taus:
        c, s = specfun.fresnel(math.sqrt(2 / math.pi) * t)
        rows.append((t, 0.5 + c, 0.5 + s, abs(specfun.pcf(-1.0, closedform.pcf_argument(t))) ** 2))
    return ["tau", "half_plus_C", "half_plus_S", "modsq_D"], rows


def fig_z_trajectory(args):
    taus = parse_range(args.tau or "-10:20:600")
    rows = [(t, closedform.i1_from_r(t), closedform.j1_closed(t)) for t in taus]
    return ["tau", "I1", "J1"], rows


def fig_ik(args):
    ks = parse_k(args.k or "1..5")
    taus = parse_range(args.tau or "-6:10:321")
    rows = []
    for k in ks:
        f = math.factorial(k)
        for t in taus:
            v = closedform.i_k(k, t).value
            rows.append((k, t, v, f * v))
    return ["k", "tau", "value", "k_factorial_scaled"], rows


def fig_i1_j1(args):
    taus = parse_range(args.tau or "-6:10:321")
    grid, pick = ode_grid(taus)
    grid = oracle.GridSpec(tau_start=closedform.DEFAULT_TAU_REF, sample_from=grid.first_sample,
                           tau_end=grid.tau_end, n_points=grid.n_points)
    i_ode = oracle.ode_i1(grid).values[pick]
    j_ode = oracle.ode_j1(grid).values[pick]
    rows = [(t, closedform.i_k(1, t).value, a, closedform.j1_closed(t), b)
            for t, a, b in zip(taus, i_ode, j_ode)]
    return ["tau", "I1_closed", "I1_ode", "J1_closed", "J1_ode"], rows


def fig_derivatives(args):
    taus = parse_range(args.tau or "-4:6:201")
    rows = [(t, closedform.d_modsq_deriv(1, 0, t), richardson_nu_derivative(1, t),
             closedform.d_modsq_deriv(2, 0, t), richardson_nu_derivative(2, t)) for t in taus]
    return ["tau", "d1_closed", "d1_fd", "d2_closed", "d2_fd"], rows


FIG_FNS = {"spectrum": fig_spectrum, "fresnel-circle": fig_fresnel_circle, "z-trajectory": fig_z_trajectory,
           "ik": fig_ik, "i1-j1": fig_i1_j1, "derivatives": fig_derivatives}


def cmd_figdata(args) -> int:
    header, rows = numeric(f"figdata {args.fig}", FIG_FNS[args.fig], args)
    rows = list(rows)
    with output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([x if isinstance(x, int) else fmt(x) for x in r])
    return EXIT_OK


# ----------------------------------------------------------------------- main


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-6:10:321" and "-1e6" through as values
        self._negative_number_matcher = re.compile(r"^-(\d|\.\d)")

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="oscint", description="Nested oscillatory integrals at finite time.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="tabulate I_k(τ) (or J₁) as CSV")
    e.add_argument("--k", default="1", help="order or range lo..hi (default 1)")
    e.add_argument("--tau", required=True, help="value or start:end:count")
    e.add_argument("--quantity", choices=("I", "J"), default="I")
    e.add_argument("--oracle", action="store_true", help="add ODE rows for comparison")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("coeffs", help="symbolic expression of I_k")
    c.add_argument("--k", required=True)
    c.add_argument("--format", choices=("text", "structured", "csv"), default="text")
    c.add_argument("--out")
    c.set_defaults(func=cmd_coeffs)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--tol", type=float, help=f"default {FALLBACK_TOL:g} or $OSCINT_DEFAULT_TOL")
    v.add_argument("--tau", help="override sample times, start:end:count")
    v.add_argument("--nu", help="override ν samples, comma separated")
    v.add_argument("--format", choices=("text", "structured"), default="text")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figdata", help="CSV data behind each figure")
    f.add_argument("--fig", choices=FIGURES, required=True)
    f.add_argument("--tau")
    f.add_argument("--k")
    f.add_argument("--out")
    f.set_defaults(func=cmd_figdata)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"oscint: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except NumericFailure as exc:
        print(f"oscint: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
