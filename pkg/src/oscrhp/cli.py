"""Command line interface: ``oscrhp <command> [options]``.

Exit codes: 0 success, 2 bad parameters, 3 no convergence, 4 file errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction

import numpy as np

from . import io, special
from .basis import (DEFAULT_BETA, DEFAULT_TRUNC_TOL, RationalSeries, cauchy_minus, cauchy_plus,
                    eval_series, expand_fft, mobius_inv, pv_integral_forms, quad_rule)
from .errors import ConvergenceError, FileFormatError, OscRHPError
from .osc import OscSeries, as_frequency, cauchy_minus_osc, cauchy_plus_osc, eval_osc, fourier_transform
from .rhp import small_time_rho, solve
from .sie import (DEFAULT_SECH_ORDER, JumpSpec, boundary_values, scalar_explicit_solution, sech)
from .validation import check_beta, check_grid, check_order, check_tolerances

logger = logging.getLogger("oscrhp")

EXIT_OK, EXIT_PARAM, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4
DIAGNOSTIC_POINTS = 1000
SCHRODINGER_WARN = 1e-6


class UsageError(OscRHPError, ValueError):
    pass


# -- builtin functions -----------------------------------------------------------------

def parse_rational(text: str, beta: float) -> RationalSeries:
    """``"0.45@-1,0.1+0.2j@3"`` -> ``0.45 R_{-1} + (0.1+0.2i) R_3``."""
    terms: dict[int, complex] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        coeff, sep, j = part.rpartition("@")
        if not sep:
            raise UsageError(f"rational term {part!r} must look like <coeff>@<j>")
        try:
            jj, c = int(j), complex(coeff.replace(" ", ""))
        except ValueError as exc:
            raise UsageError(f"bad rational term {part!r}") from exc
        if jj == 0:
            raise UsageError("rational terms need j != 0")
        terms[jj] = terms.get(jj, 0) + c
    if not terms:
        raise UsageError("empty rational specification")
    return RationalSeries(terms, beta)


BUILTINS = {
    "gaussian": lambda x: np.exp(-x ** 2),
    "sech": sech,
}


def resolve_function(name: str, beta: float):
    """Builtin name -> ``(callable, exact_series_or_None)``."""
    if name.startswith("rational:"):
        s = parse_rational(name[len("rational:"):], beta)
        return (lambda x: eval_series(s, x)), s
    if name in BUILTINS:
        return BUILTINS[name], None
    raise UsageError(f"unknown builtin {name!r}; expected gaussian, sech or rational:<coeff>@<j>,...")


def diagnostic_grid(beta: float, count: int = DIAGNOSTIC_POINTS) -> np.ndarray:
    """Points midway between consecutive angles on the circle, mapped to the line."""
    theta = 2 * np.pi * (np.arange(count) + 0.5) / count
    return mobius_inv(np.exp(1j * theta), beta).real


def expansion_error(s: RationalSeries, f, beta: float) -> float:
    x = diagnostic_grid(beta)
    return float(np.max(np.abs(eval_series(s, x) - f(x))))


def load_series(path: str):
    return io.read_series(path)


# -- output helpers --------------------------------------------------------------------

def _emit_json(obj, out) -> None:
    text = json.dumps(obj, indent=1)
    if out in (None, "-"):
        print(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _write_log(path, lines) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


# -- commands --------------------------------------------------------------------------

def cmd_expand(args) -> int:
    beta = check_beta(args.beta)
    n = check_order(args.n)
    f, exact = resolve_function(args.function, beta)
    s = exact if exact is not None else expand_fft(f, n, beta)
    err = expansion_error(s, f, beta)
    _note(f"max_error {err!r}")
    if args.format == "csv":
        io.write_csv(args.out, ["j", "re", "im"], [(j, a.real, a.imag) for j, a in sorted(s.coeffs.items())])
    else:
        _emit_json(io.series_to_dict(s), args.out)
    return EXIT_OK


def _real_grid(args):
    return check_grid(args.x_min, args.x_max, args.samples)


def cmd_cauchy(args) -> int:
    s = load_series(args.coeffs)
    x = _real_grid(args)
    osc = isinstance(s, OscSeries)
    if args.y != 0:
        side = "+" if args.y > 0 else "-"
    else:
        side = args.side
    if osc:
        c = cauchy_plus_osc(s) if side == "+" else cauchy_minus_osc(s)
        vals = eval_osc(c, x + 1j * args.y)
    else:
        c = cauchy_plus(s) if side == "+" else cauchy_minus(s)
        vals = eval_series(c, x + 1j * args.y)
    rows = [(xi, args.y, v.real, v.imag) for xi, v in zip(x, vals)]
    _write_table(args, ["x", "y", "re", "im"], rows)
    return EXIT_OK


def _write_table(args, header, rows) -> None:
    if args.format == "json":
        _emit_json([dict(zip(header, r)) for r in rows], args.out)
    else:
        io.write_csv(args.out, header, rows)


def cmd_fourier(args) -> int:
    s = load_series(args.coeffs)
    if isinstance(s, OscSeries):
        s = s.group(0) if set(s.groups) <= {Fraction(0)} else None
        if s is None:
            raise UsageError("fourier expects a zero-frequency coefficient file")
    alphas = check_grid(args.alpha_min, args.alpha_max, args.samples)
    vals = fourier_transform(s, alphas)
    _write_table(args, ["alpha", "re", "im"], [(a, v.real, v.imag) for a, v in zip(alphas, vals)])
    return EXIT_OK


def cmd_quad(args) -> int:
    beta = check_beta(args.beta)
    n = check_order(args.n)
    if args.function.endswith(".json"):
        s = load_series(args.function)
        if isinstance(s, OscSeries):
            raise UsageError("quad expects a zero-frequency coefficient file")
        f = lambda x: eval_series(s, x)  # noqa: E731
    else:
        f, exact = resolve_function(args.function, beta)
        s = exact if exact is not None else expand_fft(f, n, beta)
    rule = quad_rule(n, beta)
    q = rule.integrate(f)
    forms = pv_integral_forms(s)
    row = {"quadrature_re": q.real, "quadrature_im": q.imag,
           "pv_re": forms.value.real, "pv_im": forms.value.imag,
           "one_sided_discrepancy": forms.discrepancy}
    if args.format == "json":
        _emit_json(row, args.out)
    else:
        io.write_csv(args.out, list(row), [list(row.values())])
    return EXIT_OK


def schrodinger_data(t: float, n: int, beta: float = DEFAULT_BETA):
    """Expansion of the transformed initial data times ``exp(i z^2 t)`` and its diagnostic."""
    def g(z):
        return math.sqrt(math.pi) * np.exp(-z ** 2 / 4) * np.exp(1j * z ** 2 * t)

    s = expand_fft(g, n, beta, at_infinity=0.0)
    return s, expansion_error(s, g, beta)


def schrodinger(t: float, x, n: int = 320, beta: float = DEFAULT_BETA):
    """``q(x, t)`` for ``-i q_t + q_xx = 0``, ``q(x, 0) = exp(-x^2)``; returns ``(q, diagnostic)``."""
    s, err = schrodinger_data(t, n, beta)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = np.array([fourier_transform(s, -as_frequency(float(xi))) for xi in x]) / (2 * np.pi)
    return q, err


def cmd_schrodinger(args) -> int:
    x = _real_grid(args)
    q, err = schrodinger(args.t, x, check_order(args.n), check_beta(args.beta))
    _note(f"expansion_error {err!r}")
    if err > SCHRODINGER_WARN:
        logger.warning("expansion of the evolved transform is under-resolved (error %.3g > %g); "
                       "increase -n or decrease t", err, SCHRODINGER_WARN)
    _write_table(args, ["x", "re_q", "im_q"], [(xi, v.real, v.imag) for xi, v in zip(x, q)])
    return EXIT_OK


def _solve_kwargs(args) -> dict:
    tol, trunc_tol = check_tolerances(args.tol, args.trunc_tol)
    return {"tol": tol, "trunc_tol": trunc_tol, "max_iter": check_order(args.max_iter, "max-iter")}


def _report_convergence(res) -> int:
    if res.converged:
        return EXIT_OK
    hist = ", ".join(f"{r:.3e}" for r in res.residuals)
    _note(f"gmres did not converge; residual history: {hist}")
    return EXIT_CONVERGENCE


def cmd_solve_scalar(args) -> int:
    n = check_order(args.n)
    beta = check_beta(args.beta)
    res = solve(JumpSpec("scalar-sech", n=n, beta=beta), args.precondition, **_solve_kwargs(args))
    x = np.linspace(-10, 10, 201) * beta
    phi_plus = boundary_values(res.u, x)[0][:, 0, 0]
    dev = float(np.max(np.abs(phi_plus - scalar_explicit_solution(x, n, beta, side="+"))))
    for i, r in enumerate(res.residuals):
        _note(f"iter {i} residual {r:.3e}")
    _note(f"iterations {res.iterations} explicit_deviation {dev!r}")
    _write_log(args.log, res.result.log_lines())
    if args.format == "csv":
        io.write_csv(args.out, ["x", "re_phi", "im_phi"], [(xi, v.real, v.imag) for xi, v in zip(x, phi_plus)])
    else:
        _emit_json({"iterations": res.iterations, "converged": res.converged, "formulation": res.formulation,
                    "explicit_deviation": dev, "solution": io.matrix_to_dict(res.u)}, args.out)
    return _report_convergence(res)


def _nls_rho(args, beta: float) -> OscSeries:
    if args.rho_file:
        rho = io.read_series(args.rho_file, oscillatory=True)
    else:
        rho = OscSeries.from_series(parse_rational(args.rho.removeprefix("rational:"), beta))
    if args.t:
        rho = small_time_rho(rho, args.t, check_order(args.n), rho.beta)
    return rho


def _nls_row(res, x) -> dict:
    q = res.q
    return {"x": float(x), "re_q": q.real, "im_q": q.imag, "iterations": res.iterations,
            "n_basis": res.n_basis, "converged": res.converged, "formulation": res.formulation}


def cmd_solve_nls(args) -> int:
    kw = _solve_kwargs(args)
    if args.spec:
        spec, precondition = io.read_jump_spec(args.spec, args.n)
        if args.precondition != "auto":
            precondition = args.precondition
        base_rho, t = spec.rho, spec.t
        if spec.kind == "nls" and t:
            base_rho = small_time_rho(base_rho, t, check_order(args.n), base_rho.beta)
        xs = [spec.x] if args.x_grid is None else None
    else:
        precondition, t = args.precondition, args.t
        base_rho = _nls_rho(args, check_beta(args.beta))
        spec = None
        xs = None
    if args.x_grid is not None:
        lo, hi, samples = args.x_grid
        xs = [as_frequency(float(v)) for v in check_grid(lo, hi, int(samples))]
    elif xs is None:
        xs = [as_frequency(args.x)]
    rows, code, last = [], EXIT_OK, None
    for x in xs:
        if spec is not None and spec.kind != "nls":
            sp = spec
        else:
            sp = JumpSpec("nls", rho=base_rho, x=x, t=t)
        res = solve(sp, precondition, **kw)
        last = res
        if sp.kind != "nls":
            raise UsageError("solve-nls needs an nls jump (use solve-scalar for the sech problem)")
        rows.append(_nls_row(res, Fraction(x)))
        if not res.converged:
            code = _report_convergence(res)
    header = ["x", "re_q", "im_q", "iterations", "n_basis"]
    if args.format == "csv":
        io.write_csv(args.out, header, [[r[h] for h in header] for r in rows])
    elif len(rows) == 1:
        _emit_json({**rows[0], "t": t, "solution": io.matrix_to_dict(last.u)}, args.out)
    else:
        _emit_json(rows, args.out)
    if len(rows) == 1:
        _write_log(args.log, last.result.log_lines())
    for r in rows:
        _note(f"x {r['x']!r} q {complex(r['re_q'], r['im_q'])!r} iterations {r['iterations']} "
              f"n_basis {r['n_basis']} ({r['formulation']})")
    return code


# -- parser ----------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--beta", type=float, default=d(DEFAULT_BETA), help="Möbius scale (default 1)")
    p.add_argument("--tol", type=float, default=d(1e-8), help="GMRES relative residual target")
    p.add_argument("--trunc-tol", type=float, default=d(DEFAULT_TRUNC_TOL), help="coefficient drop threshold")
    p.add_argument("--precision-cap", type=int, default=d(special.PRECISION_CAP),
                   help="largest working precision (bits) for special-function tables")
    p.add_argument("--out", default=d("-"), help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=d(None))
    p.add_argument("-v", "--verbose", action="count", default=d(0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscrhp", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, default_format):
        p = sub.add_parser(name, help=help_)
        _add_common(p, suppress=True)
        p.set_defaults(func=func, default_format=default_format)
        return p

    def grid(p, lo, hi, samples, prefix="x"):
        p.add_argument(f"--{prefix}-min", type=float, default=lo)
        p.add_argument(f"--{prefix}-max", type=float, default=hi)
        p.add_argument("--samples", type=int, default=samples)

    p = add("expand", cmd_expand, "expand a builtin function in the rational basis", "json")
    p.add_argument("function", help="gaussian, sech or rational:<coeff>@<j>[,...]")
    p.add_argument("-n", type=int, default=160, help="use 2n+1 sample points")

    p = add("cauchy", cmd_cauchy, "Cauchy transform of a coefficient file on a line Im z = y", "csv")
    p.add_argument("coeffs")
    grid(p, -10.0, 10.0, 201)
    p.add_argument("--y", type=float, default=0.0, help="imaginary part of the evaluation line")
    p.add_argument("--side", choices=("+", "-"), default="+", help="boundary value when y = 0")

    p = add("fourier", cmd_fourier, "Fourier transform int f(x) exp(-i alpha x) dx", "csv")
    p.add_argument("coeffs")
    grid(p, -8.0, 8.0, 161, prefix="alpha")

    p = add("quad", cmd_quad, "integrate a builtin or coefficient file over the real line", "json")
    p.add_argument("function", help="builtin name or path to a coefficient .json")
    p.add_argument("-n", type=int, default=160)

    p = add("schrodinger", cmd_schrodinger, "linear Schrödinger evolution of exp(-x^2)", "csv")
    p.add_argument("-t", type=float, required=True)
    grid(p, -6.0, 6.0, 121)
    p.add_argument("-n", type=int, default=320)

    p = add("solve-scalar", cmd_solve_scalar, "scalar sech Riemann-Hilbert problem", "json")
    p.add_argument("--precondition", choices=("none", "fredholm"), default="fredholm")
    p.add_argument("-n", type=int, default=DEFAULT_SECH_ORDER)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--log", help="write the iter,residual convergence log here")

    p = add("solve-nls", cmd_solve_nls, "NLS inverse scattering at (x, t)", "json")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--rho", default="rational:0.45@-1", help="rational:<coeff>@<j>[,...]")
    src.add_argument("--rho-file", help="oscillatory coefficient file for rho")
    src.add_argument("--spec", help="jump specification JSON")
    p.add_argument("-x", type=float, default=0.0)
    p.add_argument("-t", type=float, default=0.0)
    p.add_argument("--x-grid", nargs=3, type=float, metavar=("LO", "HI", "SAMPLES"), help="sweep mode")
    p.add_argument("--precondition", choices=("none", "fredholm", "mp", "ldu", "auto"), default="auto")
    p.add_argument("-n", type=int, default=160, help="expansion order for rho * exp(4 i z^2 t)")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--log", help="write the iter,residual convergence log here (single solve)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    logging.basicConfig(level=logging.DEBUG if args.verbose > 1 else
                        logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        special.set_precision_cap(args.precision_cap)
        return args.func(args)
    except ConvergenceError as exc:
        _note(f"error: {exc}")
        return EXIT_CONVERGENCE
    except (FileFormatError, OSError) as exc:
        _note(f"error: {exc}")
        return EXIT_IO
    except OscRHPError as exc:
        _note(f"error: {exc}")
        return EXIT_PARAM
    finally:
        special.set_precision_cap(special.PRECISION_CAP)


if __name__ == "__main__":
    sys.exit(main())
