"""Reading and writing coefficient files, jump specifications and sampled CSV.

Coefficient files are JSON::

    {"beta": 1.0, "terms": [{"j": -1, "re": 0.45, "im": 0.0}, ...]}

Oscillatory files add ``"alpha": [num, den]`` to each term.  Matrix solutions store one
oscillatory term list per entry under ``"entries"``.  Floats are written with ``repr`` so
values survive a round trip bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
import numbers
import sys
from fractions import Fraction
from pathlib import Path

from .basis import DEFAULT_BETA, RationalSeries
from .errors import FileFormatError, ParameterError
from .osc import OscSeries, as_frequency
from .sie import PRECONDITIONERS, JumpSpec, MatrixOscSeries


def _term(j: int, a: complex, alpha: Fraction | None = None) -> dict:
    out = {}
    if alpha is not None:
        out["alpha"] = [alpha.numerator, alpha.denominator]
    out.update(j=int(j), re=float(a.real), im=float(a.imag))
    return out


def _terms_of(s) -> list[dict]:
    if isinstance(s, RationalSeries):
        return [_term(j, a) for j, a in sorted(s.coeffs.items())]
    return [_term(j, a, alpha) for alpha, j, a in s.terms()]


def series_to_dict(s: RationalSeries | OscSeries) -> dict:
    return {"beta": s.beta, "terms": _terms_of(s)}


def _parse_terms(terms, beta: float, oscillatory: bool | None):
    if not isinstance(terms, list):
        raise FileFormatError("'terms' must be a list")
    groups: dict[Fraction, dict[int, complex]] = {}
    any_alpha = False
    for t in terms:
        try:
            j = t["j"]
            if isinstance(j, bool) or int(j) != j:
                raise FileFormatError(f"term index must be an integer, got {j!r}")
            j = int(j)
            a = complex(float(t["re"]), float(t.get("im", 0.0)))
            alpha = t.get("alpha")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FileFormatError):
                raise
            raise FileFormatError(f"bad term {t!r}: {exc}") from exc
        if j == 0:
            raise FileFormatError("term with j = 0 (R_0 is identically zero)")
        if alpha is None:
            freq = Fraction(0)
        else:
            any_alpha = True
            try:
                freq = as_frequency(tuple(alpha) if isinstance(alpha, list) else alpha)
            except (ParameterError, ValueError, TypeError) as exc:
                raise FileFormatError(f"bad frequency {alpha!r}") from exc
        g = groups.setdefault(freq, {})
        g[j] = g.get(j, 0) + a
    if oscillatory is False and any_alpha and any(f != 0 for f in groups):
        raise FileFormatError("file contains oscillatory terms")
    if oscillatory or (oscillatory is None and any_alpha):
        return OscSeries({f: RationalSeries(g, beta) for f, g in groups.items()}, beta)
    return RationalSeries(groups.get(Fraction(0), {}), beta)


def _beta_of(data) -> float:
    beta = data.get("beta", DEFAULT_BETA)
    if not isinstance(beta, (int, float)) or not beta > 0 or not math.isfinite(beta):
        raise FileFormatError(f"beta must be a positive real, got {beta!r}")
    return float(beta)


def series_from_dict(data: dict, oscillatory: bool | None = None):
    """Parse a coefficient mapping.

    ``oscillatory=None`` returns an :class:`OscSeries` only if some term carries a frequency.
    """
    if not isinstance(data, dict) or "terms" not in data:
        raise FileFormatError("coefficient file needs a 'terms' list")
    return _parse_terms(data["terms"], _beta_of(data), oscillatory)


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc


def _dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def write_series(s, path) -> None:
    _dump_json(series_to_dict(s), path)


def read_series(path, oscillatory: bool | None = None):
    return series_from_dict(_load_json(path), oscillatory)


def matrix_to_dict(u: MatrixOscSeries) -> dict:
    return {"beta": u.beta, "dim": u.dim,
            "entries": [[_terms_of(e) for e in row] for row in u.entries]}


def matrix_from_dict(data: dict) -> MatrixOscSeries:
    try:
        beta = _beta_of(data)
        rows = data["entries"]
        return MatrixOscSeries([[_parse_terms(e, beta, True) for e in row] for row in rows], beta)
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"bad matrix file: {exc}") from exc
    except ParameterError as exc:
        raise FileFormatError(str(exc)) from exc


def write_matrix(u: MatrixOscSeries, path) -> None:
    _dump_json(matrix_to_dict(u), path)


def read_matrix(path) -> MatrixOscSeries:
    return matrix_from_dict(_load_json(path))


def read_jump_spec(path, n: int | None = None) -> tuple[JumpSpec, str]:
    """Load a jump specification; returns ``(spec, precondition)``.

    ``rho_file`` (for ``nls``) and ``jump_file`` (for ``custom``, a matrix file holding
    ``G - I``) are resolved relative to the spec file.
    """
    data = _load_json(path)
    base = Path(path).parent
    kind = data.get("kind")
    precondition = data.get("precondition", "auto")
    if precondition not in PRECONDITIONERS:
        raise FileFormatError(f"unknown precondition {precondition!r}")
    kw = {}
    if n is not None:
        kw["n"] = n
    x = as_frequency(data.get("x", 0))
    t = float(data.get("t", 0.0))
    if kind == "nls":
        if "rho_file" not in data:
            raise FileFormatError("nls spec needs 'rho_file'")
        rho = read_series(base / data["rho_file"], oscillatory=True)
        return JumpSpec("nls", rho=rho, x=x, t=t, **kw), precondition
    if kind == "custom":
        if "jump_file" not in data:
            raise FileFormatError("custom spec needs 'jump_file'")
        return JumpSpec("custom", jump=read_matrix(base / data["jump_file"]), x=x, t=t), precondition
    if kind == "scalar-sech":
        return JumpSpec("scalar-sech", x=x, t=t, **kw), precondition
    raise FileFormatError(f"unknown jump kind {kind!r}")


def fmt(v) -> str:
    """Shortest round-trip decimal for a real number."""
    if isinstance(v, (bool, str, numbers.Integral)):
        return str(v)
    return repr(float(v))


def write_csv(path_or_file, header: list[str], rows) -> None:
    """CSV with full round-trip precision; ``path_or_file`` may be ``"-"`` for stdout."""
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])

    if path_or_file == "-" or path_or_file is None:
        emit(sys.stdout)
    elif hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FileFormatError(f"{path}: empty CSV")
    return rows[0], rows[1:]
