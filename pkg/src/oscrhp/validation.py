"""Argument checks shared by the estimators and the command line."""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError


def check_beta(beta) -> float:
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise ParameterError(f"beta must be positive and finite, got {beta}")
    return beta


def check_order(n, name: str = "n") -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def check_tolerances(tol, trunc_tol) -> tuple[float, float]:
    tol, trunc_tol = float(tol), float(trunc_tol)
    if not 0 <= trunc_tol < tol:
        raise ParameterError(f"need 0 <= trunc_tol < tol, got tol={tol:g}, trunc_tol={trunc_tol:g}")
    return tol, trunc_tol


def check_points(z, *, real: bool = False) -> np.ndarray:
    """Flatten ``z`` to a 1-D array, rejecting NaN (infinity is allowed)."""
    arr = np.asarray(z, dtype=float if real else complex).ravel()
    if np.isnan(arr).any() if real else (np.isnan(arr.real) | np.isnan(arr.imag)).any():
        raise ParameterError("points contain NaN")
    return arr


def check_grid(lo, hi, samples) -> np.ndarray:
    samples = check_order(samples, "samples")
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ParameterError(f"bad grid range [{lo}, {hi}]")
    return np.linspace(lo, hi, samples)
