"""Compensated summation helpers shared by the drift, Lyapunov and oracle code."""

from __future__ import annotations

import math

import numpy as np
from numba import njit


def column_sum(columns) -> np.ndarray:
    """Neumaier-compensated sum across a sequence of equally shaped arrays.

    Used to add the handful of per-offset contributions of banded rows,
    vectorized over states.
    """
    columns = [np.asarray(c, dtype=float) for c in columns]
    if not columns:
        raise ValueError("no columns to sum")
    s = columns[0].copy()
    comp = np.zeros_like(s)
    for x in columns[1:]:
        t = s + x
        big = np.abs(s) >= np.abs(x)
        comp += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    return s + comp


def row_sum(values) -> float:
    """Exactly rounded sum (Shewchuk) of one row's terms."""
    return math.fsum(values)


@njit(cache=True)
def _neumaier_cumsum(x, out):
    s = 0.0
    c = 0.0
    for k in range(x.shape[0]):
        v = x[k]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[k] = s + c


def compensated_cumsum(x) -> np.ndarray:
    """Running sums of ``x`` with Neumaier compensation."""
    x = np.ascontiguousarray(x, dtype=float)
    out = np.empty_like(x)
    _neumaier_cumsum(x, out)
    return out


def compensated_suffix_sum(x, start: float = 0.0) -> np.ndarray:
    """``out[i] = start + sum(x[i:])`` accumulated back to front."""
    x = np.ascontiguousarray(x, dtype=float)
    rev = np.empty(x.shape[0] + 1)
    rev[0] = start
    rev[1:] = x[::-1]
    out = compensated_cumsum(rev)[1:]
    return out[::-1].copy()


def geometric_partial_sum(n: int, z: float) -> float:
    """``1 + z + ... + z**(n-1)`` for ``0 <= z < 1`` without cancellation near 1."""
    if n <= 0:
        return 0.0
    if z < 0.5:
        return (1.0 - z**n) / (1.0 - z)
    w = 1.0 - z
    return -math.expm1(n * math.log1p(-w)) / w


def log_log_slope(idx, values) -> float:
    """Least-squares slope of log|values| against log(idx)."""
    idx = np.asarray(idx, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = (v > 0) & (idx > 0)
    if keep.sum() < 3:
        return float("nan")
    slope, _ = np.polyfit(np.log(idx[keep]), np.log(v[keep]), 1)
    return float(slope)
