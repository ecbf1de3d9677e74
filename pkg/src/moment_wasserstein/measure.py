"""Discrete probability measures on the line and their exact 1-Wasserstein distance."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError

WEIGHT_TOL = 1e-12


class MomentOverflowWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Atoms ``points`` (strictly increasing) with positive ``weights`` summing to 1."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or pts.shape != w.shape or pts.size == 0:
            raise InputError("points and weights must be nonempty 1-D arrays of equal length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise InputError("non-finite atom or weight")
        if np.any(w <= 0):
            raise InputError("weights must be positive")
        if np.any(np.diff(pts) <= 0):
            raise InputError("points must be strictly increasing; use from_samples")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise InputError(f"weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_samples(cls, values, weights=None) -> "EmpiricalMeasure":
        """Sort, merge exactly-equal atoms, and normalise weights (uniform by default)."""
        x = np.asarray(values, dtype=float).ravel()
        if x.size == 0:
            raise InputError("empty sample")
        if not np.all(np.isfinite(x)):
            raise InputError("non-finite sample value")
        if weights is None:
            w = np.full(x.size, 1.0)
        else:
            w = np.asarray(weights, dtype=float).ravel()
            if w.shape != x.shape or not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise InputError("weights must be positive, finite and match the sample")
        pts, inverse = np.unique(x, return_inverse=True)
        merged = np.bincount(inverse, weights=w, minlength=pts.size)
        return cls(pts, merged / math.fsum(merged))

    @property
    def cdf(self) -> np.ndarray:
        c = np.cumsum(self.weights)
        c[-1] = 1.0
        return c

    def __len__(self):
        return self.points.size

    def shift(self, c: float) -> "EmpiricalMeasure":
        return EmpiricalMeasure.from_samples(self.points + c, self.weights)


def w1_distance(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Exact W1 as the integral of |F_mu - F_nu| over the merged support."""
    grid = np.union1d(mu.points, nu.points)
    F = _cdf_at(mu, grid[:-1])
    G = _cdf_at(nu, grid[:-1])
    return float(np.sum(np.abs(F - G) * np.diff(grid)))


def _cdf_at(mu: EmpiricalMeasure, t: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(mu.points, t, side="right")
    cdf = np.concatenate(([0.0], mu.cdf))
    return cdf[idx]


def sorted_pairing_w1(x, y) -> float:
    """(1/n) sum |x_(i) - y_(i)| for equal-size, equal-weight samples."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise InputError("sorted pairing needs equal sample sizes")
    return float(np.mean(np.abs(x - y)))


class SortedReference:
    """A fixed reference measure prepared for many W1 queries.

    With ``N`` reference atoms and a query of ``n`` atoms each distance costs
    O(n log N) after O(N) setup, using prefix integrals of the reference CDF.
    """

    def __init__(self, measure: EmpiricalMeasure):
        self.measure = measure
        self._z = measure.points
        self._G = measure.cdf
        gaps = np.diff(self._z)
        self._A = np.concatenate(([0.0], np.cumsum(self._G[:-1] * gaps)))

    def _integral(self, t):
        # A(t) = int_{-inf}^t G(s) ds
        z = self._z
        idx = np.searchsorted(z, t, side="right") - 1
        safe = np.maximum(idx, 0)
        val = self._A[safe] + self._G[safe] * (t - z[safe])
        return np.where(idx < 0, 0.0, val)

    def w1(self, mu: EmpiricalMeasure) -> float:
        y = mu.points
        F = mu.cdf
        z = self._z
        lo = min(y[0], z[0])
        hi = max(y[-1], z[-1])
        a = np.concatenate(([lo], y))
        b = np.concatenate((y, [hi]))
        c = np.concatenate(([0.0], F))
        c[-1] = 1.0
        # G(t) <= c left of the crossing point, G(t) > c right of it
        cross_idx = np.searchsorted(self._G, c, side="right")
        cross = np.where(cross_idx < z.size, z[np.minimum(cross_idx, z.size - 1)], np.inf)
        u = np.clip(cross, a, b)
        Aa, Au, Ab = self._integral(a), self._integral(u), self._integral(b)
        pieces = c * (u - a) - (Au - Aa) + (Ab - Au) - c * (b - u)
        return max(float(np.sum(pieces)), 0.0)

    def w1_rows(self, rows) -> np.ndarray:
        """W1 from each equal-weight row of a 2-D array to the reference."""
        y = np.sort(np.asarray(rows, dtype=float), axis=1)
        R, n = y.shape
        z = self._z
        lo = np.minimum(y[:, :1], z[0])
        hi = np.maximum(y[:, -1:], z[-1])
        a = np.hstack((lo, y))
        b = np.hstack((y, hi))
        c = np.arange(n + 1) / n
        cross_idx = np.searchsorted(self._G, c, side="right")
        cross = np.where(cross_idx < z.size, z[np.minimum(cross_idx, z.size - 1)], np.inf)
        u = np.clip(cross, a, b)
        Aa, Au, Ab = self._integral(a), self._integral(u), self._integral(b)
        pieces = c * (u - a) - (Au - Aa) + (Ab - Au) - c * (b - u)
        return np.maximum(pieces.sum(axis=1), 0.0)


def moment(mu: EmpiricalMeasure, k: int) -> float:
    """sum_i w_i x_i^k with compensated summation; overflow gives +-inf and a warning."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    with np.errstate(over="ignore", invalid="ignore"):
        terms = mu.weights * mu.points**k
    return _fsum_checked(terms, f"moment of order {k}")


def truncated_abs_moment(mu: EmpiricalMeasure, p: float, B: float) -> float:
    """sum over |x_i| > B of w_i |x_i|^p."""
    if B <= 0:
        raise ValueError("B must be positive")
    mask = np.abs(mu.points) > B
    if not mask.any():
        return 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        terms = mu.weights[mask] * np.abs(mu.points[mask]) ** p
    return _fsum_checked(terms, f"truncated moment of order {p}")


def log_truncated_abs_moment(mu: EmpiricalMeasure, p: float, B: float) -> float:
    """log of truncated_abs_moment, computed without overflow (-inf when empty)."""
    mask = np.abs(mu.points) > B
    if not mask.any():
        return -math.inf
    logs = np.log(mu.weights[mask]) + p * np.log(np.abs(mu.points[mask]))
    top = logs.max()
    return float(top + math.log(math.fsum(np.exp(logs - top))))


def _fsum_checked(terms: np.ndarray, what: str) -> float:
    if not np.all(np.isfinite(terms)):
        warnings.warn(f"{what} overflowed float64", MomentOverflowWarning, stacklevel=3)
        pos = np.any(terms == np.inf)
        neg = np.any(terms == -np.inf)
        if pos and not neg:
            return math.inf
        if neg and not pos:
            return -math.inf
        return math.nan
    total = math.fsum(terms)
    if not math.isfinite(total):
        warnings.warn(f"{what} overflowed float64", MomentOverflowWarning, stacklevel=3)
    return total


def lipschitz_gap(mu: EmpiricalMeasure, nu: EmpiricalMeasure, f: Callable) -> float:
    """|int f dmu - int f dnu|."""
    fm = np.asarray(f(mu.points), dtype=float)
    fn = np.asarray(f(nu.points), dtype=float)
    if not (np.all(np.isfinite(fm)) and np.all(np.isfinite(fn))):
        raise InputError("test function is non-finite on the support")
    return abs(math.fsum(mu.weights * fm) - math.fsum(nu.weights * fn))
