"""Truncated Orlicz norms built on Psi_r(x) = sum_{j=1}^{floor(r/2)} x^(2j) / j!.

The norm of a sample is found by bisection on the scale K.  Moment and tail
consequences are checked empirically; their constants are fitted from data
rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

BISECTION_TOL = 1e-9
MAX_ITER = 200


@dataclass(frozen=True)
class OrliczParams:
    r: float

    def __post_init__(self):
        if not self.r >= 2:
            raise ValueError(f"r must be >= 2, got {self.r}")

    @property
    def terms(self) -> int:
        return int(math.floor(self.r / 2))


@dataclass(frozen=True)
class NormEstimate:
    K: float
    method: str = "empirical"
    sample_size: int = 0
    r: float = 2.0
    lower: float = 0.0  # largest K seen with mean Psi > 1


@dataclass
class MomentBoundReport:
    K: float
    ratios: dict[int, float] = field(default_factory=dict)

    @property
    def fitted_C1(self) -> float:
        return max(self.ratios.values(), default=0.0)


@dataclass
class TailBoundReport:
    K: float
    terms: int
    t_grid: np.ndarray
    empirical: np.ndarray
    fitted_c: float

    def bound(self, c: float | None = None) -> np.ndarray:
        c = self.fitted_c if c is None else c
        return np.exp(-c * np.minimum(self.t_grid**2 / self.K**2, self.terms))

    def holds(self, c: float) -> bool:
        return bool(np.all(self.empirical <= self.bound(c) * (1.0 + 1e-12)))


def psi_value(r: float, x):
    """Psi_r(x), summed in increasing j with a running factorial; saturates at +inf."""
    terms = OrliczParams(r).terms
    with np.errstate(over="ignore", invalid="ignore"):
        x2 = np.square(np.asarray(x, dtype=float))
        total = np.zeros_like(x2)
        term = np.ones_like(x2)
        for j in range(1, terms + 1):
            term = term * x2 / j
            total = total + term
    total = np.where(np.isnan(total), np.inf, total)
    return total if total.ndim else float(total)


def _mean_psi(terms: int, absx: np.ndarray, K: np.ndarray) -> np.ndarray:
    # mean over axis 0 of Psi(|x|/K); K broadcasts over columns
    with np.errstate(over="ignore", invalid="ignore"):
        x2 = np.square(absx / K)
        total = np.zeros_like(x2)
        term = np.ones_like(x2)
        for j in range(1, terms + 1):
            term = term * x2 / j
            total = total + term
        total = np.where(np.isnan(total), np.inf, total)
        return total.mean(axis=0)


def orlicz_norm_columns(samples, r: float, tol: float = BISECTION_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Empirical Psi_r norm of every column of a 2-D array at once.

    Returns ``(K, lower)``: ``K`` satisfies mean Psi(|x|/K) <= 1 and ``lower``
    is the largest probed scale with mean > 1, with ``K - lower <= tol * K``.
    All-zero columns get K = 0.
    """
    absx = np.abs(np.asarray(samples, dtype=float))
    if absx.ndim == 1:
        absx = absx[:, None]
    if absx.shape[0] == 0:
        raise InputError("sample must be nonempty")
    if not np.all(np.isfinite(absx)):
        raise InputError("sample contains non-finite values")
    terms = OrliczParams(r).terms
    peak = absx.max(axis=0)
    zero = peak == 0
    hi = np.where(zero, 1.0, peak / math.sqrt(terms))
    for _ in range(MAX_ITER):
        over = _mean_psi(terms, absx, hi) > 1.0
        if not over.any():
            break
        hi = np.where(over, hi * 2.0, hi)
    lo = hi.copy()
    for _ in range(MAX_ITER):
        under = (_mean_psi(terms, absx, lo) <= 1.0) & ~zero
        if not under.any():
            break
        lo = np.where(under, lo / 2.0, lo)
    lo = np.where(zero, hi, lo)
    for _ in range(MAX_ITER):
        if np.all(hi - lo <= tol * hi):
            break
        mid = 0.5 * (lo + hi)
        ok = _mean_psi(terms, absx, np.where(zero, 1.0, mid)) <= 1.0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return np.where(zero, 0.0, hi), np.where(zero, 0.0, lo)


def orlicz_norm_empirical(sample, r: float, tol: float = BISECTION_TOL) -> NormEstimate:
    """Smallest K (to relative ``tol``) with mean Psi_r(|x_i|/K) <= 1.

    An all-zero sample has norm 0.
    """
    if not 0 < tol <= 0.01:
        raise ValueError("tol must lie in (0, 0.01]")
    arr = np.asarray(sample, dtype=float).ravel()
    K, lower = orlicz_norm_columns(arr, r, tol)
    return NormEstimate(K=float(K[0]), method="empirical", sample_size=arr.size, r=r, lower=float(lower[0]))


def verify_moment_bound(sample, r: float, K: float) -> MomentBoundReport:
    """Ratios (mean |x|^p)^(1/p) / (K sqrt p) for even p in [2, 2 floor(r/2)]."""
    absx = np.abs(np.asarray(sample, dtype=float).ravel())
    terms = OrliczParams(r).terms
    report = MomentBoundReport(K=K)
    peak = absx.max() if absx.size else 0.0
    for p in range(2, 2 * terms + 1, 2):
        if peak == 0 or K == 0:
            report.ratios[p] = 0.0
            continue
        # scale by the peak so |x|^p cannot overflow
        norm_p = peak * float(np.mean((absx / peak) ** p)) ** (1.0 / p)
        report.ratios[p] = norm_p / (K * math.sqrt(p))
    return report


def verify_tail_bound(sample, r: float, K: float, t_grid) -> TailBoundReport:
    """Largest c with P(|X| >= t) <= exp(-c min(t^2/K^2, floor(r/2))) on ``t_grid``."""
    absx = np.sort(np.abs(np.asarray(sample, dtype=float).ravel()))
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t values must be positive")
    terms = OrliczParams(r).terms
    tail = 1.0 - np.searchsorted(absx, t, side="left") / absx.size
    expo = np.minimum(t**2 / K**2, terms)
    with np.errstate(divide="ignore"):
        limits = np.where(tail > 0, -np.log(tail) / expo, np.inf)
    return TailBoundReport(K=K, terms=terms, t_grid=t, empirical=tail, fitted_c=float(np.min(limits)))


def student_t_sample(dof: float, size: int, seed: int = 0) -> np.ndarray:
    """Heavy-tailed diagnostic sample, used only to contrast fitted tail constants."""
    return np.random.default_rng(seed).standard_t(dof, size=size)
