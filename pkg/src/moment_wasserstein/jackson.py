"""Chebyshev-Jackson approximation of 1-Lipschitz functions on [-B, B].

For ``f`` with ``f(0) = 0`` and Lipschitz constant 1, the damped Chebyshev
series of ``g(x) = f(Bx)`` is converted to the monomial basis exactly (rational
arithmetic), rescaled back to [-B, B] and certified against the envelope
``|c_j| <= 6B 3^(m-j)``.  The sup-norm error target is ``18B/m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.fft import dct

from .chebyshev import (
    MonomialCoeffs,
    chebyshev_table,
    clenshaw,
)
from .errors import (
    CenteringError,
    CertificationError,
    DegreeError,
    DegreeOverflowError,
    InputFunctionError,
)

DEFAULT_QUAD_POINTS = 2**18
DEFAULT_DEGREE_CAP = 64
CENTERING_TOL = 1e-12
ERROR_CONSTANT = 18.0
COEFF_CONSTANT = 6


@dataclass(frozen=True)
class ChebyshevSeries:
    """Chebyshev coefficients ``a`` with Jackson damping ``lam`` (both length m+1)."""

    m: int
    a: np.ndarray
    lam: np.ndarray

    @property
    def damped(self) -> np.ndarray:
        return self.a * self.lam

    def __call__(self, x):
        return clenshaw(self.damped, x)


@dataclass(frozen=True)
class CertifiedApprox:
    """Polynomial ``P(x) = sum_j c_j x^j`` on [-B, B] with its certificate."""

    poly: MonomialCoeffs
    B: float
    m: int
    sup_error_bound: float
    coeff_bounds: np.ndarray
    series: ChebyshevSeries

    def __call__(self, x):
        return self.poly(x)

    def reference(self, x):
        """Clenshaw evaluation of the damped series at ``x / B``."""
        return self.series(np.asarray(x, dtype=float) / self.B)

    @property
    def coeffs(self) -> np.ndarray:
        out = np.zeros(self.m + 1)
        out[: self.poly.degree + 1] = self.poly.coeffs
        return out

    @property
    def coeff_margins(self) -> np.ndarray:
        return self.coeff_bounds - np.abs(self.coeffs)

    def to_dict(self) -> dict:
        return {
            "B": self.B,
            "m": self.m,
            "coeffs": self.coeffs.tolist(),
            "coeff_bounds": self.coeff_bounds.tolist(),
            "coeff_margins": self.coeff_margins.tolist(),
            "sup_error_bound": self.sup_error_bound,
            "chebyshev_coeffs": self.series.a.tolist(),
            "jackson_damping": self.series.lam.tolist(),
        }


def _vectorized(f: Callable) -> Callable:
    probe = np.array([0.0, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except Exception:
        pass
    return np.vectorize(lambda t: float(f(float(t))), otypes=[float])


def chebyshev_coefficients(g: Callable, m: int, quad_points: int | None = None) -> np.ndarray:
    """Chebyshev coefficients a_0..a_m of ``g`` on [-1, 1].

    Uses N-point Gauss-Chebyshev quadrature with nodes
    ``cos((2i-1) pi / (2N))`` and weights ``pi/N``, i.e.
    ``a_k = (2/N) sum_i g(x_i) cos(k (2i-1) pi / (2N))`` with the k=0 term
    halved.  The sum is a type-II DCT of the sampled values.

    Parameters
    ----------
    g : callable
        Function on [-1, 1]; vectorised callables are used directly.
    m : int
        Highest coefficient index.
    quad_points : int, optional
        Number of nodes N, at least 4(m+1).  Defaults to
        ``max(2**18, 8(m+1))``; kinks in Lipschitz targets make the
        aliasing error decay only like N^-2.
    """
    if quad_points is None:
        quad_points = max(DEFAULT_QUAD_POINTS, 8 * (m + 1))
    if quad_points < 4 * (m + 1):
        raise ValueError(f"quad_points must be >= 4(m+1) = {4 * (m + 1)}")
    n = quad_points
    nodes = np.cos((2.0 * np.arange(n) + 1.0) * np.pi / (2.0 * n))
    values = np.asarray(_vectorized(g)(nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise InputFunctionError("function returned non-finite values at quadrature nodes")
    a = dct(values, type=2)[: m + 1] / n
    a[0] /= 2.0
    return a


def jackson_damping(m: int) -> np.ndarray:
    """Jackson kernel damping factors lambda_{k,m}, k = 0..m.

    lambda_k = [(m-k+1) cos(k pi/(m+1)) + sin(k pi/(m+1)) cot(pi/(m+1))] / (m+1)
    """
    if m < 4 or m % 4:
        raise DegreeError(f"m must be a positive multiple of 4, got {m}")
    q = m + 1
    k = np.arange(m + 1)
    ang = k * np.pi / q
    lam = ((q - k) * np.cos(ang) + np.sin(ang) / np.tan(np.pi / q)) / q
    lam[0] = 1.0
    return np.clip(lam, 0.0, 1.0)


def approximate_lipschitz(
    f: Callable,
    B: float,
    m: int,
    quad_points: int | None = None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> CertifiedApprox:
    """Certified Chebyshev-Jackson polynomial for a 1-Lipschitz ``f`` on [-B, B].

    Raises CenteringError if ``|f(0)| > 1e-12`` and CertificationError if a
    coefficient escapes ``6B 3^(m-j)``.
    """
    if B < 3:
        raise ValueError(f"B must be >= 3 (rescale smaller intervals), got {B}")
    if m < 4 or m % 4:
        raise DegreeError(f"m must be a positive multiple of 4, got {m}")
    if m > degree_cap:
        raise DegreeOverflowError(f"m={m} exceeds degree cap {degree_cap}")
    fv = _vectorized(f)
    f0 = float(np.asarray(fv(np.array([0.0, 0.0])))[0])
    if not math.isfinite(f0) or abs(f0) > CENTERING_TOL:
        raise CenteringError(f"f(0) = {f0!r}; target must vanish at 0")

    B = float(B)
    a = chebyshev_coefficients(lambda x: fv(B * x) - f0, m, quad_points)
    lam = jackson_damping(m)
    series = ChebyshevSeries(m=m, a=a, lam=lam)

    table = chebyshev_table(m)
    damped = [Fraction(float(v)) for v in series.damped]
    b = [sum((damped[k] * table[k][j] for k in range(j, m + 1) if table[k][j]), Fraction(0))
         for j in range(m + 1)]
    fb = Fraction(B)
    c = [bj / fb**j for j, bj in enumerate(b)]

    exact_bounds = [COEFF_CONSTANT * fb * 3 ** (m - j) for j in range(m + 1)]
    for j, (cj, bound) in enumerate(zip(c, exact_bounds)):
        if abs(cj) > bound:
            raise CertificationError(
                f"|c_{j}| = {float(abs(cj)):.6g} exceeds 6B*3^(m-j) = {float(bound):.6g}"
            )
    return CertifiedApprox(
        poly=MonomialCoeffs.from_exact(c),
        B=B,
        m=m,
        sup_error_bound=ERROR_CONSTANT * B / m,
        coeff_bounds=np.array([float(v) for v in exact_bounds]),
        series=series,
    )


def measure_sup_error(f: Callable, approx: CertifiedApprox, grid_size: int = 100_000) -> float:
    """Max |f - P| on a uniform grid of [-B, B], worst of the Clenshaw and Horner paths."""
    if grid_size < 1000:
        raise ValueError("grid_size must be >= 1000")
    x = np.linspace(-approx.B, approx.B, grid_size)
    fx = np.asarray(_vectorized(f)(x), dtype=float)
    ref = approx.reference(x)
    chk = approx(x)
    return float(max(np.max(np.abs(fx - ref)), np.max(np.abs(fx - chk))))


def evaluation_gap(approx: CertifiedApprox, grid_size: int = 10_000) -> float:
    """Max discrepancy between Clenshaw (series) and double-double Horner (monomial) paths."""
    x = np.linspace(-approx.B, approx.B, grid_size)
    return float(np.max(np.abs(approx.reference(x) - approx(x))))


def _sawtooth(x):
    # distance to the nearest even integer
    x = np.asarray(x, dtype=float)
    return np.abs(x - 2.0 * np.round(x / 2.0))


LIPSCHITZ_SUITE: dict[str, Callable] = {
    "abs": np.abs,
    "sin": np.sin,
    "relu": lambda x: np.maximum(x, 0.0),
    "clamp": lambda x: np.clip(x, -1.0, 1.0),
    "sawtooth": _sawtooth,
}

NAMED_FUNCTIONS: dict[str, Callable] = {"identity": lambda x: np.asarray(x, dtype=float), **LIPSCHITZ_SUITE}
