"""Chebyshev polynomials of the first kind in the monomial basis.

Coefficients are produced by the integer three-term recurrence and kept as
exact Python integers; a float64 view is provided for vectorised work.  Two
evaluation routes are offered: Horner on monomial coefficients (plain and
double-double) and Clenshaw on a Chebyshev series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DegreeOverflowError

DEGREE_CAP = 256
SILVER_RATIO = 1.0 + math.sqrt(2.0)


@dataclass(frozen=True)
class MonomialCoeffs:
    """Polynomial ``sum_j coeffs[j] * x**j``.

    ``exact`` holds the coefficients as ints or Fractions when they are known
    exactly; ``coeffs`` is the float64 rounding of the same numbers.
    """

    degree: int
    coeffs: np.ndarray
    exact: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("coeffs must have degree+1 entries")

    @classmethod
    def from_exact(cls, values: Sequence[Rational]) -> "MonomialCoeffs":
        vals = list(values)
        while len(vals) > 1 and vals[-1] == 0:
            vals.pop()
        if not vals:
            vals = [0]
        floats = np.array([float(v) for v in vals], dtype=float)
        return cls(degree=len(vals) - 1, coeffs=floats, exact=tuple(vals))

    @classmethod
    def from_floats(cls, values: Sequence[float]) -> "MonomialCoeffs":
        arr = np.trim_zeros(np.asarray(values, dtype=float), "b")
        if arr.size == 0:
            arr = np.zeros(1)
        return cls(degree=arr.size - 1, coeffs=arr)

    def __call__(self, x):
        if self.exact is not None:
            hi, lo = split_double_double(self.exact)
            return horner_dd(hi, lo, x)
        return horner(self.coeffs, x)


def chebyshev_monomial(k: int, degree_cap: int = DEGREE_CAP) -> MonomialCoeffs:
    """Exact monomial coefficients of T_k.

    Raises DegreeOverflowError when ``k`` exceeds ``degree_cap``.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k > degree_cap:
        raise DegreeOverflowError(
            f"degree {k} exceeds cap {degree_cap}; coefficients approach "
            f"{SILVER_RATIO ** k:.3g}"
        )
    return MonomialCoeffs.from_exact(_chebyshev_rows(k)[k])


@lru_cache(maxsize=8)
def _chebyshev_rows(k: int) -> tuple[tuple[int, ...], ...]:
    # T_{j+1} = 2x T_j - T_{j-1}, on integer coefficient lists
    rows = [(1,), (0, 1)]
    for j in range(1, k):
        prev, cur = rows[j - 1], rows[j]
        nxt = [0] * (j + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * c
        for i, c in enumerate(prev):
            nxt[i] -= c
        rows.append(tuple(nxt))
    return tuple(rows[: k + 1])


def chebyshev_table(m: int, degree_cap: int = DEGREE_CAP) -> tuple[tuple[int, ...], ...]:
    """Rows ``[T_k]_j`` for k = 0..m as exact integers (row k has k+1 entries)."""
    if m > degree_cap:
        raise DegreeOverflowError(f"degree {m} exceeds cap {degree_cap}")
    return _chebyshev_rows(max(m, 1))[: m + 1]


def verify_coeff_bound(k: int) -> bool:
    """True iff |[T_k]_0| <= 1 and max_{1<=j<=k} |[T_k]_j| <= (1+sqrt 2)^k."""
    row = _chebyshev_rows(max(k, 1))[k]
    if abs(row[0]) > 1:
        return False
    if k == 0:
        return True
    biggest = max(abs(c) for c in row[1:])
    return _int_le_silver_power(biggest, k)


def _int_le_silver_power(n: int, k: int) -> bool:
    # (1+sqrt2)^k = p + q*sqrt2 with integers p, q; compare n <= p + q*sqrt2 exactly.
    p, q = 1, 0
    for _ in range(k):
        p, q = p + 2 * q, p + q
    d = n - p
    if d <= 0:
        return True
    return d * d <= 2 * q * q


def horner(coeffs, x):
    """Plain float Horner evaluation of sum_j coeffs[j] x^j."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c in reversed(np.asarray(coeffs, dtype=float)):
        out = out * x + c
    return out


def split_double_double(values: Sequence[Rational]) -> tuple[np.ndarray, np.ndarray]:
    """Represent each exact value as hi + lo with hi, lo float64."""
    hi = np.empty(len(values))
    lo = np.empty(len(values))
    for i, v in enumerate(values):
        h = float(v)
        hi[i] = h
        lo[i] = float(Fraction(v) - Fraction(h)) if math.isfinite(h) else 0.0
    return hi, lo


_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    t = _SPLITTER * a
    ahi = t - (t - a)
    return ahi, a - ahi


def horner_dd(hi, lo, x, block: int = 8192):
    """Horner evaluation carried in double-double arithmetic.

    Coefficients are given as ``hi + lo`` pairs.  Rounding error is of order
    1e-32 times sum_j |c_j||x|^j, which keeps high-degree monomial forms with
    heavy cancellation usable.  Points are processed in cache-sized blocks.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty_like(flat)
    hs, ls = hi[-2::-1].tolist(), lo[-2::-1].tolist()
    for start in range(0, flat.size, block):
        out[start:start + block] = _horner_dd_block(hi[-1], lo[-1], hs, ls, flat[start:start + block])
    return out.reshape(x.shape)


def _horner_dd_block(h0, l0, hs, ls, x):
    xh, xl = _split(x)
    rh = np.full_like(x, h0)
    rl = np.full_like(x, l0)
    p, ah, al, e, s, tmp = (np.empty_like(x) for _ in range(6))
    for ch, cl in zip(hs, ls):
        # (rh, rl) * x via Dekker's TwoProd
        np.multiply(rh, x, out=p)
        np.multiply(rh, _SPLITTER, out=ah)
        np.subtract(ah, rh, out=al)
        np.subtract(ah, al, out=ah)
        np.subtract(rh, ah, out=al)
        np.multiply(ah, xh, out=e)
        e -= p
        for u, v in ((ah, xl), (al, xh), (al, xl), (rl, x)):
            np.multiply(u, v, out=tmp)
            e += tmp
        # + (ch, cl) via TwoSum
        np.add(p, ch, out=s)
        np.subtract(s, p, out=tmp)
        np.subtract(s, tmp, out=ah)
        np.subtract(p, ah, out=ah)
        np.subtract(ch, tmp, out=al)
        ah += al
        ah += e
        ah += cl
        np.add(s, ah, out=rh)
        np.subtract(rh, s, out=al)
        np.subtract(ah, al, out=rl)
    return rh + rl


def clenshaw(a, x):
    """Evaluate sum_k a[k] T_k(x) by the Clenshaw recurrence."""
    x = np.asarray(x, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    a = np.asarray(a, dtype=float)
    for ak in a[:0:-1]:
        b1, b2 = 2.0 * x * b1 - b2 + ak, b1
    return x * b1 - b2 + a[0]
