"""Seeded triangular-array generators.

Every row is drawn from its own Philox stream keyed by
``SeedSequence(seed, spawn_key=(n, replicate))``, so a row depends only on
(spec, n, replicate) and never on how many rows were drawn before it or on
which worker drew it.

Spec grammar: ``family[:key=value,...]``, e.g. ``ar1:rho=0.9`` or
``iid_gaussian:d=2``.  Families and parameters:

    iid_gaussian (gaussian)         d
    iid_uniform (uniform)           d          uniform on [-1, 1]^d
    ar1_gaussian (ar1)              rho, d     stationary, unit variance
    common_shock (shock)            sigma_z, d Y_i = Z + eps_i, Z shared
    wigner_spectrum (wigner)                   eigenvalues, entries N(0, 1/n)
    bounded_exchangeable (exchangeable)        permuted grid on [-1, 1]
    rank_one                        angle, polar   Y_i = xi_i * v
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, SizeCapError

WIGNER_CAP = 512
JACOBI_TOL = 1e-10
JACOBI_SWEEPS = 100

ALIASES = {
    "gaussian": "iid_gaussian",
    "uniform": "iid_uniform",
    "ar1": "ar1_gaussian",
    "shock": "common_shock",
    "wigner": "wigner_spectrum",
    "exchangeable": "bounded_exchangeable",
}
FAMILIES = {
    "iid_gaussian": {"d": 1},
    "iid_uniform": {"d": 1},
    "ar1_gaussian": {"rho": 0.5, "d": 1},
    "common_shock": {"sigma_z": 1.0, "d": 1},
    "wigner_spectrum": {},
    "bounded_exchangeable": {},
    "rank_one": {"angle": 0.0, "polar": math.pi / 2, "d": 2},
}
SCALAR_ONLY = {"wigner_spectrum", "bounded_exchangeable"}


@dataclass(frozen=True)
class ArraySpec:
    family: str
    n: int = 100
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        fam = ALIASES.get(self.family, self.family)
        if fam not in FAMILIES:
            raise ConfigError(f"unknown generator family {self.family!r}")
        merged = {**FAMILIES[fam], **self.params}
        unknown = set(merged) - set(FAMILIES[fam])
        if unknown:
            raise ConfigError(f"{fam} does not take parameters {sorted(unknown)}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", merged)
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit nonnegative integer")
        if fam == "ar1_gaussian" and not -1 < merged["rho"] < 1:
            raise ConfigError("rho must lie in (-1, 1)")
        if fam == "common_shock" and merged["sigma_z"] < 0:
            raise ConfigError("sigma_z must be >= 0")
        if self.d not in (1, 2, 3) and fam == "rank_one":
            raise ConfigError("rank_one supports d in {2, 3}")
        if self.d < 1:
            raise ConfigError("d must be >= 1")

    @property
    def d(self) -> int:
        return int(self.params.get("d", 1))

    def with_n(self, n: int) -> "ArraySpec":
        return replace(self, n=n)

    def describe(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}:{args}" if args else self.family


def parse_generator(text: str, n: int = 100, seed: int = 0) -> ArraySpec:
    """Parse ``family:key=value,...`` into an ArraySpec."""
    family, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"malformed generator parameter {item!r}")
        params[key.strip()] = int(value) if key.strip() == "d" else float(value)
    return ArraySpec(family=family, n=n, seed=seed, params=params)


def rng_for(spec: ArraySpec, replicate: int) -> np.random.Generator:
    ss = np.random.SeedSequence(spec.seed, spawn_key=(spec.n, replicate))
    return np.random.Generator(np.random.Philox(ss))


def generate_row(spec: ArraySpec, replicate: int = 0) -> np.ndarray:
    """One row Y_{1,n}..Y_{n,n}; shape (n,) for d = 1, else (n, d)."""
    rng = rng_for(spec, replicate)
    n, d, p = spec.n, spec.d, spec.params
    fam = spec.family
    if fam == "iid_gaussian":
        out = rng.standard_normal((n, d))
    elif fam == "iid_uniform":
        out = rng.uniform(-1.0, 1.0, (n, d))
    elif fam == "ar1_gaussian":
        rho = p["rho"]
        eps = rng.standard_normal((n, d))
        out = np.empty((n, d))
        out[0] = eps[0]
        scale = math.sqrt(1.0 - rho * rho)
        for i in range(1, n):
            out[i] = rho * out[i - 1] + scale * eps[i]
    elif fam == "common_shock":
        z = p["sigma_z"] * rng.standard_normal(d)
        out = z + rng.standard_normal((n, d))
    elif fam == "wigner_spectrum":
        if n > WIGNER_CAP:
            raise SizeCapError(f"wigner_spectrum supports n <= {WIGNER_CAP}, got {n}")
        return np.sort(jacobi_eigenvalues(wigner_matrix(n, rng)))
    elif fam == "bounded_exchangeable":
        grid = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
        return rng.permutation(grid)
    elif fam == "rank_one":
        v = np.array([
            math.sin(p["polar"]) * math.cos(p["angle"]),
            math.sin(p["polar"]) * math.sin(p["angle"]),
            math.cos(p["polar"]),
        ])[:d]
        v /= np.linalg.norm(v)
        out = np.outer(rng.standard_normal(n), v)
    else:  # pragma: no cover - guarded in ArraySpec
        raise ConfigError(fam)
    return out[:, 0] if d == 1 else out


def generate_rows(spec: ArraySpec, replicates, start: int = 0) -> np.ndarray:
    """Stack rows for replicate indices start..start+replicates-1."""
    return np.stack([generate_row(spec, r) for r in range(start, start + replicates)])


def wigner_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix with iid N(0, 1/n) entries on and above the diagonal."""
    upper = np.triu(rng.standard_normal((n, n)) / math.sqrt(n))
    return upper + np.triu(upper, 1).T


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # circle-method schedule: each round pairs every index with a distinct partner
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p = np.array(players[: m // 2])
        q = np.array(players[m // 2:][::-1])
        keep = (p < n) & (q < n)
        lo, hi = np.minimum(p, q)[keep], np.maximum(p, q)[keep]
        rounds.append((lo, hi))
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def jacobi_eigenvalues(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_SWEEPS) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Rotations are applied in round-robin order so each round touches disjoint
    index pairs and can be applied at once.  Iterates until the off-diagonal
    Frobenius norm is at most ``tol`` times the full norm.
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T):
        raise ValueError("matrix must be square and symmetric")
    if n == 1:
        return A.diagonal().copy()
    scale = np.linalg.norm(A)
    if scale == 0:
        return np.zeros(n)
    schedule = _round_robin(n)
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(A * A) - np.sum(A.diagonal() ** 2), 0.0))
        if off <= tol * scale:
            break
        for P, Q in schedule:
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            cc, sc = c[:, None], s[:, None]
            rp, rq = A[P, :], A[Q, :]
            A[P, :] = cc * rp - sc * rq
            A[Q, :] = sc * rp + cc * rq
            cp, cq = A[:, P], A[:, Q]
            A[:, P] = cp * c - cq * s
            A[:, Q] = cp * s + cq * c
    return A.diagonal().copy()


def row_moments(rows: np.ndarray, orders) -> np.ndarray:
    """Empirical moments (1/n) sum_i Y_i^k of each row, for each k in ``orders``.

    Rows are summed after sorting into a C-ordered array, so permuted rows
    give bit-identical moments.  Returns shape (replicates, len(orders)).
    """
    srt = np.ascontiguousarray(np.sort(np.asarray(rows, dtype=float), axis=1))
    orders = list(orders)
    out = np.empty((srt.shape[0], len(orders)))
    with np.errstate(over="ignore", invalid="ignore"):
        for col, k in enumerate(orders):
            out[:, col] = np.mean(srt**k, axis=1)
    return out


def unbiased_variance(values) -> float:
    """Sample variance with ddof=1, exactly 0 for identical values, overflow-safe."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least two replicates")
    if np.all(v == v[0]):
        return 0.0
    scale = np.max(np.abs(v))
    if not math.isfinite(scale):
        return math.inf
    return float(scale * scale * np.var(v / scale, ddof=1))


def moment_variance_estimate(spec: ArraySpec, k: int, replicates: int) -> float:
    """Var over replicates of the k-th empirical moment of a row."""
    if replicates < 2:
        raise ValueError("replicates must be >= 2")
    if spec.d != 1:
        raise ConfigError("moment variance is defined for scalar rows; project vector rows first")
    rows = generate_rows(spec, replicates)
    return unbiased_variance(row_moments(rows, [k])[:, 0])
