"""Projections of measures on R^d, sphere nets, and sup-over-directions W1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import InputError, NormalizationError, UnsupportedDimensionError
from .measure import EmpiricalMeasure, w1_distance

UNIT_TOL = 1e-9
NET_CHECK_DIRECTIONS = 10_000


@dataclass(frozen=True, eq=False)
class VectorMeasure:
    points: np.ndarray  # shape (N, d)
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape[0] != w.size or w.size == 0:
            raise InputError("need one positive weight per point")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))) or np.any(w <= 0):
            raise InputError("points must be finite and weights positive")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise InputError("weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_samples(cls, points, weights=None) -> "VectorMeasure":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float).ravel()
        if w.size and np.any(w <= 0):
            raise InputError("weights must be positive")
        return cls(pts, w / math.fsum(w))

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class SphereNet:
    directions: np.ndarray  # shape (N, d), unit rows
    epsilon: float
    covering_radius: float

    def __len__(self):
        return self.directions.shape[0]


@dataclass(frozen=True)
class LipschitzCheck:
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + 1e-10


@dataclass(frozen=True, eq=False)
class SlicedSup:
    value: float
    per_direction: np.ndarray
    slack: float  # (M1(mu) + M1(nu)) * epsilon

    def __float__(self):
        return self.value


def _unit(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float).ravel()
    if abs(np.linalg.norm(t) - 1.0) > UNIT_TOL:
        raise NormalizationError(f"direction has norm {np.linalg.norm(t)!r}")
    return t


def project(eta: VectorMeasure, theta) -> EmpiricalMeasure:
    """Pushforward of ``eta`` under x -> <theta, x>."""
    t = _unit(theta)
    if t.size != eta.d:
        raise InputError("direction dimension does not match the measure")
    return EmpiricalMeasure.from_samples(eta.points @ t, eta.weights)


def m1(eta: VectorMeasure) -> float:
    """First absolute moment sum_i w_i ||x_i||."""
    return math.fsum(eta.weights * np.linalg.norm(eta.points, axis=1))


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z * z)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))


def covering_radius(directions: np.ndarray, probes: int = NET_CHECK_DIRECTIONS, seed: int = 0) -> float:
    """Largest distance from a random unit probe to its nearest net direction."""
    d = directions.shape[1]
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((probes, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return float(cdist(u, directions).min(axis=1).max())


def build_sphere_net(d: int, epsilon: float) -> SphereNet:
    """Epsilon-net of S^{d-1} for d in {2, 3}; epsilon is capped at 1.

    d = 2 uses a uniform angular grid with spacing <= 2 arcsin(eps/2).  d = 3
    uses Fibonacci points, refined until the covering radius measured against
    10^4 random directions is at most eps.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    eps = min(float(epsilon), 1.0)
    if d == 2:
        n = math.ceil(2.0 * math.pi / (2.0 * math.asin(eps / 2.0)))
        ang = 2.0 * math.pi * np.arange(n) / n
        dirs = np.column_stack((np.cos(ang), np.sin(ang)))
        radius = 2.0 * math.sin(math.pi / (2.0 * n))
    elif d == 3:
        n = max(4, math.ceil(4.0 / eps**2))
        while True:
            dirs = _fibonacci_sphere(n)
            radius = covering_radius(dirs)
            if radius <= eps:
                break
            n = math.ceil(n * 1.25)
    else:
        raise UnsupportedDimensionError(f"sphere nets are implemented for d in {{2, 3}}, got {d}")
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return SphereNet(directions=dirs, epsilon=eps, covering_radius=radius)


def projection_lipschitz_check(eta: VectorMeasure, theta1, theta2) -> LipschitzCheck:
    """Both sides of W1(eta_t1, eta_t2) <= ||t1 - t2|| M1(eta)."""
    t1, t2 = _unit(theta1), _unit(theta2)
    lhs = w1_distance(project(eta, t1), project(eta, t2))
    rhs = float(np.linalg.norm(t1 - t2)) * m1(eta)
    return LipschitzCheck(lhs=lhs, rhs=rhs)


def sliced_sup_w1(mu: VectorMeasure, nu: VectorMeasure, net: SphereNet) -> SlicedSup:
    """Max over net directions of W1 between the projected measures."""
    if mu.d != nu.d or mu.d != net.directions.shape[1]:
        raise InputError("dimension mismatch")
    per = np.empty(len(net))
    for i, theta in enumerate(net.directions):
        per[i] = w1_distance(project(mu, theta), project(nu, theta))
    slack = (m1(mu) + m1(nu)) * net.epsilon
    return SlicedSup(value=float(per.max()), per_direction=per, slack=slack)


def assignment_w1(x, y) -> float:
    """Exact W1 between equal-size uniform samples in R^d via optimal assignment."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise InputError("assignment needs equal sample sizes")
    cost = cdist(x, y)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())
