import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from moment_wasserstein.errors import ConfigError, SizeCapError
from moment_wasserstein.generators import (
    ArraySpec,
    generate_row,
    generate_rows,
    jacobi_eigenvalues,
    moment_variance_estimate,
    parse_generator,
    rng_for,
    row_moments,
    unbiased_variance,
    wigner_matrix,
)


def test_parse_and_aliases():
    s = parse_generator("ar1:rho=0.9", n=10, seed=3)
    assert s.family == "ar1_gaussian" and s.params["rho"] == 0.9 and s.d == 1
    assert parse_generator("gaussian:d=2").d == 2
    assert parse_generator("shock").params["sigma_z"] == 1.0
    assert parse_generator("rank_one:angle=0.5").describe().startswith("rank_one:angle=0.5")
    for bad in ("nope", "ar1:rho", "ar1:beta=1", "ar1:rho=1.0", "shock:sigma_z=-1", "gaussian:d=0"):
        with pytest.raises(ConfigError):
            parse_generator(bad)
    with pytest.raises(ConfigError):
        ArraySpec("gaussian", n=0)
    with pytest.raises(ConfigError):
        ArraySpec("gaussian", seed=-1)


def test_seeded_determinism():
    spec = ArraySpec("uniform", n=4, seed=11)
    a = generate_row(spec, 0)
    np.testing.assert_array_equal(a, generate_row(spec, 0))
    assert not np.array_equal(a, generate_row(spec, 1))
    assert not np.array_equal(a, generate_row(ArraySpec("uniform", n=4, seed=12), 0))
    assert np.all(np.abs(a) <= 1)


def test_rows_independent_of_draw_order_and_threads():
    spec = ArraySpec("ar1", n=50, seed=5)
    rows = generate_rows(spec, 8)
    np.testing.assert_array_equal(generate_rows(spec, 4, start=4), rows[4:])
    with ThreadPoolExecutor(4) as pool:
        par = list(pool.map(lambda r: generate_row(spec, r), reversed(range(8))))
    np.testing.assert_array_equal(np.stack(par[::-1]), rows)


def test_rng_is_philox():
    assert type(rng_for(ArraySpec("gaussian"), 0).bit_generator).__name__ == "Philox"


def test_shapes():
    assert generate_row(ArraySpec("gaussian", n=7)).shape == (7,)
    assert generate_row(parse_generator("gaussian:d=3", n=7)).shape == (7, 3)
    assert generate_row(parse_generator("rank_one:d=3", n=7)).shape == (7, 3)
    assert generate_rows(ArraySpec("exchangeable", n=5), 3).shape == (3, 5)


def test_bounded_exchangeable_is_permuted_grid():
    row = generate_row(ArraySpec("exchangeable", n=9, seed=2), 4)
    np.testing.assert_array_equal(np.sort(row), np.linspace(-1, 1, 9))
    assert moment_variance_estimate(ArraySpec("exchangeable", n=9), 1, 50) == 0.0
    assert generate_row(ArraySpec("exchangeable", n=1)).tolist() == [0.0]


def test_ar1_autocorrelation():
    rho = 0.7
    x = generate_row(ArraySpec("ar1", n=10_000, seed=1, params={"rho": rho}))
    r1 = np.corrcoef(x[:-1], x[1:])[0, 1]
    se = math.sqrt((1 - rho**2) / x.size) * math.sqrt((1 + rho**2) / (1 - rho**2))
    assert abs(r1 - rho) <= 3 * se
    assert np.var(x) == pytest.approx(1.0, abs=0.1)


def test_common_shock_mean_variance():
    n = 50
    v = moment_variance_estimate(ArraySpec("shock", n=n, seed=3), 1, 4000)
    assert v == pytest.approx(1 + 1 / n, rel=0.1)


def test_iid_gaussian_mean_variance():
    n, R = 100, 10_000
    v = moment_variance_estimate(ArraySpec("gaussian", n=n, seed=4), 1, R)
    # sd of a sample variance of normals: sigma^2 sqrt(2/(R-1))
    assert abs(v - 1 / n) <= 3 * (1 / n) * math.sqrt(2 / (R - 1))


def test_moment_variance_slope():
    ns = [100, 1000, 10_000]
    for k in (1, 2):
        vs = [moment_variance_estimate(ArraySpec("gaussian", n=n, seed=6), k, 200) for n in ns]
        slope = np.polyfit(np.log(ns), np.log(vs), 1)[0]
        assert slope == pytest.approx(-1, abs=0.2)


def test_moment_variance_rejects_vectors():
    with pytest.raises(ConfigError):
        moment_variance_estimate(parse_generator("gaussian:d=2"), 1, 10)
    with pytest.raises(ValueError):
        moment_variance_estimate(ArraySpec("gaussian"), 1, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 33])
def test_jacobi_matches_eigvalsh(n):
    a = np.random.default_rng(n).standard_normal((n, n))
    a = a + a.T
    np.testing.assert_allclose(np.sort(jacobi_eigenvalues(a)), np.linalg.eigvalsh(a), atol=1e-9 * np.linalg.norm(a))


def test_jacobi_edge_cases():
    np.testing.assert_array_equal(jacobi_eigenvalues(np.zeros((3, 3))), np.zeros(3))
    np.testing.assert_array_equal(np.sort(jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0]))), [-1, 2, 3])
    with pytest.raises(ValueError):
        jacobi_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_wigner_spectrum():
    spec = ArraySpec("wigner", n=256, seed=8)
    ev = generate_row(spec)
    assert np.all(np.diff(ev) >= 0)
    assert np.mean(ev**2) == pytest.approx(1.0, abs=0.1)
    a = wigner_matrix(256, rng_for(spec, 0))
    np.testing.assert_array_equal(a, a.T)
    assert ev.sum() == pytest.approx(np.trace(a), abs=1e-6)
    np.testing.assert_allclose(ev, np.linalg.eigvalsh(a), atol=1e-9)
    with pytest.raises(SizeCapError):
        generate_row(ArraySpec("wigner", n=513))


def test_row_moments_permutation_invariant(rng):
    rows = rng.standard_normal((5, 40))
    perm = rows[:, rng.permutation(40)]
    np.testing.assert_array_equal(row_moments(rows, [1, 2, 3]), row_moments(perm, [1, 2, 3]))
    np.testing.assert_allclose(row_moments(rows, [2])[:, 0], np.mean(rows**2, axis=1))


def test_unbiased_variance():
    assert unbiased_variance([2.5, 2.5, 2.5]) == 0.0
    x = np.array([1e200, -1e200, 3e199])
    assert math.isfinite(unbiased_variance(x / 1e100))
    assert unbiased_variance([1.0, 2.0, 3.0, 4.0]) == pytest.approx(np.var([1, 2, 3, 4], ddof=1))
    with pytest.raises(ValueError):
        unbiased_variance([1.0])
