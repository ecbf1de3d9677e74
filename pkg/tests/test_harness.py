import json
import math

import numpy as np
import pytest

from moment_wasserstein.errors import BudgetInfeasibleError, ConfigError
from moment_wasserstein.harness import (
    EXIT_HYPOTHESIS,
    EXIT_OK,
    DegenerateReferenceWarning,
    ExperimentConfig,
    auto_truncation,
    certify,
    check_hypotheses,
    decompose_bound,
    draw,
    estimate_ew1,
    fit_slopes,
    jackknife_se,
    run_experiment,
    run_vector_experiment,
)
from moment_wasserstein.measure import EmpiricalMeasure, truncated_abs_moment


def cfg(**kw):
    base = dict(generator="gaussian", n_schedule=[50, 200], replicates=20, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    for bad in (
        dict(n_schedule=[]),
        dict(n_schedule=[100, 100]),
        dict(replicates=5),
        dict(B=2.0),
        dict(epsilon=0.0),
        dict(moment_orders=0),
        dict(r_schedule="linear"),
        dict(r_schedule={50: 4}),
        dict(r_schedule={50: 8, 200: 4}),
        dict(generator="nope"),
        dict(pooled_factor=0),
    ):
        with pytest.raises(ConfigError):
            cfg(**bad)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"generator": "gaussian", "n_schedule": [10], "colour": 1})


def test_r_schedule_and_json(tmp_path):
    c = cfg(r_schedule={"50": 6, "200": 9.5})
    assert c.r_n(50) == 6.0 and c.r_n(200) == 9.5
    assert cfg().r_n(100) == 14.0 and cfg().r_n(1) == 2.0
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_dict()))
    assert ExperimentConfig.from_json(path).to_dict() == c.to_dict()


def test_jackknife_of_mean_is_classical_se(rng):
    v = rng.standard_normal(37)
    assert jackknife_se(v) == pytest.approx(np.std(v, ddof=1) / math.sqrt(v.size), rel=1e-12)


def test_draw_splits_held_and_pooled():
    s = draw(cfg(), 50)
    assert s.held.shape == (20, 50) and s.pooled_rows.shape == (80, 50)
    assert not np.any(np.isin(s.held, s.pooled_rows))


def test_exchangeable_ew1_within_noise_floor():
    c = cfg(generator="exchangeable")
    for n in c.n_schedule:
        est = estimate_ew1(c, n)
        assert est.value <= est.noise_floor
        hyp = check_hypotheses(c, n)
        assert all(v == 0.0 for v in hyp.moment_variances.values())


def test_degenerate_reference_warns():
    c = cfg(generator="exchangeable", n_schedule=[1])
    with pytest.warns(DegenerateReferenceWarning):
        assert estimate_ew1(c, 1).value == 0.0


def test_common_shock_lower_bound():
    c = cfg(generator="shock", replicates=100)
    est = estimate_ew1(c, 200)
    # W1(mu_n, mean measure) >= |row mean shift|, and E|Z| = sqrt(2/pi)
    assert est.value >= 0.5 * math.sqrt(2 / math.pi)


def test_fit_slopes():
    ns = [10, 100, 1000]
    out = fit_slopes(ns, [{1: 1 / n, 2: 0.0, 3: 1.0} for n in ns])
    assert out[1] == pytest.approx(-1.0)
    assert out[2] == -math.inf
    assert out[3] == pytest.approx(0.0)


def test_auto_truncation():
    mu = EmpiricalMeasure.from_samples([0.0, 1.0, 4.0, 10.0])
    assert auto_truncation(mu, 1.0, 5.0) == 3.0
    B = auto_truncation(mu, 1.0, 3.0)
    assert B == 4.0 and truncated_abs_moment(mu, 1, B) <= 3.0
    assert auto_truncation(mu, 1.0, 2.0) == 10.0
    assert auto_truncation(mu, 5.0, 0.1) == 10.0
    assert auto_truncation(mu, 6.5, 10.0) == 6.5


def test_decomposition_exchangeable_reduces_to_net_slack():
    c = cfg(generator="exchangeable", B=3.0, epsilon=1.0)
    d = decompose_bound(c, 50)
    assert d.tail_term == 0.0 and d.poly_tail_term == 0.0 and d.variance_term == 0.0
    assert d.total == d.net_term == 4.0
    assert d.m == 4 * math.ceil(18 * 3 / 1.0)


def test_gaussian_tail_term():
    # E|X| 1{|X|>6} = 2 phi(6)
    c = cfg(B=6.0, epsilon=0.5)
    with pytest.raises(BudgetInfeasibleError):
        decompose_bound(c, 50)
    pooled = EmpiricalMeasure.from_samples(draw(c, 50).pooled_rows)
    phi6 = math.exp(-18) / math.sqrt(2 * math.pi)
    assert 2 * truncated_abs_moment(pooled, 1, 6.0) <= max(1e-7, 2 * 2 * phi6)


def test_decomposition_log_terms_consistent():
    d = decompose_bound(cfg(epsilon=2.0), 50)
    assert d.B >= 3 and d.m == 4 * math.ceil(18 * d.B / 2.0)
    assert d.envelope_sum == pytest.approx(sum(6 * d.B * 3.0 ** (d.m - j) for j in range(d.m + 1)), rel=1e-12)
    if d.variance_term > 0:
        assert math.log(d.variance_term) == pytest.approx(d.log_variance_term)


def test_run_experiment_gaussian(tmp_path):
    c = cfg(output=str(tmp_path / "out" / "g"))
    rep = run_experiment(c)
    assert rep.exit_code == EXIT_OK and rep.flags["hypothesis_a"] and rep.flags["hypothesis_b"]
    assert all(r["ew1"] >= 0 for r in rep.records)
    csv_text = (tmp_path / "out" / "g.csv").read_text()
    assert csv_text == rep.to_csv()
    header = [line for line in csv_text.splitlines() if not line.startswith("#")][0]
    assert header.split(",")[0] == "n" and "ew1" in header
    payload = json.loads((tmp_path / "out" / "g.json").read_text())
    assert payload["exit_code"] == EXIT_OK and len(payload["records"]) == 2


def test_certify_skips_estimation():
    rep = certify(cfg())
    assert "ew1" not in rep.records[0] and "decay_observed" not in rep.flags
    assert "ew1" not in rep.to_csv().splitlines()[-3]


def test_common_shock_flags_hypothesis_b():
    rep = run_experiment(cfg(generator="shock", n_schedule=[50, 200, 800]))
    assert not rep.flags["hypothesis_b"]
    assert rep.exit_code == EXIT_HYPOTHESIS
    assert abs(rep.slopes[1]) < 0.3


def test_seed_changes_output():
    assert run_experiment(cfg(seed=1)).to_csv() != run_experiment(cfg(seed=2)).to_csv()


def test_rank_one_sup_direction():
    angle = 0.7
    c = cfg(generator=f"rank_one:angle={angle}", net_epsilon=0.1)
    rep = run_vector_experiment(c)
    v = np.array([math.cos(angle), math.sin(angle)])
    for rec in rep.records:
        assert abs(np.dot(rec["net_sup_argmax"], v)) >= math.cos(0.1)


def test_net_refinement_within_slack():
    c = cfg(generator="gaussian:d=2", n_schedule=[50])
    coarse = run_vector_experiment(c, net_epsilon=0.4).records[0]
    fine = run_vector_experiment(c, net_epsilon=0.2).records[0]
    assert fine["net_size"] == 2 * coarse["net_size"]
    assert fine["net_sup"] >= coarse["net_sup"] - 1e-12
    assert fine["net_sup"] - coarse["net_sup"] < coarse["slack"]


def test_vector_experiment_3d():
    rep = run_vector_experiment(cfg(generator="gaussian:d=3", n_schedule=[50, 200]), net_epsilon=0.5)
    assert rep.flags["m1_bounded"]
    assert rep.records[1]["net_sup"] < rep.records[0]["net_sup"]


def test_vector_rejects_scalar_only_family():
    with pytest.raises(ConfigError):
        run_vector_experiment(cfg(generator="gaussian"))
