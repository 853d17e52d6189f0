"""Smoke tests for the _npsa extension module and the CLI binary."""

import csv
import math
import os
import subprocess

import pytest

import _npsa

TWO_PI = 2.0 * math.pi


def test_distribution_closed_forms():
    exp = _npsa.Exponential(mu=5.0)
    assert _npsa.cdf(exp, 0.0) == 0.0
    assert _npsa.cdf(exp, 5.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert _npsa.phi_exact(exp, 0.0) == 5.0
    assert _npsa.dist_mean(exp) == 5.0

    lomax = _npsa.Lomax(alpha=3.5, xi=5.0)
    assert _npsa.phi_exact(lomax, 0.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        _npsa.Lomax(alpha=0.5, xi=5.0)


def test_sampling_is_seeded():
    exp = _npsa.Exponential(mu=5.0)
    draws = _npsa.sample_values(exp, seed=7, count=2000)
    assert draws == _npsa.sample_values(exp, seed=7, count=2000)
    assert abs(sum(draws) / len(draws) - 5.0) < 0.5


def test_mean_shortage_cache():
    cache = _npsa.MeanShortageCache([1.0, 2.0, 3.0])
    assert cache(0.0) == 2.0
    assert cache(1.5) == pytest.approx(2.0 / 3.0)
    assert cache(10.0) == 0.0
    assert cache.ecdf(2.0) == pytest.approx(2.0 / 3.0)
    assert cache.suffix_integrals == pytest.approx([1.0, 1.0 / 3.0, 0.0])


def test_curve_oracle_and_replay():
    intensity = _npsa.IntensityFunction.constant(rate=1.0, horizon=TWO_PI)
    exp = _npsa.Exponential(mu=5.0)
    curves = _npsa.derive_critical_curves_exact(intensity, exp, n=1)
    assert curves.threshold(1, 0.0) == pytest.approx(9.92784, abs=1e-4)
    assert curves.threshold(1, TWO_PI) == 0.0

    below = _npsa.Realization([_npsa.Event(0.0, 9.0)], horizon=TWO_PI)
    above = _npsa.Realization([_npsa.Event(0.0, 10.0)], horizon=TWO_PI)
    assert _npsa.replay_policy(curves, below).workers_used == 0
    assert _npsa.replay_policy(curves, above).workers_used == 1

    assert _npsa.optimal_reward(curves) == pytest.approx(9.92784, abs=1e-4)
    reward = _npsa.expected_reward(curves, intensity, exp)
    assert reward == pytest.approx(_npsa.optimal_reward(curves), rel=1e-3)


def test_simulate_fit_derive_pipeline():
    intensity = _npsa.IntensityFunction.constant(rate=2.0, horizon=4.0)
    exp = _npsa.Exponential(mu=5.0)
    streams = _npsa.simulate_many(intensity, exp, count=200, seed=11)
    assert all(s.horizon == 4.0 for s in streams)

    est = _npsa.IntensityEstimate.fit(streams, horizon=4.0)
    assert est.rate_at(1.0) == pytest.approx(2.0, abs=0.5)

    values = [e.value for s in streams for e in s.events]
    cache = _npsa.MeanShortageCache(values)
    curves = _npsa.derive_critical_curves_from_cache(est.as_intensity(), cache, n=3)
    assert curves.num_workers == 3
    for k in (1, 2):
        assert curves.threshold(k + 1, 1.0) <= curves.threshold(k, 1.0) + 1e-6


def test_baseline_policies():
    events = [
        _npsa.Event(0.5, 10.0, 0.9, 1),
        _npsa.Event(1.0, 99.0, 0.2, 0),
        _npsa.Event(1.5, 30.0, 0.8, 1),
    ]
    stream = _npsa.Realization(events, horizon=2.0, scored=True)
    greedy = _npsa.greedy_policy(stream, 1, 0.5)
    assert [a.event_index for a in greedy.accepted] == [0]
    hindsight = _npsa.hindsight_policy(stream, 1, 0.5)
    assert [a.event_index for a in hindsight.accepted] == [2]
    full = _npsa.full_knowledge_policy(stream, 2)
    metrics = _npsa.fraud_metrics(full, stream)
    assert metrics.value_fraction == pytest.approx(1.0)
    assert metrics.captured_frauds == 2


def _run_cli(*args):
    cli = os.environ["NPSA_CLI"]
    return subprocess.run([cli, *args], check=True, capture_output=True, text=True)


def test_cli_round_trip(tmp_path):
    train = tmp_path / "train.csv"
    out_prefix = tmp_path / "fit"
    _run_cli("simulate", "--out", str(train), "--count", "20", "--seed", "3",
             "--horizon", "4.0", "--rate", "2.0", "--dist", "exponential", "--mu", "5.0")
    _run_cli("curves", "--train", str(train), "--horizon", "4.0", "--n", "2",
             "--out-prefix", str(out_prefix))
    curves_csv = tmp_path / "fit_curves.csv"
    assert curves_csv.exists()
    with open(curves_csv) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t", "y_1", "y_2"]
    assert len(rows) == 1 + 1024

    result = tmp_path / "replay.csv"
    _run_cli("replay", "--test", str(train), "--curves", str(curves_csv),
             "--horizon", "4.0", "--out", str(result))
    with open(result) as f:
        replay_rows = list(csv.reader(f))
    assert replay_rows[0] == ["realization_id", "workers_used", "total_reward"]
    assert len(replay_rows) == 1 + 20

    # deterministic reruns are byte-identical
    first = result.read_bytes()
    _run_cli("replay", "--test", str(train), "--curves", str(curves_csv),
             "--horizon", "4.0", "--out", str(result))
    assert result.read_bytes() == first


def test_cli_experiments(tmp_path):
    conv = tmp_path / "conv.csv"
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("seed = 12\nworkers = 1\nm_max = 6\nm_test = 5\n"
                   f"out = {conv}\n")
    _run_cli("expt-convergence", "--config", str(cfg))
    with open(conv) as f:
        rows = list(csv.reader(f))
    assert rows[0][0] == "M"
    assert len(rows) == 1 + 6
    first = conv.read_bytes()
    _run_cli("expt-convergence", "--config", str(cfg))
    assert conv.read_bytes() == first

    # command-line flags override the config file
    _run_cli("expt-convergence", "--config", str(cfg), "--m-max", "3")
    with open(conv) as f:
        assert len(list(csv.reader(f))) == 1 + 3

    train = tmp_path / "scored_train.csv"
    test = tmp_path / "scored_test.csv"
    for path, seed in ((train, 21), (test, 22)):
        _run_cli("simulate", "--out", str(path), "--count", "4", "--seed", str(seed),
                 "--horizon", "2.0", "--rate", "30", "--dist", "lomax",
                 "--alpha", "2.5", "--xi", "100", "--scored",
                 "--fraud-prob", "0.3", "--legit-mu", "10", "--score-noise", "0.2")
    fraud = tmp_path / "fraud.csv"
    _run_cli("expt-fraud", "--train", str(train), "--test", str(test),
             "--horizon", "2.0", "--workers", "2,5", "--out", str(fraud))
    with open(fraud) as f:
        rows = list(csv.reader(f))
    assert rows[0][1] == "policy"
    policies = {r[1] for r in rows[1:]}
    assert policies == {"npsa", "greedy", "uniform", "hindsight", "full_knowledge"}
    assert len(rows) == 1 + 2 * 5
