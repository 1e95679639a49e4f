import math

import numpy as np
import pytest

from ignorance.counting import (
    DetectorConfig,
    ExperimentCounts,
    ratio_stderr,
    report_from_counts,
    run_experiment,
    simulate_counts,
    simulate_experiment,
    true_outcome_table,
)
from ignorance.game import QUANTUM, ClassicalStrategy, classical_parts_probability, quantum_parts_probability

P13 = (1 + 1 / math.sqrt(13)) / 2


def test_unit_overlap_without_dark():
    cfg = DetectorConfig(1e6, 0.0, 1.0, seed=3)
    rec = simulate_counts(1.0, cfg)
    assert rec.estimate == pytest.approx(1.0, abs=6 * math.sqrt(2e-6))
    assert rec.stderr == pytest.approx(math.sqrt(2 / 1e6), rel=0.01)


def test_calibration_batch():
    rng = np.random.default_rng(7)
    cfg = DetectorConfig(1e6, 150.0, 1.0)
    hits = 0
    n = 1000
    for _ in range(n):
        rec = simulate_counts(P13, cfg, rng)
        hits += abs(rec.estimate - P13) <= 3 * rec.stderr
    assert hits / n >= 0.99


def test_dark_floor():
    rec = simulate_counts(0.0, DetectorConfig(1e6, 150.0, 1.0, seed=11))
    assert rec.estimate == pytest.approx(1.5e-4, rel=0.15)


def test_dark_bias_matches_expectation():
    r, dk, t, truth = 1e4, 1e3, 1.0, 0.3
    rng = np.random.default_rng(5)
    cfg = DetectorConfig(r, dk, t)
    est = np.array([simulate_counts(truth, cfg, rng).estimate for _ in range(4000)])
    expected = (r * truth + dk) / (r + dk)
    assert est.mean() == pytest.approx(expected, abs=4 * est.std() / math.sqrt(est.size) + 1e-4)
    bias = expected - truth
    assert 0 <= bias <= dk / r


def test_seeded_determinism():
    cfg = DetectorConfig(1e6, 150.0, 1.0, seed=42)
    assert simulate_counts(0.4, cfg) == simulate_counts(0.4, cfg)
    a = simulate_experiment(5, QUANTUM, cfg)
    b = simulate_experiment(5, QUANTUM, cfg)
    np.testing.assert_array_equal(a.observed, b.observed)
    np.testing.assert_array_equal(a.normalisation, b.normalisation)


@pytest.mark.parametrize("kwargs", [dict(integration_time=0.0), dict(signal_rate=-1.0), dict(dark_rate=-1.0)])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        DetectorConfig(**kwargs)


def test_invalid_probability():
    with pytest.raises(ValueError):
        simulate_counts(1.1, DetectorConfig())


def test_ratio_stderr_formula():
    assert ratio_stderr(400, 1600) == pytest.approx(0.25 * math.sqrt(1 / 400 + 1 / 1600))


def test_setting_count():
    d = 4
    counts = simulate_experiment(d, QUANTUM, DetectorConfig(seed=1))
    assert counts.observed.size == 2 * d ** 3
    assert counts.normalisation.shape == (d, d)


@pytest.mark.parametrize("d", [2, 5, 13])
def test_truth_table_rows_are_distributions(d):
    for s in (QUANTUM, *ClassicalStrategy):
        t = true_outcome_table(d, s)
        np.testing.assert_allclose(t.sum(axis=-1), 1.0, atol=1e-12)


def test_ideal_qubit_entropy():
    cfg = DetectorConfig(1e6, 0.0, 1e4, seed=2)
    rep = run_experiment(2, 0.5, QUANTUM, cfg)
    assert rep.h_parts == pytest.approx(-math.log2(0.8536), abs=1e-3)
    assert rep.h_parts == pytest.approx(-math.log2(quantum_parts_probability(2)), abs=1e-4)


def test_d13_violation_margin():
    rep = run_experiment(13, 0.5, QUANTUM, DetectorConfig(seed=42))
    assert rep.violated
    assert rep.margin_sigma > 3


@pytest.mark.parametrize("s", list(ClassicalStrategy))
@pytest.mark.parametrize("q", [0.0, 0.5, 1.0])
def test_classical_monte_carlo_matches_closed_form(s, q):
    rep = run_experiment(7, q, s, DetectorConfig(1e6, 0.0, 1.0, seed=9))
    assert rep.p_parts == pytest.approx(classical_parts_probability(7, s, q), abs=5 * rep.stderr_parts + 1e-12)
    assert not rep.violated


def test_efficiency_cancels():
    d = 5
    rng = np.random.default_rng(0)
    eff = rng.uniform(0.2, 1.0, d * d)
    cfg = DetectorConfig(1e6, 0.0, 100.0, seed=4)
    plain = run_experiment(d, 0.5, QUANTUM, cfg)
    lossy = run_experiment(d, 0.5, QUANTUM, cfg, efficiency=eff)
    exact = quantum_parts_probability(d)
    for rep in (plain, lossy):
        assert rep.p_parts == pytest.approx(exact, abs=5 * rep.stderr_parts)
    # the per-setting O/N ratios also lose the efficiency in expectation
    counts = simulate_experiment(d, QUANTUM, cfg, efficiency=eff)
    truth = true_outcome_table(d, QUANTUM)
    np.testing.assert_allclose(counts.ratios(), truth, atol=1e-3)


def test_convergence_rate():
    d = 3
    times = np.logspace(-4, 0, 5)
    exact = quantum_parts_probability(d)
    rms = []
    for t in times:
        errs = [run_experiment(d, 0.5, QUANTUM, DetectorConfig(1e6, 0.0, t, seed=s)).p_parts - exact
                for s in range(60)]
        rms.append(math.sqrt(np.mean(np.square(errs))))
    slope = np.polyfit(np.log10(times), np.log10(rms), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.1)


def test_dark_dominated_limit():
    rep = run_experiment(13, 0.5, QUANTUM, DetectorConfig(1e6, 1e9, 1.0, seed=1))
    assert rep.p_parts == pytest.approx(1 / 13, abs=2e-3)
    assert not rep.violated


def test_zero_counts_do_not_crash():
    counts = ExperimentCounts(3, np.zeros((3, 3, 2, 3), dtype=int), np.zeros((3, 3), dtype=int))
    rep = report_from_counts(counts, 0.5, QUANTUM)
    assert rep.p_parts == pytest.approx(1 / 3)
