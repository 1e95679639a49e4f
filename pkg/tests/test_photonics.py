import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ignorance.game import quantum_parts_probability
from ignorance.photonics import (
    SourceParams,
    noisy_click_probability,
    noisy_game_curve,
    noisy_game_point,
    photon_number_probability,
    single_photon_weight,
)

T_GRID = np.round(np.arange(0, 1.0001, 0.05), 10)


def test_poisson_weights():
    assert photon_number_probability(0.01, 1) == pytest.approx(0.0099, rel=0.02)
    assert photon_number_probability(0.01, 2) == pytest.approx(5e-5, rel=0.02)
    assert photon_number_probability(0.0, 0) == 1.0
    assert photon_number_probability(0.0, 3) == 0.0
    # against the textbook expression
    for n in range(6):
        assert photon_number_probability(0.3, n) == pytest.approx(0.3 ** n / math.factorial(n) * math.exp(-0.3))


@pytest.mark.parametrize("args", [(-0.1, 1), (0.1, -1), (0.1, 1.5)])
def test_poisson_rejects(args):
    with pytest.raises(ValueError):
        photon_number_probability(*args)


def test_single_photon_weight_values():
    assert single_photon_weight(0.01) == pytest.approx(1 / 1.005, abs=1e-15)
    assert single_photon_weight(0.01) == pytest.approx(0.99502, abs=5e-6)
    assert single_photon_weight(0.0) == 1.0
    assert single_photon_weight(2.0) == pytest.approx(0.5)


@given(st.floats(1e-6, 5.0))
def test_single_photon_weight_partition(a2):
    p1 = photon_number_probability(a2, 1)
    p2 = photon_number_probability(a2, 2)
    assert abs(single_photon_weight(a2) - p1 / (p1 + p2)) < 1e-12


@given(st.floats(0, 2), st.floats(0, 1))
def test_click_endpoints(a2, eta):
    assert noisy_click_probability(0.0, a2, eta) == 0.0
    assert noisy_click_probability(1.0, a2, eta) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(0, 1))
def test_click_without_contamination_is_exact(t):
    assert noisy_click_probability(t, 0.0, 0.6) == t


@pytest.mark.parametrize("a2", [0.0, 0.01, 0.5, 2.0])
@pytest.mark.parametrize("eta", [0.0, 0.3, 0.6, 1.0])
def test_click_monotone_in_overlap(a2, eta):
    c = noisy_click_probability(T_GRID, a2, eta)
    assert np.all(np.diff(c) >= 0)
    assert np.all((c >= 0) & (c <= 1))


def test_click_rejects_bad_overlap():
    with pytest.raises(ValueError):
        noisy_click_probability(1.2, 0.01, 0.6)
    with pytest.raises(ValueError):
        SourceParams(0.01, 1.5)


def test_curve_without_contamination():
    for r in noisy_game_curve(range(2, 15), 0.0, 0.6):
        assert r.delta_percent == 0.0
        assert r.fidelity == 1.0


@pytest.mark.parametrize("d", range(2, 15))
def test_ideal_limit(d):
    r = noisy_game_point(d, 1e-12, 1.0)
    assert abs(r.p_guess_noisy - quantum_parts_probability(d)) < 1e-9


def test_curve_against_closed_form():
    # oracle: c(T) - T = (1 - p) eta T (1 - T) with T the Born success (1 + 1/sqrt d)/2
    a2, eta = 0.01, 0.6
    p = 1 / (1 + a2 / 2)
    for r in noisy_game_curve(range(2, 15), a2, eta):
        t = (1 + 1 / math.sqrt(r.d)) / 2
        assert r.delta_percent == pytest.approx(100 * (1 - p) * eta * t * (1 - t), rel=1e-9)
        assert r.p_guess_ideal == pytest.approx(t, abs=1e-12)
        assert r.delta_percent == pytest.approx(100 * abs(r.p_guess_ideal - r.p_guess_noisy), rel=1e-12)


def test_curve_magnitude_and_growth():
    curve = noisy_game_curve(range(2, 15), 0.01, 0.6)
    deltas = [r.delta_percent for r in curve]
    assert max(deltas) < 0.5
    assert deltas[3 - 2] < deltas[11 - 2]
    assert all(b > a for a, b in zip(deltas[:10], deltas[1:10]))
    # increments shrink: the curve tapers
    steps = np.diff(deltas)
    assert np.all(np.diff(steps) < 0)


def test_fidelity_in_unit_interval():
    for r in noisy_game_curve(range(2, 15), 0.01, 0.6):
        assert 0.99 < r.fidelity <= 1.0
        assert r.fidelity == pytest.approx(1 - (1 - 1 / 1.005) * 0.6)
