"""Weak coherent source feeding a d-rail qudit, truncated at two photons.

A detection event comes from one of three branches:

* a single photon in the prepared mode (weight ``p``);
* two photons, both transmitted, registered as one click by a
  non-number-resolving detector (weight ``(1 - p) * eta``);
* two photons with one lost to the beam-splitter loss port, leaving a
  single photon in the prepared mode (weight ``(1 - p) * (1 - eta)``).

``p`` is the single-photon fraction among non-vacuum events,
``p1 / (p1 + p2) = 1 / (1 + |alpha|^2 / 2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .game import part_success_table
from .qudit import _check_dim


@dataclass(frozen=True)
class SourceParams:
    mean_photon_number: float = 0.01
    efficiency: float = 0.6

    def __post_init__(self):
        if not self.mean_photon_number >= 0:
            raise ValueError(f"mean photon number must be >= 0, got {self.mean_photon_number!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency!r}")


@dataclass(frozen=True)
class NoisyEnsembleResult:
    d: int
    p_single: float
    p_guess_ideal: float
    p_guess_noisy: float
    delta_percent: float
    fidelity: float


def photon_number_probability(alpha_sq: float, n: int) -> float:
    """Poisson weight of ``n`` photons at mean ``alpha_sq``."""
    if alpha_sq < 0:
        raise ValueError(f"mean photon number must be >= 0, got {alpha_sq!r}")
    if int(n) != n or n < 0:
        raise ValueError(f"photon count must be a nonnegative integer, got {n!r}")
    n = int(n)
    if alpha_sq == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(alpha_sq) - alpha_sq - math.lgamma(n + 1))


def single_photon_weight(alpha_sq: float) -> float:
    if alpha_sq < 0:
        raise ValueError(f"mean photon number must be >= 0, got {alpha_sq!r}")
    return 1.0 / (1.0 + alpha_sq / 2.0)


def noisy_click_probability(T, alpha_sq: float, eta: float):
    """Click probability for a mode projection with ideal overlap ``T``.

    Accepts scalars or arrays for ``T``.
    """
    src = SourceParams(alpha_sq, eta)
    t = np.asarray(T, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(np.isnan(t)):
        raise ValueError("overlap probability must lie in [0, 1]")
    p = single_photon_weight(src.mean_photon_number)
    two_detected = 1.0 - (1.0 - t) ** 2
    out = p * t + (1.0 - p) * (eta * two_detected + (1.0 - eta) * t)
    return float(out) if out.ndim == 0 else out


def effective_fidelity(alpha_sq: float, eta: float) -> float:
    """Overlap of the heralded single-photon-sector state with the target.

    The loss-mode trace leaves the surviving photon of the one-lost branch
    in the target mode; the two-photon branch has no single-photon
    component, so it contributes nothing.
    """
    p = single_photon_weight(alpha_sq)
    return p + (1.0 - p) * (1.0 - eta)


def noisy_game_point(d: int, alpha_sq: float, eta: float) -> NoisyEnsembleResult:
    d = _check_dim(d)
    table = part_success_table(d)
    ideal = float(table.mean())
    # prepare-equal-measure normalisation: the click rate at unit overlap
    norm = noisy_click_probability(1.0, alpha_sq, eta)
    noisy = float(np.mean(noisy_click_probability(table, alpha_sq, eta) / norm))
    return NoisyEnsembleResult(
        d=d,
        p_single=single_photon_weight(alpha_sq),
        p_guess_ideal=ideal,
        p_guess_noisy=noisy,
        delta_percent=100.0 * abs(ideal - noisy),
        fidelity=effective_fidelity(alpha_sq, eta),
    )


def noisy_game_curve(d_range: Iterable[int], alpha_sq: float = 0.01, eta: float = 0.6) -> list[NoisyEnsembleResult]:
    return [noisy_game_point(d, alpha_sq, eta) for d in d_range]

