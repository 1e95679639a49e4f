"""Monte Carlo model of the photon-counting measurements.

Each measurement setting (encoding y, basis c, outcome k) is simulated as
Poisson counts ``O ~ Poisson(eff_y * R * t * T + D * t)``; each encoding
also gets a prepare-equal-measure normalisation ``N_y`` with ``T = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .game import ClassicalStrategy, GameReport, QUANTUM, Strategy, build_report, strategy_name
from .qudit import DitString, _check_dim, batch_outcome_probabilities, encoded_amplitudes


@dataclass(frozen=True)
class DetectorConfig:
    signal_rate: float = 1e6
    dark_rate: float = 150.0
    integration_time: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.signal_rate >= 0 or not self.dark_rate >= 0:
            raise ValueError("count rates must be nonnegative")
        if not self.integration_time > 0:
            raise ValueError(f"integration time must be positive, got {self.integration_time!r}")


@dataclass(frozen=True)
class CountRecord:
    O_y: int
    N_y: int
    estimate: float
    stderr: float


def ratio_stderr(o, n):
    """First-order standard error of ``O/N`` for independent Poisson counts."""
    o = np.asarray(o, dtype=float)
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = o / n
        se = r * np.sqrt(1.0 / o + 1.0 / n)
    # O = 0: fall back to the Poisson upper scale 1/N
    se = np.where(o > 0, se, np.where(n > 0, 1.0 / n, np.inf))
    return se


def _check_prob(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    return float(p)


def simulate_counts(true_prob: float, cfg: DetectorConfig, rng: Optional[np.random.Generator] = None,
                    efficiency: float = 1.0) -> CountRecord:
    true_prob = _check_prob(true_prob)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    signal = efficiency * cfg.signal_rate * cfg.integration_time
    dark = cfg.dark_rate * cfg.integration_time
    o = int(rng.poisson(signal * true_prob + dark))
    n = int(rng.poisson(signal + dark))
    estimate = o / n if n > 0 else 0.0
    return CountRecord(o, n, estimate, float(ratio_stderr(o, n)) if n > 0 else math.inf)


def true_outcome_table(d: int, strategy: Strategy) -> np.ndarray:
    """Ideal click probability for every setting, shape ``(d, d, 2, d)``.

    Index order is ``[y0, y1, basis c, outcome k]``. For the one-dit
    classical notes the stored part is answered with certainty and the
    other part is a uniform guess.
    """
    d = _check_dim(d)
    table = np.empty((d, d, 2, d))
    if isinstance(strategy, ClassicalStrategy):
        s = strategy.stored_part
        for y in DitString.all(d):
            for c in (0, 1):
                if c == s:
                    table[y.y0, y.y1, c] = 0.0
                    table[y.y0, y.y1, c, y.part(c)] = 1.0
                else:
                    table[y.y0, y.y1, c] = 1.0 / d
        return table
    strategy_name(strategy)
    amps = encoded_amplitudes(d)
    for c in (0, 1):
        table[:, :, c] = batch_outcome_probabilities(amps, c)
    return table


@dataclass(frozen=True)
class ExperimentCounts:
    d: int
    observed: np.ndarray  # (d, d, 2, d) outcome counts O
    normalisation: np.ndarray  # (d, d) prepare-equal-measure counts N_y

    def ratios(self) -> np.ndarray:
        """Per-setting ratios ``O/N_y``."""
        n = self.normalisation[:, :, None, None].astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(n > 0, self.observed / n, 0.0)

    def success_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Counts on the correct outcome and per-basis totals, shape ``(d, d, 2)``."""
        d = self.d
        y0, y1 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        correct = np.stack(
            [self.observed[y0, y1, 0, y0], self.observed[y0, y1, 1, y1]], axis=-1
        ).astype(float)
        totals = self.observed.sum(axis=-1).astype(float)
        return correct, totals


def simulate_experiment(d: int, strategy: Strategy, cfg: DetectorConfig,
                        efficiency: Optional[Sequence[float]] = None) -> ExperimentCounts:
    """Draw counts for all ``2 d^3`` settings plus ``d^2`` normalisation runs.

    ``efficiency`` is an optional per-encoding factor (length ``d*d``,
    y0-major) multiplying the signal of both O and N for that encoding.
    """
    d = _check_dim(d)
    eff = np.ones((d, d)) if efficiency is None else np.asarray(efficiency, dtype=float).reshape(d, d)
    if np.any(eff < 0):
        raise ValueError("efficiencies must be nonnegative")
    rng = np.random.default_rng(cfg.seed)
    signal = cfg.signal_rate * cfg.integration_time * eff
    dark = cfg.dark_rate * cfg.integration_time
    truth = true_outcome_table(d, strategy)
    observed = rng.poisson(signal[:, :, None, None] * truth + dark)
    normalisation = rng.poisson(signal + dark)
    return ExperimentCounts(d, observed, normalisation)


def part_estimates(counts: ExperimentCounts) -> tuple[np.ndarray, np.ndarray]:
    """Per-encoding success estimate and its variance, shape ``(d, d, 2)``.

    The ``O/N_y`` ratios of one basis are renormalised over its ``d``
    outcomes so they form a distribution; ``N_y`` cancels, leaving
    ``O_correct / sum_k O_k``.
    """
    correct, totals = counts.success_counts()
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, correct / totals, 1.0 / counts.d)
        var = np.where(totals > 0, p * (1.0 - p) / totals, 0.25)
    return p, var


def run_experiment(d: int, q=0.5, strategy: Strategy = QUANTUM, cfg: Optional[DetectorConfig] = None,
                   m: int = 0, efficiency: Optional[Sequence[float]] = None) -> GameReport:
    cfg = cfg or DetectorConfig()
    counts = simulate_experiment(d, strategy, cfg, efficiency)
    return report_from_counts(counts, q, strategy, m)


def report_from_counts(counts: ExperimentCounts, q, strategy: Strategy, m: int = 0) -> GameReport:
    d = counts.d
    p, var = part_estimates(counts)
    n_enc = d * d
    p0, p1 = float(p[..., 0].mean()), float(p[..., 1].mean())
    se0 = math.sqrt(var[..., 0].sum()) / n_enc
    se1 = math.sqrt(var[..., 1].sum()) / n_enc
    qq = float(getattr(q, "q", q))
    se_parts = math.hypot(qq * se0, (1.0 - qq) * se1)
    se_whole = (se0 if p0 >= p1 else se1) / d
    return build_report(d, q, m, strategy, p0, p1, stderr_parts=se_parts, stderr_whole=se_whole)
