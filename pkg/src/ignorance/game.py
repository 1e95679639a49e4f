"""Guessing probabilities and both sides of the min-entropy splitting bound.

Side conventions used throughout:

* ``h_parts`` is the ignorance of the part the teacher asks about,
  ``-log2`` of the pointer-weighted part guessing probability.
* ``rhs_bits`` is ``log2(d)/2 - 1 - m`` -- the whole-string ignorance is
  always the theoretical ``log2 d`` on this side, so the bound on the
  parts probability is ``2**(1+m)/sqrt(d)``.
* The inequality is violated when no pointer bias can push ``h_parts``
  up to ``rhs_bits``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .qudit import _check_dim, encoded_amplitudes, qft


class ClassicalStrategy(enum.Enum):
    """Which dit the friend writes into the one-dit notes."""

    STORE_Y0 = 0
    STORE_Y1 = 1

    @property
    def stored_part(self) -> int:
        return self.value


QUANTUM = "quantum"
Strategy = Union[str, ClassicalStrategy]


@dataclass(frozen=True)
class PointerDistribution:
    """Teacher's biased coin; ``q`` is the probability of asking for y0."""

    q: float

    def __post_init__(self):
        if not (0.0 <= self.q <= 1.0) or math.isnan(self.q):
            raise ValueError(f"pointer bias must lie in [0, 1], got {self.q!r}")

    def weights(self) -> tuple[float, float]:
        return self.q, 1.0 - self.q


def _as_pointer(q) -> PointerDistribution:
    return q if isinstance(q, PointerDistribution) else PointerDistribution(float(q))


def _check_leakage(m: int) -> int:
    if int(m) != m or m < 0:
        raise ValueError(f"leakage m must be a nonnegative integer, got {m!r}")
    return int(m)


@dataclass(frozen=True)
class GameReport:
    d: int
    q: float
    m: int
    strategy: str
    p_parts: float
    p_whole: float
    h_parts: float
    h_whole: float
    rhs_bits: float
    violated: bool
    # most favourable pointer for the inequality; equals h_parts for the quantum encoding
    h_parts_adversarial: float
    stderr_parts: Optional[float] = None
    stderr_whole: Optional[float] = None

    @property
    def stderr_h_parts(self) -> Optional[float]:
        if self.stderr_parts is None:
            return None
        return self.stderr_parts / (self.p_parts * math.log(2))

    @property
    def margin_sigma(self) -> Optional[float]:
        """Distance ``rhs_bits - h_parts`` in units of the entropy standard error."""
        se = self.stderr_h_parts
        if se is None or se == 0:
            return None
        return (self.rhs_bits - self.h_parts) / se


def min_entropy(p: float) -> float:
    """``-log2 p`` in bits."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"guessing probability must lie in (0, 1], got {p!r}")
    return 0.0 - math.log2(p)


def quantum_parts_probability(d: int) -> float:
    d = _check_dim(d)
    return (1.0 + 1.0 / math.sqrt(d)) / 2.0


def part_success_table(d: int) -> np.ndarray:
    """Born success for each encoding and part, shape ``(d, d, 2)``.

    Entry ``[y0, y1, c]`` is the probability that measuring the basis for
    part ``c`` on the encoding of ``(y0, y1)`` returns the right dit.
    """
    d = _check_dim(d)
    amps = encoded_amplitudes(d)
    y = np.arange(d)
    table = np.empty((d, d, 2))
    table[..., 0] = np.abs(amps[y, :, y]) ** 2
    # <F y1|psi_y> for every encoding, using only the Fourier vector for its own y1
    table[..., 1] = np.abs(np.einsum("abk,kb->ab", amps, qft(d).conj())) ** 2
    return table


def quantum_part_successes(d: int) -> tuple[float, float]:
    """Ensemble-averaged Born success for part 0 and part 1."""
    table = part_success_table(d)
    return float(table[..., 0].mean()), float(table[..., 1].mean())


def quantum_parts_probability_biased(d: int, q) -> float:
    w0, w1 = _as_pointer(q).weights()
    p0, p1 = quantum_part_successes(d)
    return w0 * p0 + w1 * p1


def classical_part_successes(d: int, s: ClassicalStrategy) -> tuple[float, float]:
    d = _check_dim(d)
    known, guessed = 1.0, 1.0 / d
    return (known, guessed) if s is ClassicalStrategy.STORE_Y0 else (guessed, known)


def classical_parts_probability(d: int, s: ClassicalStrategy, q) -> float:
    w0, w1 = _as_pointer(q).weights()
    p0, p1 = classical_part_successes(d, s)
    return w0 * p0 + w1 * p1


def classical_envelope(d: int, q) -> float:
    """Better of the two pure one-dit strategies at bias ``q``."""
    return max(classical_parts_probability(d, s, q) for s in ClassicalStrategy)


def whole_probability_from_parts(d: int, p0: float, p1: float) -> float:
    """Measure one basis, read off its part, guess the other part uniformly."""
    return max(p0, p1) / d


def whole_probability_basis_estimator(d: int) -> float:
    p0, p1 = quantum_part_successes(d)
    return whole_probability_from_parts(d, p0, p1)


def whole_entropy_theoretical(d: int) -> float:
    return math.log2(_check_dim(d))


def vw_rhs_bits(d: int, m: int = 0) -> float:
    return whole_entropy_theoretical(d) / 2.0 - 1.0 - _check_leakage(m)


def vw_rhs_probability(d: int, m: int = 0) -> float:
    """Largest parts guessing probability compatible with the bound, clamped to 1."""
    d = _check_dim(d)
    m = _check_leakage(m)
    return min(1.0, 2.0 ** (1 + m) / math.sqrt(d))


def violation_threshold(m: int = 0) -> int:
    """Dimension above which the quantum encoding beats the leaky bound."""
    m = _check_leakage(m)
    return (2 ** (m + 2) - 1) ** 2


def strategy_name(strategy: Strategy) -> str:
    if isinstance(strategy, ClassicalStrategy):
        return strategy.name.lower()
    if strategy != QUANTUM:
        raise ValueError(f"unknown strategy {strategy!r}")
    return QUANTUM


def part_successes(d: int, strategy: Strategy) -> tuple[float, float]:
    if isinstance(strategy, ClassicalStrategy):
        return classical_part_successes(d, strategy)
    strategy_name(strategy)
    return quantum_part_successes(d)


def build_report(
    d: int,
    q,
    m: int,
    strategy: Strategy,
    p0: float,
    p1: float,
    stderr_parts: Optional[float] = None,
    stderr_whole: Optional[float] = None,
) -> GameReport:
    """Assemble a report from per-part success probabilities.

    The teacher's adversarial pointer is the bias in {0, 1} minimising the
    student's success, i.e. ``min(p0, p1)`` since the mixture is linear in q.
    """
    pointer = _as_pointer(q)
    m = _check_leakage(m)
    w0, w1 = pointer.weights()
    p0 = min(max(p0, 0.0), 1.0)
    p1 = min(max(p1, 0.0), 1.0)
    p_parts = w0 * p0 + w1 * p1
    p_whole = whole_probability_from_parts(d, p0, p1)
    rhs = vw_rhs_bits(d, m)
    h_adv = _safe_entropy(min(p0, p1))
    return GameReport(
        d=d,
        q=pointer.q,
        m=m,
        strategy=strategy_name(strategy),
        p_parts=p_parts,
        p_whole=p_whole,
        h_parts=_safe_entropy(p_parts),
        h_whole=_safe_entropy(p_whole),
        rhs_bits=rhs,
        violated=h_adv < rhs,
        h_parts_adversarial=h_adv,
        stderr_parts=stderr_parts,
        stderr_whole=stderr_whole,
    )


def _safe_entropy(p: float) -> float:
    # a fully dark-count-free zero estimate means infinite ignorance
    return math.inf if p <= 0 else min_entropy(p)


def evaluate_game(d: int, q=0.5, m: int = 0, strategy: Strategy = QUANTUM) -> GameReport:
    d = _check_dim(d)
    p0, p1 = part_successes(d, strategy)
    return build_report(d, q, m, strategy, p0, p1)
