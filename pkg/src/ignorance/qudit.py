"""Finite-dimensional qudit algebra.

Operators are plain ``numpy`` complex arrays. States are wrapped in
:class:`StateVector` so that dimension checks happen in one place.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

ATOL = 1e-12


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


@dataclass(frozen=True)
class DitString:
    """The pair ``y = (y0, y1)`` in Z_d x Z_d."""

    dim: int
    y0: int
    y1: int

    def __post_init__(self):
        _check_dim(self.dim)
        if not (0 <= self.y0 < self.dim and 0 <= self.y1 < self.dim):
            raise ValueError(f"dits ({self.y0}, {self.y1}) out of range for d={self.dim}")

    @classmethod
    def all(cls, d: int) -> Iterator["DitString"]:
        """Every string of dimension ``d`` with y0 as the slow index."""
        for y0 in range(d):
            for y1 in range(d):
                yield cls(d, y0, y1)

    def part(self, c: int) -> int:
        return (self.y0, self.y1)[c]


@dataclass(frozen=True, eq=False)
class StateVector:
    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.dim:
            raise ValueError(f"expected {self.dim} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(amps.size, amps)

    @classmethod
    def basis(cls, d: int, k: int) -> "StateVector":
        amps = np.zeros(d, dtype=complex)
        amps[k] = 1.0
        return cls(d, amps)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        _match(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityOperator":
        return DensityOperator(self.dim, self.projector())

    def equal_up_to_phase(self, other: "StateVector", atol: float = 1e-10) -> bool:
        return abs(abs(self.inner(other)) - 1.0) <= atol


@dataclass(frozen=True, eq=False)
class DensityOperator:
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=ATOL):
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(rho) - 1) > ATOL:
            raise ValueError(f"density operator has trace {np.trace(rho).real:.15g}")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density operator has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def mixture(cls, weights, states) -> "DensityOperator":
        states = list(states)
        rho = sum(w * s.projector() for w, s in zip(weights, states))
        return cls(states[0].dim, rho)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityOperator":
        return cls(d, np.eye(d, dtype=complex) / d)


def _match(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


def pauli_x(d: int) -> np.ndarray:
    """Cyclic shift ``X|k> = |k+1 mod d>``."""
    d = _check_dim(d)
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def pauli_z(d: int) -> np.ndarray:
    """Clock matrix ``diag(1, w, ..., w^(d-1))`` with ``w = exp(2 pi i / d)``."""
    d = _check_dim(d)
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def qft(d: int) -> np.ndarray:
    """Unitary DFT with entries ``w^(jk) / sqrt(d)``.

    With this sign ``F|k>`` is the eigenvector of ``X`` with eigenvalue
    ``w^(-k)``, so ``Z = F X F^dag`` and ``Z^k F|0> = F|k>``.
    """
    d = _check_dim(d)
    j = np.arange(d)
    # reduce jk mod d before exponentiating to keep phases exact-ish for large jk
    return np.exp(2j * np.pi * (np.outer(j, j) % d) / d) / np.sqrt(d)


def encoding_norm(d: int) -> float:
    return np.sqrt(2.0 * (1.0 + 1.0 / np.sqrt(d)))


def encode_state(y: DitString) -> StateVector:
    """Equal superposition of ``|y0>`` and the Fourier state for ``y1``.

    ``X^y0 Z^y1 (I + F)|0> / sqrt(2 (1 + 1/sqrt d))``.
    """
    d = y.dim
    seed = np.zeros(d, dtype=complex)
    seed[0] = 1.0
    seed = seed + qft(d)[:, 0]
    seed = pauli_z(d).diagonal() ** y.y1 * seed
    return StateVector(d, np.roll(seed, y.y0) / encoding_norm(d))


def encoded_amplitudes(d: int) -> np.ndarray:
    """All encodings at once, shape ``(d, d, d)`` indexed ``[y0, y1, k]``."""
    d = _check_dim(d)
    y = np.arange(d)
    # X^y0 Z^y1 F|0> = X^y0 F|y1>: the Fourier column y1 cyclically shifted by y0
    shift = (y[None, :] - y[:, None]) % d
    amps = qft(d).T[:, shift].transpose(1, 0, 2)
    amps[y, :, y] += 1.0
    return amps / encoding_norm(d)


def measurement_basis(d: int, c: int) -> np.ndarray:
    """Columns are the outcome vectors revealing part ``c``.

    c=0 is the computational basis (reveals y0), c=1 the Fourier basis
    ``F|k>`` (reveals y1).
    """
    d = _check_dim(d)
    if c == 0:
        return np.eye(d, dtype=complex)
    if c == 1:
        return qft(d)
    raise ValueError(f"part index must be 0 or 1, got {c!r}")


def measurement_state(d: int, c: int, k: int) -> StateVector:
    return StateVector(d, measurement_basis(d, c)[:, k])


def born_probability(rho: DensityOperator, projector_state: StateVector) -> float:
    """``tr(rho |phi><phi|)``."""
    _match(rho.dim, projector_state.dim)
    phi = projector_state.amplitudes
    p = float(np.real(np.vdot(phi, rho.entries @ phi)))
    if p < -ATOL or p > 1 + ATOL:
        raise ValueError(f"Born probability {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def fidelity(rho: DensityOperator, target: StateVector) -> float:
    """Overlap ``<t|rho|t>`` of a mixed state with a pure target."""
    return born_probability(rho, target)


def outcome_probabilities(state: StateVector, c: int) -> np.ndarray:
    """Born distribution over the ``d`` outcomes of the basis revealing part ``c``."""
    return batch_outcome_probabilities(state.amplitudes, c)


def batch_outcome_probabilities(amplitudes: np.ndarray, c: int) -> np.ndarray:
    """Born distributions for states stacked along the last axis."""
    amplitudes = np.asarray(amplitudes)
    d = amplitudes.shape[-1]
    if c == 0:
        return np.abs(amplitudes) ** 2
    if c == 1:
        # <F k|psi> = sum_j w^(-jk) psi_j / sqrt(d), i.e. the forward FFT
        return np.abs(np.fft.fft(amplitudes, axis=-1)) ** 2 / d
    raise ValueError(f"part index must be 0 or 1, got {c!r}")


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0)
