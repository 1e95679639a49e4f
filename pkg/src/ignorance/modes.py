"""Laguerre-Gauss fields at the beam waist and their numerical overlaps.

Coordinates are in units of the waist ``w0``. A grid of ``grid_size``
cell-centred pixels spans ``[-extent, extent]`` on each axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .qudit import StateVector

DEFAULT_GRID = 512
DEFAULT_EXTENT = 6.0


@dataclass(frozen=True, order=True)
class LGIndex:
    l: int
    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 0:
            raise ValueError(f"radial index must be a nonnegative integer, got {self.p!r}")
        if int(self.l) != self.l:
            raise ValueError(f"azimuthal index must be an integer, got {self.l!r}")

    @property
    def order(self) -> int:
        return abs(self.l) + 2 * self.p


@dataclass(frozen=True)
class Grid:
    size: int = DEFAULT_GRID
    extent: float = DEFAULT_EXTENT

    def __post_init__(self):
        if self.size < 2 or self.extent <= 0:
            raise ValueError(f"invalid grid: size={self.size}, extent={self.extent}")

    @property
    def step(self) -> float:
        return 2.0 * self.extent / self.size

    @property
    def pixel_area(self) -> float:
        return self.step ** 2

    def axis(self) -> np.ndarray:
        return -self.extent + (np.arange(self.size) + 0.5) * self.step


@lru_cache(maxsize=8)
def _polar(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    x = grid.axis()
    xx, yy = np.meshgrid(x, x)
    r2 = xx ** 2 + yy ** 2
    phi = np.arctan2(yy, xx)
    r2.setflags(write=False)
    phi.setflags(write=False)
    return r2, phi


@dataclass(frozen=True, eq=False)
class ModeField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.flags.writeable:
            v.setflags(write=False)
        if v.shape != (self.grid.size, self.grid.size):
            raise ValueError(f"field shape {v.shape} does not match grid {self.grid.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite samples")
        object.__setattr__(self, "values", v)

    @property
    def grid_size(self) -> int:
        return self.grid.size

    @property
    def extent(self) -> float:
        return self.grid.extent

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.pixel_area)


def min_grid_size(idx: LGIndex) -> int:
    return 8 * (abs(idx.l) + 2 * idx.p + 1)


def lg_field(idx: LGIndex, grid: Grid = Grid()) -> ModeField:
    """Normalised LG_{l,p} field in the waist plane.

    u = C (sqrt2 r)^|l| L_p^|l|(2 r^2) exp(-r^2) exp(i l phi),
    C = sqrt(2 p! / (pi (p+|l|)!)).
    """
    check_resolution(idx, grid)
    return ModeField(grid, _lg_values(idx, grid))


def check_resolution(idx: LGIndex, grid: Grid) -> None:
    if grid.size < min_grid_size(idx):
        raise ValueError(
            f"grid of {grid.size} pixels too coarse for LG(l={idx.l}, p={idx.p}); "
            f"need at least {min_grid_size(idx)}"
        )


@lru_cache(maxsize=32)
def _lg_values(idx: LGIndex, grid: Grid) -> np.ndarray:
    r2, phi = _polar(grid)
    al = abs(idx.l)
    log_c = 0.5 * (np.log(2.0 / np.pi) + gammaln(idx.p + 1) - gammaln(idx.p + al + 1))
    radial = (2.0 * r2) ** (al / 2.0) * eval_genlaguerre(idx.p, al, 2.0 * r2) * np.exp(-r2)
    values = np.exp(log_c) * radial * np.exp(1j * idx.l * phi)
    values.setflags(write=False)
    return values


def default_basis(d: int) -> list[LGIndex]:
    """First ``d`` modes by order ``|l| + 2p``, ties broken by ascending ``l``."""
    if d < 1:
        raise ValueError(f"need at least one mode, got d={d}")
    modes: list[LGIndex] = []
    order = 0
    while len(modes) < d:
        # modes of fixed order N: l = -N, -N+2, ..., N with p = (N - |l|) / 2
        modes.extend(LGIndex(l, (order - abs(l)) // 2) for l in range(-order, order + 1, 2))
        order += 1
    return modes[:d]


def check_basis(basis: Sequence[LGIndex]) -> list[LGIndex]:
    basis = list(basis)
    if len(set(basis)) != len(basis):
        raise ValueError("mode basis contains repeated indices")
    return basis


def synthesize_state_field(state: StateVector, basis: Sequence[LGIndex] | None = None,
                           grid: Grid = Grid()) -> ModeField:
    """Weighted sum of rail modes with the state's amplitudes."""
    basis = check_basis(default_basis(state.dim) if basis is None else basis)
    if len(basis) != state.dim:
        raise ValueError(f"state dimension {state.dim} does not match {len(basis)} rail modes")
    for idx in basis:
        check_resolution(idx, grid)
    values = np.zeros((grid.size, grid.size), dtype=complex)
    for a, idx in zip(state.amplitudes, basis):
        if a != 0:
            values += a * _lg_values(idx, grid)
    return ModeField(grid, values)


def overlap_numeric(a: ModeField, b: ModeField) -> complex:
    """Riemann sum of ``conj(a) * b`` over the grid."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return complex(np.vdot(a.values, b.values) * a.grid.pixel_area)


def render_images(field: ModeField) -> tuple[np.ndarray, np.ndarray]:
    """Peak-normalised intensity and phase wrapped to ``[-pi, pi)``."""
    intensity = np.abs(field.values) ** 2
    peak = intensity.max()
    if peak > 0:
        intensity = intensity / peak
    phase = np.angle(field.values)
    phase = np.where(phase >= np.pi, phase - 2 * np.pi, phase)
    return intensity, phase


def phase_winding(field: ModeField, radius: float = 1.0, samples: int = 720) -> float:
    """Total unwrapped phase change around a centred circle, by nearest pixel."""
    g = field.grid
    t = np.linspace(0.0, 2 * np.pi, samples + 1)
    cols = np.clip(np.round((radius * np.cos(t) + g.extent) / g.step - 0.5).astype(int), 0, g.size - 1)
    rows = np.clip(np.round((radius * np.sin(t) + g.extent) / g.step - 0.5).astype(int), 0, g.size - 1)
    ph = np.unwrap(np.angle(field.values[rows, cols]))
    return float(ph[-1] - ph[0])


def write_pgm(path, image: np.ndarray, lo: float, hi: float) -> None:
    """8-bit binary graymap (P5) with ``[lo, hi]`` mapped to ``[0, 255]``."""
    scaled = np.clip((np.asarray(image, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    data = np.round(scaled * 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while not raw[end:end + 1].isspace():
            end += 1
        fields.append(raw[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(raw[pos + 1:pos + 1 + w * h], dtype=np.uint8).reshape(h, w)
