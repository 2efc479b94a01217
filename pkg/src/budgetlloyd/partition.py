"""Multiplicatively weighted Voronoi partition of the grid and its moments.

Cell w belongs to the sensor minimizing eta_n * ||w - p_n||^2. Per-sensor
moments (density mass, centroid, centroid offset from the initial position,
and the movement-cost factor varsigma = xi^2 / (eta * mass)) feed every
relocation step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .geometry import Grid, DensityField


class SensorParams(NamedTuple):
    """Per-sensor cost parameters: sensing cost eta, moving cost xi."""

    eta: float
    xi: float


@dataclass
class Fleet:
    """Sensor fleet state: cost parameters plus initial and current positions.

    rs is the shared base sensing radius; sensor n covers a disk of radius
    rs / sqrt(eta_n).
    """

    eta: np.ndarray
    xi: np.ndarray
    rs: float
    initial: np.ndarray  # (N, 2) anchor positions, energy is measured from here
    current: np.ndarray  # (N, 2)

    def __post_init__(self) -> None:
        self.eta = np.ascontiguousarray(self.eta, dtype=np.float64)
        self.xi = np.ascontiguousarray(self.xi, dtype=np.float64)
        self.initial = np.ascontiguousarray(self.initial, dtype=np.float64).reshape(-1, 2)
        self.current = np.ascontiguousarray(self.current, dtype=np.float64).reshape(-1, 2)
        n = self.eta.shape[0]
        if n < 1:
            raise ValueError("fleet needs at least one sensor")
        if not (self.xi.shape[0] == n and self.initial.shape[0] == n and self.current.shape[0] == n):
            raise ValueError("eta, xi, initial, current must all have length N")
        if np.any(self.eta <= 0) or np.any(self.xi <= 0) or self.rs <= 0:
            raise ValueError("eta, xi and rs must be positive")
        if not (np.all(np.isfinite(self.initial)) and np.all(np.isfinite(self.current))):
            raise ValueError("positions must be finite")

    @property
    def nsensors(self) -> int:
        return self.eta.shape[0]

    @property
    def effective_radii(self) -> np.ndarray:
        return self.rs / np.sqrt(self.eta)

    @property
    def params(self) -> list[SensorParams]:
        return [SensorParams(float(e), float(x)) for e, x in zip(self.eta, self.xi)]

    def with_positions(self, current: np.ndarray) -> "Fleet":
        return Fleet(self.eta, self.xi, self.rs, self.initial, current)

    def copy(self) -> "Fleet":
        return Fleet(self.eta, self.xi, self.rs, self.initial.copy(), self.current.copy())


def make_fleet(eta: Sequence[float], xi: Sequence[float], rs: float,
               initial: np.ndarray) -> Fleet:
    """Fleet whose current positions start at the initial deployment."""
    initial = np.asarray(initial, dtype=np.float64).reshape(-1, 2)
    return Fleet(np.asarray(eta), np.asarray(xi), rs, initial, initial.copy())


@dataclass
class Partition:
    """Ownership map plus per-sensor moments for one deployment.

    volume is the density mass of the owned cells (sum f * cell_area);
    centroid rows are NaN and varsigma is +inf for sensors owning no cells
    (flagged in `empty`); gamma_vec is centroid - initial, zero when empty.
    """

    owner: np.ndarray
    volume: np.ndarray
    centroid: np.ndarray
    gamma_vec: np.ndarray
    varsigma: np.ndarray
    empty: np.ndarray

    @property
    def nsensors(self) -> int:
        return self.volume.shape[0]


def assign_mwvd(fleet: Fleet, grid: Grid, threads: int = 1) -> np.ndarray:
    """Owner index per grid cell under the weighted metric eta_n ||w - p_n||^2."""
    return _kernels.assign_owners(
        grid.cx, grid.cy, fleet.current[:, 0], fleet.current[:, 1], fleet.eta, threads=threads
    )


def cell_moments(owner: np.ndarray, grid: Grid, density: DensityField, fleet: Fleet,
                 fvals: np.ndarray | None = None, threads: int = 1) -> Partition:
    """Per-sensor moments for a precomputed owner map."""
    if fvals is None:
        fvals = density.grid_values(grid)
    v_raw, sx_raw, sy_raw = _kernels.accumulate_moments(
        owner, grid.cx, grid.cy, fvals, fleet.nsensors, threads=threads
    )
    return _moments_to_partition(owner, v_raw, sx_raw, sy_raw, grid, fleet)


def compute_partition(fleet: Fleet, grid: Grid, density: DensityField,
                      fvals: np.ndarray | None = None, threads: int = 1) -> Partition:
    """Fused assignment + moment accumulation (one pass over the grid)."""
    if fvals is None:
        fvals = density.grid_values(grid)
    owner, v_raw, sx_raw, sy_raw = _kernels.partition_pass(
        grid.cx, grid.cy, fvals, fleet.current[:, 0], fleet.current[:, 1], fleet.eta,
        threads=threads,
    )
    return _moments_to_partition(owner, v_raw, sx_raw, sy_raw, grid, fleet)


def _moments_to_partition(owner, v_raw, sx_raw, sy_raw, grid: Grid, fleet: Fleet) -> Partition:
    empty = v_raw == 0.0
    volume = v_raw * grid.cell_area
    centroid = np.full((fleet.nsensors, 2), np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        centroid[:, 0] = np.where(empty, np.nan, sx_raw / v_raw)
        centroid[:, 1] = np.where(empty, np.nan, sy_raw / v_raw)
        gamma_vec = np.where(empty[:, None], 0.0, centroid - fleet.initial)
        varsigma = np.where(empty, np.inf, fleet.xi * fleet.xi / (fleet.eta * volume))
    return Partition(
        owner=owner,
        volume=volume,
        centroid=centroid,
        gamma_vec=gamma_vec,
        varsigma=varsigma,
        empty=empty,
    )
