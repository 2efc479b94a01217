"""Objective and reporting quantities: distortion, movement energy, coverage.

Distortion is the density-weighted sum of squared sensor-to-point distances
inside each cell, scaled by the per-sensor sensing cost eta_n. Energy is the
straight-line displacement from the initial position times the moving cost
xi_n (not path length: each step re-plans total displacement). Coverage is
the plain area fraction within effective sensing range of some sensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import Grid, DensityField
from .partition import Fleet, Partition


def local_distortions(fleet: Fleet, part: Partition, density: DensityField, grid: Grid,
                      fvals: np.ndarray | None = None, threads: int = 1) -> np.ndarray:
    """Per-sensor distortion: eta_n * sum over owned cells of ||p_n - w||^2 f dA."""
    if fvals is None:
        fvals = density.grid_values(grid)
    raw = _kernels.owned_sqdist(
        part.owner, grid.cx, grid.cy, fvals,
        fleet.current[:, 0], fleet.current[:, 1], threads=threads,
    )
    return fleet.eta * raw * grid.cell_area


def distortion(fleet: Fleet, part: Partition, density: DensityField, grid: Grid,
               fvals: np.ndarray | None = None, threads: int = 1) -> float:
    return float(np.add.reduce(local_distortions(fleet, part, density, grid, fvals, threads)))


def centroid_distortions(fleet: Fleet, part: Partition, density: DensityField, grid: Grid,
                         fvals: np.ndarray | None = None, threads: int = 1) -> np.ndarray:
    """Per-sensor best-possible distortion with this partition (sensor at its centroid).

    Empty sensors contribute zero. Together with the offset term
    eta_n ||p_n - c_n||^2 v_n this reconstructs the distortion exactly
    (parallel-axis identity), which the test suite checks.
    """
    if fvals is None:
        fvals = density.grid_values(grid)
    qx = np.where(part.empty, 0.0, part.centroid[:, 0])
    qy = np.where(part.empty, 0.0, part.centroid[:, 1])
    raw = _kernels.owned_sqdist(part.owner, grid.cx, grid.cy, fvals, qx, qy, threads=threads)
    return fleet.eta * raw * grid.cell_area


def energy(fleet: Fleet) -> tuple[np.ndarray, float]:
    """Per-sensor and total movement energy: E_n = xi_n ||p_n - p~_n||."""
    disp = fleet.current - fleet.initial
    per = fleet.xi * np.hypot(disp[:, 0], disp[:, 1])
    return per, float(np.add.reduce(per))


def area_coverage(fleet: Fleet, grid: Grid, threads: int = 1) -> float:
    """Fraction of the region within effective sensing radius of some sensor.

    Unweighted Lebesgue fraction: the count of covered cell centers over the
    total cell count (the density plays no role here).
    """
    radii = fleet.effective_radii
    count = _kernels.covered_count(
        grid.cx, grid.cy, fleet.current[:, 0], fleet.current[:, 1], radii * radii,
        threads=threads,
    )
    return count / grid.ncells


def lifetime_budget(residual: np.ndarray, alpha: float, lifetime: float) -> np.ndarray:
    """Per-sensor relocation budgets that keep every sensor alive for `lifetime`.

    gamma_n = max(0, e_n - alpha * T): whatever energy remains after reserving
    the standing power draw alpha over the horizon T. Clamped at zero because
    a sensor that cannot afford the reserve simply must not move.
    """
    if alpha < 0 or lifetime < 0:
        raise ValueError("alpha and lifetime must be nonnegative")
    residual = np.asarray(residual, dtype=np.float64)
    return np.maximum(0.0, residual - alpha * lifetime)


@dataclass
class MetricsReport:
    distortion: float
    local: np.ndarray
    energy_per_sensor: np.ndarray
    energy_total: float
    coverage: float


def report(fleet: Fleet, part: Partition, density: DensityField, grid: Grid,
           fvals: np.ndarray | None = None, threads: int = 1) -> MetricsReport:
    local = local_distortions(fleet, part, density, grid, fvals, threads)
    per, total = energy(fleet)
    return MetricsReport(
        distortion=float(np.add.reduce(local)),
        local=local,
        energy_per_sensor=per,
        energy_total=total,
        coverage=area_coverage(fleet, grid, threads),
    )
