"""Relocation steppers and the iteration runner.

Four single-iteration steppers share one skeleton: recompute the weighted
Voronoi partition, then move sensors toward their cell centroids subject to
the energy model.

* lloyd: full centroid moves, no budget.
* lloyd_alpha: moves scaled by alpha in [0, 1] relative to the current
  position (comparison baseline; consumes energy implicitly).
* eml: one shared total budget gamma. When the budget binds, a pruning loop
  splits the fleet into dynamic and static sensors and water-fills the
  movement energy so all dynamic sensors end at a common moving efficiency.
* cml: per-sensor budgets gamma_n; each sensor moves toward its centroid but
  is clamped to the disk of radius gamma_n / xi_n around its start.

Movements are planned from the initial positions every iteration (new
position = initial + movement), so the energy model always measures final
displacement. Full-centroid moves are always computed as initial + gamma_vec,
which keeps the degenerate equivalences (eml with no budget == lloyd, cml
with loose budgets == lloyd) exact to the bit.

Sensors owning no grid cells hold their current position and sit out the
iteration; the formulas divide by cell mass and say nothing about this case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .geometry import Grid, DensityField
from .metrics import area_coverage, energy, local_distortions
from .partition import Fleet, Partition, compute_partition


@dataclass(frozen=True)
class Unlimited:
    """No energy constraint."""


@dataclass(frozen=True)
class TotalBudget:
    """Shared cap on the summed movement energy of the whole fleet."""

    gamma: float

    def __post_init__(self) -> None:
        if not (self.gamma >= 0.0):
            raise ValueError("total budget must be nonnegative")


class PerSensorBudget:
    """Individual movement-energy caps, one per sensor."""

    def __init__(self, gammas):
        self.gammas = np.ascontiguousarray(gammas, dtype=np.float64).reshape(-1)
        if np.any(self.gammas < 0.0):
            raise ValueError("per-sensor budgets must be nonnegative")

    def __repr__(self) -> str:
        return f"PerSensorBudget({self.gammas!r})"


EnergyBudget = Union[Unlimited, TotalBudget, PerSensorBudget]

UNLIMITED = Unlimited()


@dataclass
class StepOutcome:
    """Result of one relocation step.

    movements are displacements from the initial positions. dynamic/static
    are disjoint index sets covering all sensors; a sensor is dynamic when the
    step plans a positive displacement for it. rho_bar is the water-filling
    efficiency threshold (eml only) and budget_bound records whether the
    total budget actually constrained the step.
    """

    movements: np.ndarray
    new_positions: np.ndarray
    dynamic: np.ndarray
    static: np.ndarray
    rho_bar: Optional[float] = None
    budget_bound: bool = False


def _vec_norms(v: np.ndarray) -> np.ndarray:
    return np.hypot(v[:, 0], v[:, 1])


def _outcome(movements: np.ndarray, new: np.ndarray, dynamic_mask: np.ndarray,
             rho_bar=None, budget_bound=False) -> StepOutcome:
    return StepOutcome(
        movements=movements,
        new_positions=new,
        dynamic=np.flatnonzero(dynamic_mask),
        static=np.flatnonzero(~dynamic_mask),
        rho_bar=rho_bar,
        budget_bound=budget_bound,
    )


def _centroid_moves(fleet: Fleet, part: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Full moves to the centroid, with empty sensors holding position."""
    hold = part.empty[:, None]
    new = np.where(hold, fleet.current, fleet.initial + part.gamma_vec)
    movements = np.where(hold, fleet.current - fleet.initial, part.gamma_vec)
    return movements, new


def lloyd_step(fleet: Fleet, part: Partition) -> StepOutcome:
    """Unconstrained step: every sensor with owned cells moves to its centroid."""
    movements, new = _centroid_moves(fleet, part)
    dynamic = ~part.empty & (_vec_norms(part.gamma_vec) > 0.0)
    return _outcome(movements, new, dynamic)


def lloyd_alpha_step(fleet: Fleet, part: Partition, alpha: float) -> StepOutcome:
    """Baseline: p <- p + alpha*(c - p), the centroid move scaled by alpha.

    alpha == 1 takes the canonical full-centroid path so it matches lloyd_step
    exactly; alpha is otherwise applied relative to the current position.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if alpha == 1.0:
        movements, new = _centroid_moves(fleet, part)
    else:
        hold = part.empty[:, None]
        stepped = fleet.current + alpha * (part.centroid - fleet.current)
        new = np.where(hold, fleet.current, stepped)
        movements = new - fleet.initial
    dynamic = ~part.empty & (_vec_norms(new - fleet.initial) > 0.0)
    return _outcome(movements, new, dynamic)


def waterfill_pruning(chi: np.ndarray, varsigma: np.ndarray, candidates: np.ndarray,
                      gamma: float) -> tuple[np.ndarray, float, np.ndarray]:
    """Allocate movement energy z under sum(z) <= gamma by iterative pruning.

    Starting from all candidates, compute the tentative threshold
    rho = (sum chi - gamma) / sum varsigma over the dynamic set, drop every
    sensor whose tentative allocation z_n = chi_n - varsigma_n * rho is <= 0,
    and repeat until all survivors get positive energy (at most N passes).
    Returns (z, rho_bar, dynamic_mask); z sums to gamma whenever survivors
    remain.
    """
    dyn = candidates.copy()
    rho = 0.0
    z = np.zeros_like(chi)
    while dyn.any():
        rho = (np.add.reduce(chi[dyn]) - gamma) / np.add.reduce(varsigma[dyn])
        z = np.where(dyn, chi - varsigma * rho, 0.0)
        drop = dyn & (z <= 0.0)
        if not drop.any():
            break
        dyn &= ~drop
    z = np.where(dyn, z, 0.0)
    return z, float(rho), dyn


def eml_step(fleet: Fleet, part: Partition, gamma: float) -> StepOutcome:
    """Total-budget step.

    With a loose budget (gamma covers moving everyone to their centroid) this
    is exactly lloyd_step. Otherwise the pruning loop picks the dynamic set
    and each dynamic sensor stops short of its centroid by
    varsigma_n * rho_bar / chi_n of the way, which spends the whole budget.
    """
    if not (gamma >= 0.0):
        raise ValueError("gamma must be nonnegative")
    chi = fleet.xi * _vec_norms(part.gamma_vec)
    candidates = ~part.empty & (chi > 0.0)
    total_chi = float(np.add.reduce(chi[candidates]))

    if gamma >= total_chi:
        movements, new = _centroid_moves(fleet, part)
        return _outcome(movements, new, candidates, rho_bar=0.0)

    z, rho_bar, dyn = waterfill_pruning(chi, part.varsigma, candidates, gamma)
    scale = np.zeros(fleet.nsensors)
    scale[dyn] = 1.0 - part.varsigma[dyn] * rho_bar / chi[dyn]
    planned = scale[:, None] * part.gamma_vec
    hold = part.empty[:, None]
    new = np.where(hold, fleet.current, fleet.initial + planned)
    movements = np.where(hold, fleet.current - fleet.initial, planned)
    return _outcome(movements, new, dyn, rho_bar=rho_bar,
                    budget_bound=bool(dyn.any()))


def cml_step(fleet: Fleet, part: Partition, gammas: np.ndarray) -> StepOutcome:
    """Per-sensor-budget step: move toward the centroid, clamped to the
    feasible disk of radius gamma_n / xi_n around the initial position."""
    gammas = np.asarray(gammas, dtype=np.float64)
    chi = fleet.xi * _vec_norms(part.gamma_vec)
    movable = ~part.empty & (chi > 0.0)
    scale = np.zeros(fleet.nsensors)
    with np.errstate(over="ignore"):
        scale[movable] = np.minimum(1.0, gammas[movable] / chi[movable])
    planned = scale[:, None] * part.gamma_vec
    hold = part.empty[:, None]
    new = np.where(hold, fleet.current, fleet.initial + planned)
    movements = np.where(hold, fleet.current - fleet.initial, planned)
    dynamic = movable & (scale > 0.0)
    return _outcome(movements, new, dynamic)


@dataclass
class IterationRecord:
    iteration: int
    distortion: float
    coverage: float
    total_energy: float
    max_individual_energy: float
    max_step: float
    path_lengths: np.ndarray = field(repr=False)

    @property
    def cum_path_total(self) -> float:
        return float(np.add.reduce(self.path_lengths))


@dataclass
class Trace:
    """Per-iteration metric records plus the final fleet state.

    records holds one entry per executed iteration (at most iter_max);
    initial describes the starting deployment (iteration 0) and is reported
    separately. outcomes is populated only when the runner is asked to keep
    per-step diagnostics.
    """

    algorithm: str
    initial: IterationRecord
    records: list[IterationRecord]
    final_fleet: Fleet
    converged: bool
    outcomes: Optional[list[StepOutcome]] = None

    @property
    def final(self) -> IterationRecord:
        return self.records[-1] if self.records else self.initial


ALGORITHMS = ("lloyd", "lloyd_alpha", "eml", "cml")


def _check_budget(algorithm: str, budget: EnergyBudget, nsensors: int) -> None:
    if algorithm in ("lloyd", "lloyd_alpha"):
        if not isinstance(budget, Unlimited):
            raise ValueError(f"{algorithm} takes no energy budget (use Unlimited)")
    elif algorithm == "eml":
        if not isinstance(budget, (TotalBudget, Unlimited)):
            raise ValueError("eml needs a TotalBudget (or Unlimited)")
    elif algorithm == "cml":
        if not isinstance(budget, (PerSensorBudget, Unlimited)):
            raise ValueError("cml needs a PerSensorBudget (or Unlimited)")
        if isinstance(budget, PerSensorBudget) and budget.gammas.shape[0] != nsensors:
            raise ValueError("per-sensor budget length must equal the fleet size")
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}; pick one of {ALGORITHMS}")


def run(algorithm: str, fleet: Fleet, budget: EnergyBudget, density: DensityField,
        grid: Grid, iter_max: int = 100, tolerance: float = 1e-9,
        alpha: Optional[float] = None, threads: int = 1,
        keep_outcomes: bool = False) -> Trace:
    """Iterate partition + step until iter_max or until sensors stop moving.

    tolerance is in region widths: the loop exits early when every sensor
    moved less than tolerance * region_width in an iteration (0 disables).
    Fully deterministic: the same inputs give the same trace bit for bit.
    """
    if iter_max < 1:
        raise ValueError("iter_max must be at least 1")
    _check_budget(algorithm, budget, fleet.nsensors)
    if algorithm == "lloyd_alpha":
        if alpha is None:
            raise ValueError("lloyd_alpha requires alpha")
    elif alpha is not None:
        raise ValueError("alpha is only meaningful for lloyd_alpha")

    if algorithm == "eml":
        gamma_total = math.inf if isinstance(budget, Unlimited) else budget.gamma
    elif algorithm == "cml":
        if isinstance(budget, Unlimited):
            gammas = np.full(fleet.nsensors, math.inf)
        else:
            gammas = budget.gammas

    fleet = fleet.copy()
    fvals = density.grid_values(grid)
    part = compute_partition(fleet, grid, density, fvals, threads)
    paths = np.zeros(fleet.nsensors)
    tol_abs = tolerance * grid.region.width

    def record(k: int, max_step: float) -> IterationRecord:
        per, total = energy(fleet)
        local = local_distortions(fleet, part, density, grid, fvals, threads)
        return IterationRecord(
            iteration=k,
            distortion=float(np.add.reduce(local)),
            coverage=area_coverage(fleet, grid, threads),
            total_energy=total,
            max_individual_energy=float(per.max()),
            max_step=max_step,
            path_lengths=paths.copy(),
        )

    initial = record(0, 0.0)
    records: list[IterationRecord] = []
    outcomes: Optional[list[StepOutcome]] = [] if keep_outcomes else None
    converged = False

    for k in range(1, iter_max + 1):
        if algorithm == "lloyd":
            outcome = lloyd_step(fleet, part)
        elif algorithm == "lloyd_alpha":
            outcome = lloyd_alpha_step(fleet, part, alpha)
        elif algorithm == "eml":
            outcome = eml_step(fleet, part, gamma_total)
        else:
            outcome = cml_step(fleet, part, gammas)

        deltas = _vec_norms(outcome.new_positions - fleet.current)
        paths += deltas
        max_step = float(deltas.max())
        fleet = fleet.with_positions(outcome.new_positions)
        part = compute_partition(fleet, grid, density, fvals, threads)
        records.append(record(k, max_step))
        if outcomes is not None:
            outcomes.append(outcome)
        if max_step < tol_abs:
            converged = True
            break

    return Trace(
        algorithm=algorithm,
        initial=initial,
        records=records,
        final_fleet=fleet,
        converged=converged,
        outcomes=outcomes,
    )
