"""Independent reference solvers used to certify step optimality.

The fixed-partition relocation step is equivalent to the convex allocation

    minimize   sum_n (z_n - chi_n)^2 / varsigma_n
    subject to sum_n z_n <= gamma,  0 <= z_n <= chi_n

where chi_n is the energy needed to reach the centroid and z_n the energy
actually granted to sensor n. qp_energy_allocation solves it by water-filling
(bisection on the Lagrange level), grid_search_allocation by brute-force
enumeration, and segment_perturbation_check probes a candidate deployment for
first-order improvements. None of them share code with the relocation
steppers, so they can certify those steps without circularity. They ship in
the library (not only in tests) so the CLI `verify` command can use them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from .partition import Fleet, Partition
from .relocation import EnergyBudget, PerSensorBudget, TotalBudget, Unlimited

BISECTION_ITERS = 200


@dataclass
class AllocationInstance:
    """One fixed-partition allocation problem."""

    chi: np.ndarray
    varsigma: np.ndarray
    gamma: float

    def __post_init__(self) -> None:
        self.chi = np.asarray(self.chi, dtype=np.float64).reshape(-1)
        self.varsigma = np.asarray(self.varsigma, dtype=np.float64).reshape(-1)
        if self.chi.shape != self.varsigma.shape:
            raise ValueError("chi and varsigma must have the same length")
        if np.any(self.chi < 0) or np.any(self.varsigma <= 0):
            raise ValueError("need chi >= 0 and varsigma > 0")
        if not (self.gamma >= 0.0):
            raise ValueError("gamma must be nonnegative")

    def objective(self, z: np.ndarray) -> float:
        d = np.asarray(z, dtype=np.float64) - self.chi
        return float(np.add.reduce(d * d / self.varsigma))


def qp_energy_allocation(instance: AllocationInstance) -> np.ndarray:
    """Exact optimizer via Lagrangian water-filling.

    If the box optimum z = chi fits the budget, return it. Otherwise the
    budget binds and z_n = max(0, chi_n - lam * varsigma_n) for the unique
    level lam >= 0 with sum(z) = gamma; the sum is monotone in lam, so 200
    bisection steps on [0, max(chi/varsigma)] pin lam to the last bit.
    """
    chi, sig, gamma = instance.chi, instance.varsigma, instance.gamma
    if float(np.add.reduce(chi)) <= gamma:
        return chi.copy()

    def spent(lam: float) -> float:
        return float(np.add.reduce(np.maximum(0.0, chi - lam * sig)))

    lo = 0.0
    hi = float(np.max(chi / sig))
    for _ in range(BISECTION_ITERS):
        mid = 0.5 * (lo + hi)
        if spent(mid) > gamma:
            lo = mid
        else:
            hi = mid
    return np.maximum(0.0, chi - hi * sig)


def grid_search_allocation(instance: AllocationInstance, steps: int) -> np.ndarray:
    """Brute-force minimizer over the discretized feasible box.

    Each axis is discretized as z_n = k * chi_n / steps, k = 0..steps; points
    with sum(z) > gamma are discarded. Cost grows as (steps+1)^N, hence the
    N <= 4 limit.
    """
    chi, sig, gamma = instance.chi, instance.varsigma, instance.gamma
    n = chi.shape[0]
    if n > 4:
        raise ValueError("grid search is limited to N <= 4")
    if not (1 <= steps <= 200):
        raise ValueError("steps must be in 1..200")

    axes = [chi[i] * (np.arange(steps + 1) / steps) for i in range(n)]
    best_z: Optional[np.ndarray] = None
    best_obj = np.inf
    # Enumerate the outer n-1 axes; vectorize the innermost one.
    outer = product(*(range(steps + 1) for _ in range(n - 1))) if n > 1 else [()]
    inner = axes[-1]
    inner_obj = (inner - chi[-1]) ** 2 / sig[-1]
    for idx in outer:
        prefix = np.array([axes[i][k] for i, k in enumerate(idx)])
        prefix_sum = float(np.add.reduce(prefix)) if n > 1 else 0.0
        feasible = prefix_sum + inner <= gamma
        if not feasible.any():
            continue
        d = prefix - chi[:-1] if n > 1 else np.zeros(0)
        prefix_obj = float(np.add.reduce(d * d / sig[:-1])) if n > 1 else 0.0
        total = np.where(feasible, prefix_obj + inner_obj, np.inf)
        k = int(np.argmin(total))
        if total[k] < best_obj:
            best_obj = float(total[k])
            best_z = np.append(prefix, inner[k])
    if best_z is None:
        # gamma smaller than every positive grid value: the origin is feasible
        best_z = np.zeros(n)
    return best_z


def _feasible_radius(fleet: Fleet, positions: np.ndarray, budget: EnergyBudget,
                     sensor: int) -> float:
    """Radius of sensor's feasible disk around its initial position, holding
    all other sensors where they are."""
    if isinstance(budget, Unlimited):
        return np.inf
    if isinstance(budget, PerSensorBudget):
        return budget.gammas[sensor] / fleet.xi[sensor]
    if not isinstance(budget, TotalBudget):
        raise TypeError(f"unsupported budget {budget!r}")
    disp = positions - fleet.initial
    used = fleet.xi * np.hypot(disp[:, 0], disp[:, 1])
    others = float(np.add.reduce(used)) - float(used[sensor])
    return max(0.0, budget.gamma - others) / fleet.xi[sensor]


def segment_perturbation_check(fleet: Fleet, part: Partition, positions: np.ndarray,
                               budget: EnergyBudget, trials: int = 1000,
                               epsilon: float = 1e-3, seed: int = 0,
                               improvement_tol: float = 1e-9) -> bool:
    """First-order local-optimality probe for the fixed-partition objective.

    Perturbs one random sensor at a time by a random direction of length
    epsilon, projects the move back into that sensor's feasible disk, and
    evaluates the fixed-partition objective sum_n eta_n ||p_n - c_n||^2 v_n.
    Returns False as soon as some perturbation improves it by more than
    improvement_tol. Randomness comes from an explicit seeded generator.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    rng = np.random.Generator(np.random.Philox(seed))
    weights = fleet.eta * part.volume  # empty sensors weigh nothing
    active = np.flatnonzero(~part.empty)
    if active.size == 0:
        return True
    for _ in range(trials):
        n = int(active[rng.integers(active.size)])
        theta = rng.uniform(0.0, 2.0 * np.pi)
        cand = positions[n] + epsilon * np.array([np.cos(theta), np.sin(theta)])
        radius = _feasible_radius(fleet, positions, budget, n)
        offset = cand - fleet.initial[n]
        dist = float(np.hypot(offset[0], offset[1]))
        if dist > radius:
            cand = fleet.initial[n] + offset * (radius / dist)
        c = part.centroid[n]
        before = weights[n] * float(np.sum((positions[n] - c) ** 2))
        after = weights[n] * float(np.sum((cand - c) ** 2))
        if after < before - improvement_tol:
            return False
    return True
