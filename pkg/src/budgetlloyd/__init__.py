"""Energy-budgeted mobile-sensor relocation on weighted Voronoi partitions.

Sensors monitor a rectangular region; sensing uncertainty is a weighted CVT
distortion over a quadrature grid, and moving costs energy linear in the
displacement. The library provides Lloyd-style relocation steppers with total
(eml) or per-sensor (cml) movement-energy budgets, an unconstrained-Lloyd and
a scaled-Lloyd baseline, independent optimality oracles, and a CLI driving
reproducible experiments.
"""

from ._kernels import active_backend, has_compiled, use_backend
from .config import (ConfigError, ExperimentConfig, SCENARIOS,
                     init_random_deployment, parse_config, parse_config_file)
from .experiment import (calibrate_region_side, compare_runs,
                         mean_initial_coverage, run_config, run_experiment,
                         trace_csv_text, verify_run)
from .geometry import (DensityField, Grid, Point, Region, build_grid,
                       integrate, uniform_density)
from .metrics import (MetricsReport, area_coverage, centroid_distortions,
                      distortion, energy, lifetime_budget, local_distortions,
                      report)
from .oracle import (AllocationInstance, grid_search_allocation,
                     qp_energy_allocation, segment_perturbation_check)
from .partition import (Fleet, Partition, SensorParams, assign_mwvd,
                        cell_moments, compute_partition, make_fleet)
from .relocation import (ALGORITHMS, EnergyBudget, IterationRecord,
                         PerSensorBudget, StepOutcome, TotalBudget, Trace,
                         UNLIMITED, Unlimited, cml_step, eml_step,
                         lloyd_alpha_step, lloyd_step, run, waterfill_pruning)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "AllocationInstance", "ConfigError", "DensityField",
    "EnergyBudget", "ExperimentConfig", "Fleet", "Grid", "IterationRecord",
    "MetricsReport", "Partition", "PerSensorBudget", "Point", "Region",
    "SCENARIOS", "SensorParams", "StepOutcome", "TotalBudget", "Trace",
    "UNLIMITED", "Unlimited", "active_backend", "area_coverage", "assign_mwvd",
    "build_grid", "calibrate_region_side", "cell_moments", "centroid_distortions",
    "cml_step", "compare_runs", "compute_partition", "distortion", "eml_step",
    "energy", "grid_search_allocation", "has_compiled", "init_random_deployment",
    "integrate", "lifetime_budget", "lloyd_alpha_step", "lloyd_step",
    "local_distortions", "make_fleet", "mean_initial_coverage",
    "parse_config", "parse_config_file", "qp_energy_allocation", "report",
    "run", "run_config", "run_experiment", "segment_perturbation_check",
    "trace_csv_text", "uniform_density", "use_backend", "verify_run",
    "waterfill_pruning",
]
