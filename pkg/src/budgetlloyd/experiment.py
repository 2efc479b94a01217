"""Experiment orchestration: run configs, verify runs, compare algorithms.

run_experiment executes a config and writes three artifacts into its output
directory: trace.csv (one row per iteration, fixed header, %.17g floats, LF
line endings), deployment.svg, and summary.txt. verify_run replays a config
and certifies the run against the library's independent oracles; compare_runs
tabulates final metrics across configs sharing one random instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics
from ._kernels import active_backend
from .config import SCENARIOS, ExperimentConfig, init_random_deployment, parse_config
from .oracle import AllocationInstance, qp_energy_allocation, segment_perturbation_check
from .partition import Fleet, compute_partition
from .relocation import PerSensorBudget, TotalBudget, Trace, run
from .svgplot import deployment_svg

CSV_HEADER = "iter,distortion,coverage,total_energy,max_individual_energy,max_step,cum_path_total"


@dataclass
class ExperimentPaths:
    trace_csv: Path
    deployment_svg: Path
    summary_txt: Path


def run_config(config: ExperimentConfig, threads: int = 1,
               keep_outcomes: bool = False) -> Trace:
    """Run a parsed config in memory (no files written)."""
    grid = config.build_grid()
    density = config.build_density()
    fleet = init_random_deployment(config)
    return run(
        config.algorithm, fleet, config.budget, density, grid,
        iter_max=config.iter_max, alpha=config.alpha, threads=threads,
        keep_outcomes=keep_outcomes,
    )


def trace_csv_text(trace: Trace) -> str:
    lines = [CSV_HEADER]
    for rec in trace.records:
        lines.append(",".join(
            [str(rec.iteration)]
            + [f"{v:.17g}" for v in (
                rec.distortion, rec.coverage, rec.total_energy,
                rec.max_individual_energy, rec.max_step, rec.cum_path_total,
            )]
        ))
    return "\n".join(lines) + "\n"


def summary_text(config: ExperimentConfig, trace: Trace) -> str:
    first, last = trace.initial, trace.final
    region = config.region
    lines = [
        f"algorithm: {trace.algorithm}",
        f"budget: {config.budget_label()}",
        f"sensors: {config.n}",
        f"region: [{region.xmin:g}, {region.ymin:g}] .. [{region.xmax:g}, {region.ymax:g}]",
        f"grid: {config.grid_nx}x{config.grid_ny}",
        f"density: {config.density}",
        f"seed: {config.seed}",
        f"iterations: {len(trace.records)} of {config.iter_max}"
        f" (converged: {'yes' if trace.converged else 'no'})",
        f"initial distortion: {first.distortion:.17g}",
        f"final distortion: {last.distortion:.17g}",
        f"initial coverage: {first.coverage:.17g}",
        f"final coverage: {last.coverage:.17g}",
        f"total energy: {last.total_energy:.17g}",
        f"max individual energy: {last.max_individual_energy:.17g}",
        f"total path length: {last.cum_path_total:.17g}",
        f"kernel backend: {active_backend()}",
    ]
    return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig, threads: int = 1) -> tuple[Trace, ExperimentPaths]:
    """Run a config and write trace.csv, deployment.svg, summary.txt."""
    trace = run_config(config, threads=threads)
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = ExperimentPaths(
        trace_csv=outdir / "trace.csv",
        deployment_svg=outdir / "deployment.svg",
        summary_txt=outdir / "summary.txt",
    )
    paths.trace_csv.write_text(trace_csv_text(trace), encoding="utf-8", newline="\n")
    fleet = trace.final_fleet
    paths.deployment_svg.write_text(
        deployment_svg(config.region, fleet.initial, fleet.current,
                       radii=fleet.effective_radii),
        encoding="utf-8", newline="\n",
    )
    paths.summary_txt.write_text(summary_text(config, trace), encoding="utf-8", newline="\n")
    return trace, paths


# ---------------------------------------------------------------------------
# verification


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"[{status}] {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class VerificationReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


class _Checker:
    def __init__(self):
        self.results: list[CheckResult] = []

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.results.append(CheckResult(name, bool(passed), detail))


def verify_run(config: ExperimentConfig, threads: int = 1,
               perturbation_trials: int = 300) -> VerificationReport:
    """Replay a config and certify the run.

    Checks, per iteration where applicable: distortion monotonicity, budget
    feasibility (with exact budget exhaustion on binding total-budget steps),
    the equal-moving-efficiency conditions of binding eml steps, the cml
    per-sensor clamp formula, destination-on-segment geometry, and agreement
    of the realized energy allocation with the independent water-filling
    solver. If trace.csv already exists in the config's outdir it is compared
    row by row against the replay.
    """
    grid = config.build_grid()
    density = config.build_density()
    fvals = density.grid_values(grid)
    fleet0 = init_random_deployment(config)
    trace = run(
        config.algorithm, fleet0, config.budget, density, grid,
        iter_max=config.iter_max, alpha=config.alpha, threads=threads,
        keep_outcomes=True,
    )
    chk = _Checker()

    # Theorems: distortion never increases (per recorded iteration).
    if config.algorithm in ("lloyd", "eml", "cml"):
        ok = True
        detail = ""
        prev = trace.initial.distortion
        for rec in trace.records:
            if rec.distortion > prev * (1.0 + 1e-9):
                ok = False
                detail = f"iteration {rec.iteration}: {rec.distortion!r} > {prev!r}"
                break
            prev = rec.distortion
        chk.add("monotone_distortion", ok, detail)

    _verify_steps(chk, config, fleet0, grid, density, fvals, trace, threads)

    # Cross-check an existing trace.csv byte for byte.
    trace_path = Path(config.outdir) / "trace.csv"
    if trace_path.exists():
        expected = trace_csv_text(trace).splitlines()
        actual = trace_path.read_text(encoding="utf-8").splitlines()
        ok = True
        detail = ""
        if len(actual) != len(expected):
            ok = False
            detail = f"row count {len(actual) - 1} != {len(expected) - 1}"
        else:
            for i, (got, want) in enumerate(zip(actual, expected)):
                if got != want:
                    ok = False
                    detail = f"iteration {expected[i].split(',')[0] if i else 'header'}: row differs"
                    break
        chk.add("trace_match", ok, detail)

    # First-order optimality of the final step: its destinations against the
    # partition that step actually optimized (the pre-move one). lloyd_alpha
    # makes deliberately partial moves, so the certificate does not apply.
    if trace.outcomes and config.algorithm != "lloyd_alpha":
        if len(trace.outcomes) >= 2:
            pre_positions = trace.outcomes[-2].new_positions
        else:
            pre_positions = fleet0.current
        pre_fleet = fleet0.with_positions(pre_positions)
        pre_part = compute_partition(pre_fleet, grid, density, fvals, threads)
        stable = segment_perturbation_check(
            pre_fleet, pre_part, trace.final_fleet.current, config.budget,
            trials=perturbation_trials, seed=config.seed,
        )
        chk.add("final_perturbation", stable)

    return VerificationReport(chk.results)


def _verify_steps(chk, config, fleet0, grid, density, fvals, trace, threads) -> None:
    algorithm = config.algorithm
    if algorithm not in ("eml", "cml"):
        return
    if isinstance(config.budget, TotalBudget):
        gamma = config.budget.gamma
    elif isinstance(config.budget, PerSensorBudget):
        gammas = config.budget.gammas
    else:
        gamma = math.inf
        gammas = np.full(fleet0.nsensors, math.inf)

    budget_ok = True
    binding_ok = True
    prop_ok = True
    segment_ok = True
    oracle_ok = True
    details = {}

    def note(key, message):
        details.setdefault(key, message)

    fleet = fleet0
    for k, outcome in enumerate(trace.outcomes, start=1):
        part = compute_partition(fleet, grid, density, fvals, threads)
        gvec = part.gamma_vec
        chi = fleet.xi * np.hypot(gvec[:, 0], gvec[:, 1])
        disp = outcome.new_positions - fleet.initial
        z = fleet.xi * np.hypot(disp[:, 0], disp[:, 1])

        if algorithm == "eml":
            total = float(np.add.reduce(z))
            if not total <= gamma * (1.0 + 1e-9):
                budget_ok = False
                note("budget", f"iteration {k}: energy {total!r} exceeds gamma")
            if outcome.budget_bound:
                if abs(total - gamma) > 1e-9 * max(gamma, 1e-300):
                    binding_ok = False
                    note("binding", f"iteration {k}: energy {total!r} != gamma {gamma!r}")
                if not _prop1_holds(fleet, part, outcome, chi, z):
                    prop_ok = False
                    note("prop1", f"iteration {k}")
                cand = ~part.empty & (chi > 0.0)
                z_ref = np.zeros_like(z)
                z_ref[cand] = qp_energy_allocation(
                    AllocationInstance(chi[cand], part.varsigma[cand], gamma)
                )
                if float(np.max(np.abs(z - z_ref))) > 1e-8:
                    oracle_ok = False
                    note("oracle", f"iteration {k}")
        else:
            if not np.all(z <= gammas * (1.0 + 1e-9)):
                budget_ok = False
                note("budget", f"iteration {k}: a sensor exceeds gamma_n")
            # re-derive the clamp formula and compare destinations
            scale = np.zeros_like(chi)
            movable = ~part.empty & (chi > 0.0)
            with np.errstate(over="ignore"):
                scale[movable] = np.minimum(1.0, gammas[movable] / chi[movable])
            expect = fleet.initial + scale[:, None] * gvec
            expect = np.where(part.empty[:, None], outcome.new_positions, expect)
            if float(np.max(np.abs(outcome.new_positions - expect))) > 1e-12:
                prop_ok = False
                note("prop2", f"iteration {k}")

        if not _on_segment(fleet, part, outcome):
            segment_ok = False
            note("segment", f"iteration {k}")
        fleet = fleet.with_positions(outcome.new_positions)

    chk.add("budget_feasible", budget_ok, details.get("budget", ""))
    if algorithm == "eml":
        chk.add("binding_budget_exhausted", binding_ok, details.get("binding", ""))
        chk.add("equal_moving_efficiency", prop_ok, details.get("prop1", ""))
        chk.add("oracle_allocation", oracle_ok, details.get("oracle", ""))
    else:
        chk.add("clamp_formula", prop_ok, details.get("prop2", ""))
    chk.add("destination_on_segment", segment_ok, details.get("segment", ""))


def _prop1_holds(fleet: Fleet, part, outcome, chi, z) -> bool:
    """Binding-step optimality: dynamic sensors share one moving efficiency,
    no static sensor beats it, and dynamic positions satisfy the threshold
    formula."""
    dyn = outcome.dynamic
    if dyn.size == 0:
        return True
    sig = part.varsigma
    rho_dyn = (chi[dyn] - z[dyn]) / sig[dyn]
    rho_bar = float(rho_dyn[0])
    spread = float(np.max(rho_dyn) - np.min(rho_dyn))
    if spread > 1e-6 * max(abs(rho_bar), 1e-300):
        return False
    stat = outcome.static
    if stat.size:
        with np.errstate(invalid="ignore"):
            rho_stat = np.where(np.isinf(sig[stat]), 0.0, chi[stat] / sig[stat])
        if np.any(rho_stat > rho_bar * (1.0 + 1e-6) + 1e-12):
            return False
    # threshold position formula for dynamic sensors
    gvec = part.gamma_vec[dyn]
    norm = np.hypot(gvec[:, 0], gvec[:, 1])
    expect = part.centroid[dyn] - (sig[dyn] * outcome.rho_bar / (fleet.xi[dyn] * norm))[:, None] * gvec
    return float(np.max(np.abs(outcome.new_positions[dyn] - expect))) <= 1e-9


def _on_segment(fleet: Fleet, part, outcome) -> bool:
    """Every non-empty sensor's destination lies on [initial, centroid]."""
    mask = ~part.empty
    if not mask.any():
        return True
    move = outcome.new_positions[mask] - fleet.initial[mask]
    gvec = part.gamma_vec[mask]
    cross = move[:, 0] * gvec[:, 1] - move[:, 1] * gvec[:, 0]
    g2 = gvec[:, 0] ** 2 + gvec[:, 1] ** 2
    if np.any(np.abs(cross) > 1e-9 * np.maximum(g2, 1e-300)):
        return False
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(g2 > 0, (move[:, 0] * gvec[:, 0] + move[:, 1] * gvec[:, 1]) / g2, 0.0)
    move_norm = np.hypot(move[:, 0], move[:, 1])
    zero_target = (g2 == 0) & (move_norm > 0)
    return not (np.any(t < -1e-12) or np.any(t > 1.0 + 1e-12) or np.any(zero_target))


# ---------------------------------------------------------------------------
# comparison

COMPARE_HEADER = ("algorithm,budget,final_distortion,final_coverage,"
                  "total_move_distance,max_individual_move_distance,"
                  "total_energy,max_individual_energy")


def compare_runs(configs: list[ExperimentConfig], threads: int = 1) -> str:
    """Run several configs on one shared instance and tabulate final metrics.

    All configs must agree on everything that defines the instance (region,
    grid, density, seed, fleet parameters); they may differ in algorithm and
    budget. Rows come out in input order.
    """
    if len(configs) < 2:
        raise ValueError("compare needs at least two configs")
    base = configs[0]
    shared = ("region", "grid_nx", "grid_ny", "n", "eta", "xi", "rs", "density",
              "seed", "iter_max", "scenario")
    for other in configs[1:]:
        for key in shared:
            if getattr(other, key) != getattr(base, key):
                raise ValueError(f"configs disagree on {key}; compare needs one shared instance")

    lines = [COMPARE_HEADER]
    for config in configs:
        trace = run_config(config, threads=threads)
        fleet = trace.final_fleet
        disp = fleet.current - fleet.initial
        dist = np.hypot(disp[:, 0], disp[:, 1])
        rec = trace.final
        lines.append(",".join([
            config.algorithm,
            config.budget_label(),
            f"{rec.distortion:.17g}",
            f"{rec.coverage:.17g}",
            f"{float(np.add.reduce(dist)):.17g}",
            f"{float(dist.max()):.17g}",
            f"{rec.total_energy:.17g}",
            f"{rec.max_individual_energy:.17g}",
        ]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# region-scale calibration


def mean_initial_coverage(scenario: str, side: float, seeds: list[int],
                          grid_n: int = 128, threads: int = 1) -> float:
    """Mean coverage of random initial deployments on a side x side region."""
    total = 0.0
    for seed in seeds:
        text = (f"scenario = {scenario}\nseed = {seed}\n"
                f"region_max = {side!r}, {side!r}\n"
                f"grid_nx = {grid_n}\ngrid_ny = {grid_n}\n")
        cfg = parse_config(text)
        fleet = init_random_deployment(cfg)
        grid = cfg.build_grid()
        total += metrics.area_coverage(fleet, grid, threads)
    return total / len(seeds)


def calibrate_region_side(scenario: str, target_coverage: float, seeds: list[int],
                          grid_n: int = 128, lo: float = 0.5, hi: float = 8.0,
                          iters: int = 30, threads: int = 1) -> float:
    """Square-region side length whose mean initial coverage hits the target.

    Mean initial coverage decreases in the side length (same disks, more
    area), so plain bisection suffices. Used to pin the region scale when
    reproducing coverage levels that depend on an otherwise free region size.
    """
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mean_initial_coverage(scenario, mid, seeds, grid_n, threads) > target_coverage:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scenario_lines() -> list[str]:
    lines = []
    for tag in sorted(SCENARIOS):
        p = SCENARIOS[tag]
        eta = p["eta"]
        xi = p["xi"]

        def compact(vals):
            runs = []
            start = 0
            for i in range(1, len(vals) + 1):
                if i == len(vals) or vals[i] != vals[start]:
                    runs.append(f"{vals[start]:g} (sensors {start + 1}-{i})")
                    start = i
            return ", ".join(runs)

        lines.append(f"{tag}: N={p['N']}, Rs={p['Rs']:g}, "
                     f"eta: {compact(eta)}; xi: {compact(xi)}")
    return lines
