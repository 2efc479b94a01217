"""Experiment configuration: the line-oriented config grammar and scenarios.

Grammar: UTF-8 text, one `key = value` per line, `#` starts a comment, blank
lines ignored. Lists are comma-separated. Recognized keys:

    region_min, region_max   point "x, y"            default 0,0 / 1,1
    grid_nx, grid_ny         positive int            default 256
    N                        positive int
    eta, xi                  positive float or N-list
    Rs                       positive float
    density                  uniform | gaussian cx cy sigma | mixture ...
    algorithm                lloyd | lloyd_alpha | eml | cml
    alpha                    float in [0,1] (lloyd_alpha only)
    gamma                    total budget (eml), float >= 0 or `unlimited`
    gamma_n                  per-sensor budgets (cml), float or N-list or `unlimited`
    iter_max                 positive int            default 100
    seed                     unsigned 64-bit int     required
    scenario                 mwsn1 | mwsn2 (defaults for N, eta, xi, Rs)
    outdir                   output directory        default "out"

A scenario expands first; explicit keys then override its values. When
`algorithm` is omitted it is inferred from the budget keys (gamma -> eml,
gamma_n -> cml, alpha -> lloyd_alpha, none -> lloyd). Unknown keys are
rejected with the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import DensityField, Region, build_grid, normalize_density_spec
from .partition import Fleet, make_fleet
from .relocation import (ALGORITHMS, EnergyBudget, PerSensorBudget,
                         TotalBudget, UNLIMITED, Unlimited)

_KEYS = (
    "region_min", "region_max", "grid_nx", "grid_ny", "N", "eta", "xi", "Rs",
    "density", "algorithm", "alpha", "gamma", "gamma_n", "iter_max", "seed",
    "scenario", "outdir",
)

SCENARIOS = {
    "mwsn1": {
        "N": 32,
        "eta": [1.0] * 32,
        "xi": [1.0] * 32,
        "Rs": 0.2,
    },
    "mwsn2": {
        "N": 32,
        "eta": [1.0] * 8 + [2.0] * 24,
        "xi": [3.0] * 8 + [1.0] * 24,
        "Rs": 0.3,
    },
}


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configs."""


@dataclass
class ExperimentConfig:
    region: Region
    grid_nx: int
    grid_ny: int
    n: int
    eta: list[float]
    xi: list[float]
    rs: float
    density: str
    algorithm: str
    budget: EnergyBudget
    iter_max: int
    seed: int
    outdir: str
    alpha: Optional[float] = None
    scenario: Optional[str] = None
    source: str = field(default="", repr=False)

    def build_grid(self):
        return build_grid(self.region, self.grid_nx, self.grid_ny)

    def build_density(self) -> DensityField:
        return DensityField(self.density)

    def budget_label(self) -> str:
        if isinstance(self.budget, Unlimited):
            return "unlimited"
        if isinstance(self.budget, TotalBudget):
            return f"gamma={self.budget.gamma:.17g}"
        gam = self.budget.gammas
        if np.all(gam == gam[0]):
            return f"gamma_n={gam[0]:.17g}"
        return "gamma_n=" + ",".join(f"{g:.17g}" for g in gam)


def parse_config_file(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = value
        lines[key] = lineno

    def err(key: str, message: str) -> ConfigError:
        return ConfigError(f"line {lines[key]}: {message}")

    def parse_float(key: str) -> float:
        try:
            return float(raw[key])
        except ValueError:
            raise err(key, f"malformed number {raw[key]!r}") from None

    def parse_int(key: str) -> int:
        try:
            return int(raw[key], 0)
        except ValueError:
            raise err(key, f"malformed integer {raw[key]!r}") from None

    def parse_point(key: str) -> tuple[float, float]:
        parts = [p.strip() for p in raw[key].split(",")]
        if len(parts) != 2:
            raise err(key, f"{key} needs 'x, y'")
        try:
            return float(parts[0]), float(parts[1])
        except ValueError:
            raise err(key, f"malformed number in {raw[key]!r}") from None

    def parse_float_list(key: str, n: int) -> list[float]:
        parts = [p.strip() for p in raw[key].split(",")]
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise err(key, f"malformed number in {raw[key]!r}") from None
        if len(values) == 1:
            return values * n
        if len(values) != n:
            raise err(key, f"{key} needs 1 or N={n} values, got {len(values)}")
        return values

    # Scenario defaults first, explicit keys override.
    scenario = None
    defaults: dict[str, object] = {}
    if "scenario" in raw:
        scenario = raw["scenario"]
        if scenario not in SCENARIOS:
            raise err("scenario", f"unknown scenario {scenario!r} "
                                  f"(have: {', '.join(sorted(SCENARIOS))})")
        defaults = dict(SCENARIOS[scenario])

    if "N" in raw:
        n = parse_int("N")
    elif "N" in defaults:
        n = int(defaults["N"])
    else:
        raise ConfigError("missing required key 'N' (or a scenario that sets it)")
    if n < 1:
        raise err("N", "N must be at least 1")

    def sensor_list(key: str) -> list[float]:
        if key in raw:
            values = parse_float_list(key, n)
        elif key in defaults:
            values = list(defaults[key])
            if len(values) != n:
                raise ConfigError(f"scenario {scenario!r} sets {key} for N={len(values)}, "
                                  f"but N={n} was requested")
        else:
            raise ConfigError(f"missing required key {key!r} (or a scenario that sets it)")
        if any(v <= 0 for v in values):
            raise ConfigError(f"{key} values must be positive")
        return values

    eta = sensor_list("eta")
    xi = sensor_list("xi")

    if "Rs" in raw:
        rs = parse_float("Rs")
    elif "Rs" in defaults:
        rs = float(defaults["Rs"])
    else:
        raise ConfigError("missing required key 'Rs' (or a scenario that sets it)")
    if rs <= 0:
        raise ConfigError("Rs must be positive")

    rmin = parse_point("region_min") if "region_min" in raw else (0.0, 0.0)
    rmax = parse_point("region_max") if "region_max" in raw else (1.0, 1.0)
    try:
        region = Region(rmin[0], rmin[1], rmax[0], rmax[1])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    grid_nx = parse_int("grid_nx") if "grid_nx" in raw else 256
    grid_ny = parse_int("grid_ny") if "grid_ny" in raw else 256
    if grid_nx < 1 or grid_ny < 1:
        raise ConfigError("grid resolution must be positive")

    try:
        density = normalize_density_spec(raw.get("density", "uniform"))
    except ValueError as exc:
        raise ConfigError(f"line {lines.get('density', 0)}: {exc}") from None

    iter_max = parse_int("iter_max") if "iter_max" in raw else 100
    if iter_max < 1:
        raise ConfigError("iter_max must be at least 1")

    if "seed" not in raw:
        raise ConfigError("missing required key 'seed'")
    seed = parse_int("seed")
    if not (0 <= seed < 2**64):
        raise err("seed", "seed must be an unsigned 64-bit integer")

    alpha: Optional[float] = None
    if "alpha" in raw:
        alpha = parse_float("alpha")
        if not (0.0 <= alpha <= 1.0):
            raise err("alpha", "alpha must lie in [0, 1]")

    budget, inferred = _parse_budget(raw, n, parse_float, parse_float_list, err)

    if "algorithm" in raw:
        algorithm = raw["algorithm"]
        if algorithm not in ALGORITHMS:
            raise err("algorithm", f"unknown algorithm {algorithm!r}")
    elif inferred is not None:
        algorithm = inferred
    elif alpha is not None:
        algorithm = "lloyd_alpha"
    else:
        algorithm = "lloyd"

    _validate_combination(algorithm, budget, alpha, raw)

    return ExperimentConfig(
        region=region,
        grid_nx=grid_nx,
        grid_ny=grid_ny,
        n=n,
        eta=eta,
        xi=xi,
        rs=rs,
        density=density,
        algorithm=algorithm,
        budget=budget,
        iter_max=iter_max,
        seed=seed,
        outdir=raw.get("outdir", "out"),
        alpha=alpha,
        scenario=scenario,
        source=text,
    )


def _parse_budget(raw, n, parse_float, parse_float_list, err):
    """Return (budget, inferred_algorithm)."""
    if "gamma" in raw and "gamma_n" in raw:
        raise ConfigError("gamma and gamma_n are mutually exclusive")
    if "gamma" in raw:
        if raw["gamma"].strip().lower() == "unlimited":
            return UNLIMITED, "eml"
        gamma = parse_float("gamma")
        if gamma < 0:
            raise err("gamma", "gamma must be nonnegative")
        return TotalBudget(gamma), "eml"
    if "gamma_n" in raw:
        if raw["gamma_n"].strip().lower() == "unlimited":
            return UNLIMITED, "cml"
        gammas = parse_float_list("gamma_n", n)
        if any(g < 0 for g in gammas):
            raise err("gamma_n", "gamma_n values must be nonnegative")
        return PerSensorBudget(gammas), "cml"
    return UNLIMITED, None


def _validate_combination(algorithm, budget, alpha, raw) -> None:
    has_total = isinstance(budget, TotalBudget)
    has_per = isinstance(budget, PerSensorBudget)
    if algorithm == "eml" and has_per:
        raise ConfigError("budget/algorithm mismatch: eml takes a total budget "
                          "(gamma), not gamma_n")
    if algorithm == "cml" and has_total:
        raise ConfigError("budget/algorithm mismatch: cml takes per-sensor budgets "
                          "(gamma_n), not gamma")
    if algorithm in ("lloyd", "lloyd_alpha") and (has_total or has_per):
        raise ConfigError(f"budget/algorithm mismatch: {algorithm} takes no budget")
    if algorithm == "lloyd_alpha" and alpha is None:
        raise ConfigError("lloyd_alpha requires alpha")
    if algorithm != "lloyd_alpha" and alpha is not None:
        raise ConfigError("alpha is only valid with algorithm = lloyd_alpha")


def init_random_deployment(config: ExperimentConfig) -> Fleet:
    """Initial fleet with positions i.i.d. uniform over the region.

    Uses the Philox counter-based generator keyed by config.seed; one (x, y)
    row is drawn per sensor. Identical configs give bit-identical fleets on
    any platform.
    """
    rng = np.random.Generator(np.random.Philox(config.seed))
    u = rng.random((config.n, 2))
    region = config.region
    pts = np.empty_like(u)
    pts[:, 0] = region.xmin + u[:, 0] * region.width
    pts[:, 1] = region.ymin + u[:, 1] * region.height
    return make_fleet(config.eta, config.xi, config.rs, pts)
