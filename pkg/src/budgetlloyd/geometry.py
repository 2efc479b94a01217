"""Target region, density fields, and the uniform quadrature grid.

Every integral in the library is a midpoint-rule sum over one shared grid of
cell centers, so partitioning, distortion, and coverage are all evaluated on
exactly the same discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

# Cells are processed in fixed contiguous chunks so that reductions have one
# reduction tree regardless of worker-thread count (byte-stable output).
BLOCK_CELLS = 8192


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        corners = (self.xmin, self.ymin, self.xmax, self.ymax)
        if not all(math.isfinite(v) for v in corners):
            raise ValueError("region corners must be finite")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("region must have positive width and height")

    @property
    def min_corner(self) -> Point:
        return Point(self.xmin, self.ymin)

    @property
    def max_corner(self) -> Point:
        return Point(self.xmax, self.ymax)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, x, y) -> bool:
        return bool(
            np.all((x >= self.xmin) & (x <= self.xmax) & (y >= self.ymin) & (y <= self.ymax))
        )


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform nx-by-ny midpoint grid over a region.

    Cell centers are flattened row-major with y in the outer loop:
    index = iy*nx + ix, center = (xmin + (ix+0.5)*dx, ymin + (iy+0.5)*dy).
    """

    region: Region
    nx: int
    ny: int
    cell_area: float
    cx: np.ndarray = field(repr=False)
    cy: np.ndarray = field(repr=False)

    @property
    def ncells(self) -> int:
        return self.nx * self.ny


def build_grid(region: Region, nx: int, ny: int) -> Grid:
    """Build the midpoint quadrature grid. nx and ny must be >= 1."""
    if nx < 1 or ny < 1:
        raise ValueError(f"grid resolution must be positive, got {nx}x{ny}")
    dx = region.width / nx
    dy = region.height / ny
    xs = region.xmin + (np.arange(nx, dtype=np.float64) + 0.5) * dx
    ys = region.ymin + (np.arange(ny, dtype=np.float64) + 0.5) * dy
    cx = np.tile(xs, ny)
    cy = np.repeat(ys, nx)
    cell_area = region.area / (nx * ny)
    return Grid(region=region, nx=nx, ny=ny, cell_area=cell_area, cx=cx, cy=cy)


def blocked_sum(values: np.ndarray) -> float:
    """Sum a 1-D array block by block in fixed order.

    The reduction tree depends only on the array length, never on thread
    count, so every caller sees the same rounding.
    """
    total = 0.0
    for start in range(0, values.shape[0], BLOCK_CELLS):
        total += float(np.add.reduce(values[start : start + BLOCK_CELLS]))
    return total


def integrate(grid: Grid, g: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
    """Midpoint quadrature of g over the region: sum of g(center)*cell_area.

    g is evaluated vectorized on the flattened center arrays; scalar results
    broadcast (g = lambda x, y: 1.0 integrates to the region area).
    """
    values = np.broadcast_to(np.asarray(g(grid.cx, grid.cy), dtype=np.float64), grid.cx.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand produced a non-finite value on the grid")
    return blocked_sum(values) * grid.cell_area


class DensityField:
    """Nonnegative importance density f over the region.

    Built from a one-line spec string (the same grammar the config file uses):

        uniform
        gaussian <cx> <cy> <sigma>
        mixture <w> <cx> <cy> <sigma> ; <w> <cx> <cy> <sigma> ; ...

    Gaussians are unnormalized, exp(-r^2 / (2 sigma^2)); mixture terms are
    weighted sums of such bumps. Raw values are used everywhere: the field is
    not rescaled to integrate to 1.
    """

    def __init__(self, spec: str):
        self.spec = normalize_density_spec(spec)
        self._terms = _parse_density_terms(self.spec)

    def values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self._terms is None:
            return np.ones_like(x)
        out = np.zeros_like(x)
        for w, gx, gy, sigma in self._terms:
            dx = x - gx
            dy = y - gy
            out += w * np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
        return out

    def __call__(self, x, y):
        return self.values(x, y)

    def grid_values(self, grid: Grid) -> np.ndarray:
        """Evaluate on all cell centers, validating the field is usable."""
        vals = self.values(grid.cx, grid.cy)
        if not np.all(np.isfinite(vals)) or np.any(vals < 0.0):
            raise ValueError("density must be finite and nonnegative on the grid")
        if blocked_sum(vals) <= 0.0:
            raise ValueError("density integrates to zero over the region")
        return vals

    def __repr__(self) -> str:
        return f"DensityField({self.spec!r})"


def normalize_density_spec(spec: str) -> str:
    """Canonicalize a density spec string (collapse whitespace, validate)."""
    terms = _parse_density_terms(" ".join(spec.split()))
    if terms is None:
        return "uniform"
    if len(terms) == 1 and terms[0][0] == 1.0:
        w, cx, cy, s = terms[0]
        return f"gaussian {cx:g} {cy:g} {s:g}"
    parts = " ; ".join(f"{w:g} {cx:g} {cy:g} {s:g}" for w, cx, cy, s in terms)
    return f"mixture {parts}"


def _parse_density_terms(spec: str) -> list[tuple[float, float, float, float]] | None:
    """Return mixture terms (weight, cx, cy, sigma), or None for uniform."""
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty density spec")
    kind = tokens[0]
    if kind == "uniform":
        if len(tokens) != 1:
            raise ValueError("density 'uniform' takes no arguments")
        return None
    if kind == "gaussian":
        if len(tokens) != 4:
            raise ValueError("density 'gaussian' needs: cx cy sigma")
        cx, cy, sigma = (_finite_float(t, "gaussian parameter") for t in tokens[1:])
        if sigma <= 0:
            raise ValueError("gaussian sigma must be positive")
        return [(1.0, cx, cy, sigma)]
    if kind == "mixture":
        body = " ".join(tokens[1:])
        if not body:
            raise ValueError("density 'mixture' needs at least one term")
        terms = []
        for chunk in body.split(";"):
            fields = chunk.split()
            if len(fields) != 4:
                raise ValueError("mixture term needs: weight cx cy sigma")
            w, cx, cy, sigma = (_finite_float(t, "mixture parameter") for t in fields)
            if w <= 0 or sigma <= 0:
                raise ValueError("mixture weights and sigmas must be positive")
            terms.append((w, cx, cy, sigma))
        return terms
    raise ValueError(f"unknown density kind {kind!r}")


def _finite_float(token: str, what: str) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise ValueError(f"bad {what}: {token!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite, got {token!r}")
    return value


def uniform_density() -> DensityField:
    return DensityField("uniform")
