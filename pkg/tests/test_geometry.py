import math

import numpy as np
import pytest

import budgetlloyd as bl


def test_build_grid_2x2_centers():
    grid = bl.build_grid(bl.Region(0, 0, 1, 1), 2, 2)
    centers = sorted(zip(grid.cx.tolist(), grid.cy.tolist()))
    assert centers == [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]
    assert grid.cell_area == 0.25
    # row-major, x fastest
    assert grid.cx.tolist() == [0.25, 0.75, 0.25, 0.75]
    assert grid.cy.tolist() == [0.25, 0.25, 0.75, 0.75]


def test_build_grid_1x1():
    grid = bl.build_grid(bl.Region(0, 0, 1, 1), 1, 1)
    assert grid.cx.tolist() == [0.5] and grid.cy.tolist() == [0.5]
    assert grid.cell_area == 1.0


def test_build_grid_zero_resolution_rejected():
    with pytest.raises(ValueError):
        bl.build_grid(bl.Region(0, 0, 1, 1), 0, 4)


def test_degenerate_region_rejected():
    with pytest.raises(ValueError):
        bl.Region(0, 0, 0, 1)


def test_integrate_constant_is_exact():
    for n in (1, 3, 16, 200):
        grid = bl.build_grid(bl.Region(0, 0, 1, 1), n, n)
        assert bl.integrate(grid, lambda x, y: np.ones_like(x)) == 1.0


def test_integrate_linear_is_exact(unit_grid_256):
    # midpoint rule integrates affine functions exactly
    assert bl.integrate(unit_grid_256, lambda x, y: x) == 0.5
    val = bl.integrate(unit_grid_256, lambda x, y: 2.0 * x + 3.0 * y - 1.0)
    assert val == pytest.approx(1.5, abs=1e-13)


def test_integrate_gaussian_grid_refinement(unit_grid_256):
    # self-oracle: a 4x finer grid is the reference
    dens = bl.DensityField("gaussian 0.5 0.5 0.12")
    coarse = bl.integrate(unit_grid_256, dens.values)
    fine = bl.integrate(bl.build_grid(unit_grid_256.region, 1024, 1024), dens.values)
    assert abs(coarse - fine) <= 1e-4 * abs(fine)


def test_integrate_rejects_nonfinite(unit_grid_256):
    with pytest.raises(ValueError):
        bl.integrate(unit_grid_256, lambda x, y: np.where(x > 0.5, np.inf, 1.0))


def test_integrate_is_linear():
    grid = bl.build_grid(bl.Region(0, 0, 2, 1), 64, 32)
    rng = np.random.Generator(np.random.Philox(11))
    gv = rng.random(grid.ncells)
    hv = rng.random(grid.ncells)
    a, b = 2.5, -1.25
    lhs = bl.integrate(grid, lambda x, y: a * gv + b * hv)
    rhs = a * bl.integrate(grid, lambda x, y: gv) + b * bl.integrate(grid, lambda x, y: hv)
    assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-15)


def test_refinement_converges_with_richardson_margin():
    # halving h shrinks the error of a smooth integrand; compare against the
    # coarse grid's observed Richardson estimate
    region = bl.Region(0, 0, 1, 1)
    dens = bl.DensityField("gaussian 0.4 0.55 0.2")
    vals = {}
    for n in (32, 64, 128, 256):
        vals[n] = bl.integrate(bl.build_grid(region, n, n), dens.values)
    est_32 = abs(vals[64] - vals[32])
    assert abs(vals[128] - vals[64]) < est_32
    assert abs(vals[256] - vals[128]) < abs(vals[128] - vals[64])


def test_density_specs_roundtrip():
    assert bl.DensityField("uniform").spec == "uniform"
    spec = "gaussian 0.3 0.4 0.15"
    assert bl.DensityField(spec).spec == spec
    mix = bl.DensityField("mixture 1 0.2 0.2 0.1 ; 2 0.8 0.8 0.2")
    assert mix.spec == "mixture 1 0.2 0.2 0.1 ; 2 0.8 0.8 0.2"
    v = mix.values(np.array([0.2]), np.array([0.2]))
    expect = 1.0 + 2.0 * math.exp(-(0.6**2 + 0.6**2) / (2 * 0.04))
    assert v[0] == pytest.approx(expect, rel=1e-12)


def test_density_spec_errors():
    for bad in ("gaussian 0.5 0.5", "gaussian a b c", "mixture", "blob 1 2 3",
                "gaussian 0.5 0.5 -1", ""):
        with pytest.raises(ValueError):
            bl.DensityField(bad)
