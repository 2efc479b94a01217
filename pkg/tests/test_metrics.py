import math

import numpy as np
import pytest

import budgetlloyd as bl
from conftest import rand_instance


def _offset_term(fleet, part):
    """Parallel-axis offset: sum over non-empty sensors of eta ||p - c||^2 v."""
    mask = ~part.empty
    d = fleet.current[mask] - part.centroid[mask]
    return float(np.sum(fleet.eta[mask] * (d[:, 0] ** 2 + d[:, 1] ** 2) * part.volume[mask]))


def test_distortion_single_sensor_analytic(unit_grid_256, uniform):
    # uniform density on the unit square, sensor at the center: second moment 1/6
    fleet = bl.make_fleet([1.0], [1.0], 0.2, np.array([[0.5, 0.5]]))
    part = bl.compute_partition(fleet, unit_grid_256, uniform)
    assert bl.distortion(fleet, part, uniform, unit_grid_256) == pytest.approx(1 / 6, abs=1e-5)


def test_distortion_corner_parallel_axis_value(unit_grid_256, uniform):
    # sensor at the origin: 1/6 + ||(0.5, 0.5)||^2 = 2/3
    fleet = bl.make_fleet([1.0], [1.0], 0.2, np.array([[0.0, 0.0]]))
    part = bl.compute_partition(fleet, unit_grid_256, uniform)
    assert bl.distortion(fleet, part, uniform, unit_grid_256) == pytest.approx(2 / 3, abs=1e-5)


def test_distortion_parallel_axis_identity_random():
    # direct quadrature == centroid form + offset form on the same grid
    for seed in range(8):
        fleet, grid, _ = rand_instance(seed, n=10, grid_n=64)
        dens = bl.DensityField("gaussian 0.5 0.45 0.3")
        part = bl.compute_partition(fleet, grid, dens)
        direct = bl.distortion(fleet, part, dens, grid)
        h = float(np.sum(bl.centroid_distortions(fleet, part, dens, grid)))
        assert abs(direct - (h + _offset_term(fleet, part))) <= 1e-10 * direct


def test_distortion_parallel_axis_full_size_instance(uniform):
    # a full 32-sensor homogeneous instance, off-centroid positions
    cfg = bl.parse_config("scenario = mwsn1\nseed = 42\ngrid_nx = 128\ngrid_ny = 128\n")
    fleet = bl.init_random_deployment(cfg)
    grid = cfg.build_grid()
    trace = bl.run("eml", fleet, bl.TotalBudget(1.0), uniform, grid, iter_max=5)
    fleet = trace.final_fleet
    part = bl.compute_partition(fleet, grid, uniform)
    direct = bl.distortion(fleet, part, uniform, grid)
    h = float(np.sum(bl.centroid_distortions(fleet, part, uniform, grid)))
    assert abs(direct - (h + _offset_term(fleet, part))) <= 1e-10 * direct


def test_distortion_is_sum_of_locals():
    fleet, grid, dens = rand_instance(5, n=9, grid_n=48)
    part = bl.compute_partition(fleet, grid, dens)
    local = bl.local_distortions(fleet, part, dens, grid)
    assert bl.distortion(fleet, part, dens, grid) == float(np.add.reduce(local))
    assert np.all(local >= 0.0)


def test_energy_zero_at_start():
    fleet, _, _ = rand_instance(0, n=5)
    per, total = bl.energy(fleet)
    assert np.all(per == 0.0) and total == 0.0


def test_energy_displacement_formula():
    fleet = bl.make_fleet([1.0], [2.0], 0.2, np.array([[0.1, 0.1]]))
    fleet = fleet.with_positions(np.array([[0.4, 0.5]]))  # displacement (0.3, 0.4)
    per, total = bl.energy(fleet)
    assert per[0] == pytest.approx(1.0, rel=1e-15)
    assert total == pytest.approx(1.0, rel=1e-15)


def test_energy_translation_invariant():
    fleet, _, _ = rand_instance(7, n=6)
    moved = fleet.with_positions(fleet.current + 0.05)
    per, _ = bl.energy(moved)
    shift = np.array([1.75, -2.5])
    shifted = bl.Fleet(fleet.eta, fleet.xi, fleet.rs,
                       fleet.initial + shift, moved.current + shift)
    per2, _ = bl.energy(shifted)
    assert per2 == pytest.approx(per, rel=1e-12, abs=1e-15)


def test_coverage_single_disk(unit_grid_256):
    fleet = bl.make_fleet([1.0], [1.0], 0.2, np.array([[0.5, 0.5]]))
    assert bl.area_coverage(fleet, unit_grid_256) == pytest.approx(math.pi * 0.04, abs=1e-3)


def test_coverage_saturates(unit_grid_256):
    fleet = bl.make_fleet([1.0], [1.0], 5.0, np.array([[0.5, 0.5]]))
    assert bl.area_coverage(fleet, unit_grid_256) == 1.0


def test_coverage_monotone_in_radius(unit_grid_256):
    fleet, _, _ = rand_instance(9, n=8)
    prev = 0.0
    for rs in (0.05, 0.1, 0.2, 0.4):
        f = bl.Fleet(fleet.eta, fleet.xi, rs, fleet.initial, fleet.current)
        cov = bl.area_coverage(f, unit_grid_256)
        assert cov >= prev
        prev = cov


def test_coverage_uses_effective_radius(unit_grid_256):
    # eta = 4 halves the sensing radius
    strong = bl.make_fleet([1.0], [1.0], 0.2, np.array([[0.5, 0.5]]))
    weak = bl.make_fleet([4.0], [1.0], 0.2, np.array([[0.5, 0.5]]))
    assert bl.area_coverage(weak, unit_grid_256) == pytest.approx(math.pi * 0.01, abs=1e-3)
    assert bl.area_coverage(weak, unit_grid_256) < bl.area_coverage(strong, unit_grid_256)


def test_lifetime_budget():
    out = bl.lifetime_budget(np.array([5.0, 3.0]), 1.0, 2.0)
    assert out.tolist() == [3.0, 1.0]
    assert bl.lifetime_budget(np.array([4.0]), 1.0, 0.0).tolist() == [4.0]
    assert bl.lifetime_budget(np.array([1.0]), 1.0, 2.0).tolist() == [0.0]
    with pytest.raises(ValueError):
        bl.lifetime_budget(np.array([1.0]), -1.0, 2.0)


def test_report_consistency():
    fleet, grid, dens = rand_instance(12, n=7, grid_n=48)
    part = bl.compute_partition(fleet, grid, dens)
    rep = bl.report(fleet, part, dens, grid)
    assert rep.distortion == float(np.add.reduce(rep.local))
    assert rep.energy_total == float(np.add.reduce(rep.energy_per_sensor))
    assert 0.0 <= rep.coverage <= 1.0
