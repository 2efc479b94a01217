"""Backend parity: the compiled core and the numpy fallback must agree bit
for bit, and results must not depend on the worker-thread count."""

import numpy as np
import pytest

import budgetlloyd as bl
from budgetlloyd import _kernels
from conftest import rand_instance


needs_compiled = pytest.mark.skipif(not bl.has_compiled(),
                                    reason="compiled kernels not built")


@pytest.fixture
def instance():
    fleet, grid, _ = rand_instance(17, n=13, grid_n=97)  # odd size, several blocks
    dens = bl.DensityField("mixture 1 0.3 0.3 0.2 ; 0.5 0.7 0.6 0.15")
    return fleet, grid, dens, dens.grid_values(grid)


@needs_compiled
def test_backends_bitwise_identical(instance):
    fleet, grid, dens, fvals = instance
    results = {}
    for backend in ("compiled", "python"):
        bl.use_backend(backend)
        try:
            part = bl.compute_partition(fleet, grid, dens, fvals)
            results[backend] = (
                part.owner.copy(), part.volume.copy(), part.centroid.copy(),
                bl.local_distortions(fleet, part, dens, grid, fvals).copy(),
                bl.area_coverage(fleet, grid),
            )
        finally:
            bl.use_backend("compiled")
    a, b = results["compiled"], results["python"]
    assert np.array_equal(a[0], b[0])
    for x, y in zip(a[1:4], b[1:4]):
        assert np.array_equal(x, y, equal_nan=True)
    assert a[4] == b[4]


def test_thread_count_does_not_change_results(instance):
    fleet, grid, dens, fvals = instance
    base = bl.compute_partition(fleet, grid, dens, fvals, threads=1)
    base_d = bl.local_distortions(fleet, base, dens, grid, fvals, threads=1)
    for threads in (2, 4, 7):
        part = bl.compute_partition(fleet, grid, dens, fvals, threads=threads)
        assert np.array_equal(base.owner, part.owner)
        assert np.array_equal(base.volume, part.volume)
        assert np.array_equal(
            base_d, bl.local_distortions(fleet, part, dens, grid, fvals, threads=threads))
        assert bl.area_coverage(fleet, grid, threads=threads) == bl.area_coverage(fleet, grid)


def test_split_kernels_match_fused(instance):
    fleet, grid, dens, fvals = instance
    owner, v, sx, sy = _kernels.partition_pass(
        grid.cx, grid.cy, fvals, fleet.current[:, 0], fleet.current[:, 1], fleet.eta)
    owner2 = _kernels.assign_owners(
        grid.cx, grid.cy, fleet.current[:, 0], fleet.current[:, 1], fleet.eta)
    v2, sx2, sy2 = _kernels.accumulate_moments(owner2, grid.cx, grid.cy, fvals,
                                               fleet.nsensors)
    assert np.array_equal(owner, owner2)
    assert np.array_equal(v, v2) and np.array_equal(sx, sx2) and np.array_equal(sy, sy2)


def test_use_backend_validation():
    with pytest.raises(ValueError):
        bl.use_backend("fortran")
    assert bl.active_backend() in ("compiled", "python")
