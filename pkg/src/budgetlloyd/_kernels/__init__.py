"""Grid kernel dispatch: compiled core when available, numpy fallback otherwise.

The hot per-iteration work (weighted Voronoi ownership, moment accumulation,
distortion sums, coverage counting) runs through the functions here. Cells are
split into fixed BLOCK_CELLS chunks; per-block partials are reduced in block
order, so output is byte-identical for any worker-thread count and for either
backend.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..geometry import BLOCK_CELLS
from . import pykernels as _python

try:
    from . import _grid_core as _compiled
except ImportError:  # extension not built; pure-python fallback
    _compiled = None

_active = _compiled if _compiled is not None else _python


def has_compiled() -> bool:
    return _compiled is not None


def active_backend() -> str:
    return "compiled" if _active is _compiled else "python"


def use_backend(name: str) -> None:
    """Force a backend ('compiled' or 'python'); mainly for tests/benchmarks."""
    global _active
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available in this install")
        _active = _compiled
    elif name == "python":
        _active = _python
    else:
        raise ValueError(f"unknown backend {name!r}")


def _f64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def _blocks(ncells: int):
    return [(s, min(s + BLOCK_CELLS, ncells)) for s in range(0, ncells, BLOCK_CELLS)]


def _run_blocks(job, blocks, threads: int):
    if threads <= 1 or len(blocks) == 1:
        return [job(span) for span in blocks]
    with ThreadPoolExecutor(max_workers=min(threads, len(blocks))) as pool:
        return list(pool.map(job, blocks))


def assign_owners(cx, cy, px, py, eta, threads: int = 1) -> np.ndarray:
    """Weighted-Voronoi owner index per cell (ties to lowest sensor index)."""
    cx, cy, px, py, eta = map(_f64, (cx, cy, px, py, eta))
    owner = np.empty(cx.shape[0], dtype=np.int32)

    def job(span):
        a, b = span
        owner[a:b] = _active.assign_block(cx, cy, px, py, eta, a, b)

    _run_blocks(job, _blocks(cx.shape[0]), threads)
    return owner


def partition_pass(cx, cy, f, px, py, eta, threads: int = 1):
    """Fused ownership + raw moments: (owner, sum f, sum f*x, sum f*y)."""
    cx, cy, f, px, py, eta = map(_f64, (cx, cy, f, px, py, eta))
    nsensors = px.shape[0]
    owner = np.empty(cx.shape[0], dtype=np.int32)

    def job(span):
        a, b = span
        own_blk, v, sx, sy = _active.fused_block(cx, cy, f, px, py, eta, a, b)
        owner[a:b] = own_blk
        return v, sx, sy

    parts = _run_blocks(job, _blocks(cx.shape[0]), threads)
    v = np.zeros(nsensors)
    sx = np.zeros(nsensors)
    sy = np.zeros(nsensors)
    for pv, psx, psy in parts:
        v += pv
        sx += psx
        sy += psy
    return owner, v, sx, sy


def accumulate_moments(owner, cx, cy, f, nsensors: int, threads: int = 1):
    """Raw per-sensor moments for a precomputed owner map."""
    cx, cy, f = map(_f64, (cx, cy, f))
    owner = np.ascontiguousarray(owner, dtype=np.int32)

    def job(span):
        a, b = span
        return _active.moments_block(owner, cx, cy, f, a, b, nsensors)

    parts = _run_blocks(job, _blocks(cx.shape[0]), threads)
    v = np.zeros(nsensors)
    sx = np.zeros(nsensors)
    sy = np.zeros(nsensors)
    for pv, psx, psy in parts:
        v += pv
        sx += psx
        sy += psy
    return v, sx, sy


def owned_sqdist(owner, cx, cy, f, qx, qy, threads: int = 1) -> np.ndarray:
    """Per-sensor sum of f * ||q_owner - w||^2 (raw, no cell-area factor)."""
    cx, cy, f, qx, qy = map(_f64, (cx, cy, f, qx, qy))
    owner = np.ascontiguousarray(owner, dtype=np.int32)
    nsensors = qx.shape[0]

    def job(span):
        a, b = span
        return _active.sqdist_block(owner, cx, cy, f, qx, qy, a, b, nsensors)

    parts = _run_blocks(job, _blocks(cx.shape[0]), threads)
    out = np.zeros(nsensors)
    for p in parts:
        out += p
    return out


def covered_count(cx, cy, px, py, r2, threads: int = 1) -> int:
    """Number of cells whose center lies within sqrt(r2_n) of some sensor."""
    cx, cy, px, py, r2 = map(_f64, (cx, cy, px, py, r2))

    def job(span):
        a, b = span
        return _active.coverage_block(cx, cy, px, py, r2, a, b)

    return int(sum(_run_blocks(job, _blocks(cx.shape[0]), threads)))
