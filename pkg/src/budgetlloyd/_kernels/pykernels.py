"""Pure-numpy grid kernels, the fallback when the compiled core is absent.

Every function here mirrors its Cython twin in _grid_core.pyx operation for
operation: same expression trees, same accumulation order (np.bincount adds
weights in ascending cell index, exactly like the C loops), so both backends
produce bit-identical results. Keep the two files in sync.
"""

from __future__ import annotations

import numpy as np


def assign_block(cx, cy, px, py, eta, start, end):
    """Owner indices for cells [start, end): argmin_n eta_n * ||w - p_n||^2.

    Ties go to the lowest sensor index (np.argmin returns the first minimum,
    matching a strict less-than scan).
    """
    bx = cx[start:end]
    by = cy[start:end]
    dx = bx[None, :] - px[:, None]
    dy = by[None, :] - py[:, None]
    wgt = eta[:, None] * (dx * dx + dy * dy)
    return np.argmin(wgt, axis=0).astype(np.int32)


def fused_block(cx, cy, f, px, py, eta, start, end):
    """Ownership plus raw per-sensor moments (sum f, sum f*x, sum f*y)."""
    own = assign_block(cx, cy, px, py, eta, start, end)
    n = px.shape[0]
    bx = cx[start:end]
    by = cy[start:end]
    bf = f[start:end]
    v = np.bincount(own, weights=bf, minlength=n)
    sx = np.bincount(own, weights=bf * bx, minlength=n)
    sy = np.bincount(own, weights=bf * by, minlength=n)
    return own, v, sx, sy


def moments_block(owner, cx, cy, f, start, end, nsensors):
    own = owner[start:end]
    bx = cx[start:end]
    by = cy[start:end]
    bf = f[start:end]
    v = np.bincount(own, weights=bf, minlength=nsensors)
    sx = np.bincount(own, weights=bf * bx, minlength=nsensors)
    sy = np.bincount(own, weights=bf * by, minlength=nsensors)
    return v, sx, sy


def sqdist_block(owner, cx, cy, f, qx, qy, start, end, nsensors):
    """Per-sensor sum of f * ||q_owner - w||^2 over cells [start, end)."""
    own = owner[start:end]
    dx = cx[start:end] - qx[own]
    dy = cy[start:end] - qy[own]
    w = f[start:end] * (dx * dx + dy * dy)
    return np.bincount(own, weights=w, minlength=nsensors)


def coverage_block(cx, cy, px, py, r2, start, end):
    """Number of cells in [start, end) within sqrt(r2_n) of some sensor n."""
    dx = cx[start:end][None, :] - px[:, None]
    dy = cy[start:end][None, :] - py[:, None]
    hit = (dx * dx + dy * dy) <= r2[:, None]
    return int(np.count_nonzero(hit.any(axis=0)))
