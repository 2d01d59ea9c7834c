"""Uniform sampling inside polytope regions by box rejection.

A region is anything with box rows (A, C) and tree rows (T, V). Draws are
uniform over the tightest axis-aligned box implied by the unit rows of A
intersected with the ambient space, then rejected against the full row
systems.
"""

import numpy as np

from .analyzer import EPS_MEM

__all__ = ["SamplingFailure", "region_box", "sample_region", "stacked_rows"]

# give up when fewer than this fraction of draws land inside
MIN_ACCEPT_RATE = 0.01


class SamplingFailure(RuntimeError):
    """The region is too thin to sample by rejection."""


def stacked_rows(subspace, n):
    """All rows of the region as one (rows, rhs) pair of arrays."""
    parts_a, parts_c = [], []
    for rows, rhs in ((subspace.A, subspace.C), (subspace.T, subspace.V)):
        rows = np.asarray(rows, dtype=float)
        if rows.size == 0:
            continue
        parts_a.append(rows.reshape(-1, n))
        parts_c.append(np.asarray(rhs, dtype=float).ravel())
    if not parts_a:
        return np.zeros((0, n)), np.zeros(0)
    return np.vstack(parts_a), np.concatenate(parts_c)


def region_box(subspace, space):
    """Per-dimension [lo, hi] from the region's unit box rows and the space."""
    lo = space.lows.copy()
    hi = space.highs.copy()
    rows, rhs = stacked_rows(subspace, space.n)
    for a, c in zip(rows, rhs):
        nz = np.nonzero(a)[0]
        if len(nz) != 1:
            continue
        d = nz[0]
        if a[d] > 0:
            hi[d] = min(hi[d], c / a[d])
        else:
            lo[d] = max(lo[d], c / a[d])
    if np.any(lo > hi + EPS_MEM):
        raise SamplingFailure("region box is empty")
    return lo, np.maximum(lo, hi)


def _inside_mask(X, rows, rhs, tol=EPS_MEM):
    if rows.size == 0:
        return np.ones(len(X), dtype=bool)
    return np.all(X @ rows.T <= rhs + tol, axis=1)


def sample_region(subspace, space, count, rng):
    """Draw `count` uniform points inside the region, or raise SamplingFailure."""
    if count <= 0:
        raise ValueError("count must be positive")
    lo, hi = region_box(subspace, space)
    rows, rhs = stacked_rows(subspace, space.n)
    accepted = []
    draws = 0
    hard_cap = 1000 * count
    chunk = max(count, 64)
    while len(accepted) < count:
        X = lo + rng.random((chunk, space.n)) * (hi - lo)
        keep = _inside_mask(X, rows, rhs)
        accepted.extend(X[keep])
        draws += chunk
        if draws >= 10 * count and len(accepted) < MIN_ACCEPT_RATE * draws:
            raise SamplingFailure(
                f"acceptance {len(accepted)}/{draws} below {MIN_ACCEPT_RATE:.0%}")
        if draws >= hard_cap and len(accepted) < count:
            raise SamplingFailure(f"no {count} points within {hard_cap} draws")
    return np.array(accepted[:count])
