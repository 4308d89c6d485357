"""Hot loops of the coverage quadrature.

Every kernel exists twice: a numba-compiled loop and a vectorised numpy
version with identical semantics. The module-level names point at whichever
backend :mod:`covcomp._jit` selected; both implementations stay reachable as
``numba_*`` / ``numpy_*`` so tests and the benchmark can compare them.

Coverage bookkeeping works on a fixed quadrature point set (grid cell
centres or Monte Carlo samples). ``cnt[p]`` is the number of current masters
whose disk contains point ``p``; a node's disk is stored as the sorted index
array of the points it contains.
"""

import numpy as np

from ._jit import USE_NUMBA, njit

# -- numpy reference path ----------------------------------------------------


def numpy_disk_indices(points, center, radius):
    diff = points - center
    d2 = np.zeros(points.shape[0])
    for k in range(points.shape[1]):
        d2 = d2 + diff[:, k] * diff[:, k]
    return np.flatnonzero(d2 <= radius * radius).astype(np.int64)


def numpy_union_count(n_points, flat_idx):
    mask = np.zeros(n_points, dtype=np.bool_)
    mask[flat_idx] = True
    return int(np.count_nonzero(mask))


def numpy_count_sole(cnt, idx):
    return int(np.count_nonzero(cnt[idx] == 1))


def numpy_count_gain_after_swap(cnt, out_idx, in_idx):
    cnt[out_idx] -= 1
    gained = int(np.count_nonzero(cnt[in_idx] == 0))
    cnt[out_idx] += 1
    return gained


def numpy_add_disk(cnt, idx, delta):
    cnt[idx] += delta


# -- numba path ----------------------------------------------------------------


@njit
def numba_disk_indices(points, center, radius):
    n, dim = points.shape
    r2 = radius * radius
    out = np.empty(n, dtype=np.int64)
    m = 0
    for p in range(n):
        d2 = 0.0
        for k in range(dim):
            dx = points[p, k] - center[k]
            d2 = d2 + dx * dx
        if d2 <= r2:
            out[m] = p
            m += 1
    return out[:m].copy()


@njit
def numba_union_count(n_points, flat_idx):
    mask = np.zeros(n_points, dtype=np.bool_)
    total = 0
    for p in flat_idx:
        if not mask[p]:
            mask[p] = True
            total += 1
    return total


@njit
def numba_count_sole(cnt, idx):
    total = 0
    for p in idx:
        if cnt[p] == 1:
            total += 1
    return total


@njit
def numba_count_gain_after_swap(cnt, out_idx, in_idx):
    for p in out_idx:
        cnt[p] -= 1
    gained = 0
    for p in in_idx:
        if cnt[p] == 0:
            gained += 1
    for p in out_idx:
        cnt[p] += 1
    return gained


@njit
def numba_add_disk(cnt, idx, delta):
    for p in idx:
        cnt[p] += delta


NUMPY_KERNELS = {
    "disk_indices": numpy_disk_indices,
    "union_count": numpy_union_count,
    "count_sole": numpy_count_sole,
    "count_gain_after_swap": numpy_count_gain_after_swap,
    "add_disk": numpy_add_disk,
}

NUMBA_KERNELS = {
    "disk_indices": numba_disk_indices,
    "union_count": numba_union_count,
    "count_sole": numba_count_sole,
    "count_gain_after_swap": numba_count_gain_after_swap,
    "add_disk": numba_add_disk,
}

_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

disk_indices = _ACTIVE["disk_indices"]
union_count = _ACTIVE["union_count"]
count_sole = _ACTIVE["count_sole"]
count_gain_after_swap = _ACTIVE["count_gain_after_swap"]
add_disk = _ACTIVE["add_disk"]
