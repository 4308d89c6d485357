"""Area covered by the union of master disks, clipped to the region.

Three methods are available:

``grid``
    midpoint quadrature on a regular grid of cell centres; deterministic.
``montecarlo``
    uniform samples drawn from a seeded generator.
``exact1d``
    exact union-of-intervals length (one-dimensional regions only).

The two point-set methods share one representation: every node's disk is
stored as the indices of the quadrature points it contains, which makes
incremental updates (drop a master, swap a master) cheap. See
:class:`CoverageState`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import kernels

METHODS = ("grid", "montecarlo", "exact1d")


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class CoverageConfig:
    method: str = "grid"
    resolution_m: float | None = 25.0
    samples: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise CoverageError(f"unknown coverage method {self.method!r}; expected one of {METHODS}")
        if self.method == "grid":
            if self.resolution_m is None or not self.resolution_m > 0:
                raise CoverageError("grid coverage needs resolution_m > 0")
        elif self.method == "montecarlo":
            if self.samples is None or self.samples < 1:
                raise CoverageError("montecarlo coverage needs samples >= 1")


@dataclass(frozen=True)
class CoverageResult:
    absolute: float
    fraction: float


def _region_measure(bounds):
    return float(np.prod([hi - lo for lo, hi in bounds]))


def grid_points(bounds, resolution):
    """Cell centres of a grid tiling ``bounds`` with cells of about ``resolution``."""
    axes = []
    for lo, hi in bounds:
        cells = max(1, int(round((hi - lo) / resolution)))
        step = (hi - lo) / cells
        axes.append(lo + step * (np.arange(cells) + 0.5))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def sample_points(bounds, samples, seed):
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return rng.uniform(lo, hi, size=(samples, len(bounds)))


def interval_union_length(centers, radius, lo, hi):
    """Length of ``[lo, hi] ∩ ⋃ [c - radius, c + radius]``."""
    if len(centers) == 0:
        return 0.0
    spans = sorted((max(lo, c - radius), min(hi, c + radius)) for c in centers)
    total = 0.0
    cur_lo, cur_hi = None, None
    for a, b in spans:
        if b <= a:
            continue
        if cur_hi is None or a > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = a, b
        else:
            cur_hi = max(cur_hi, b)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


class CoverageModel:
    """Coverage evaluator bound to one scenario and one configuration.

    ``fraction(masters)`` is memoised on the master set; the memo is guarded
    by a lock so one model can be shared between threads.
    """

    def __init__(self, scenario, config: CoverageConfig | None = None):
        config = config or scenario.coverage_config
        bounds = scenario.region.bounds
        self.config = config
        self.bounds = bounds
        self.area = _region_measure(bounds)
        self.radius = float(scenario.coverage_radius_D)
        self.positions = scenario.positions
        self._memo: dict[frozenset, float] = {}
        self._lock = threading.Lock()

        if config.method == "exact1d":
            if scenario.region.dimension != 1:
                raise CoverageError("exact1d coverage is only defined for 1-D regions")
            self.points = None
            self.disks = None
            self.n_points = 0
            return

        if config.method == "grid":
            self.points = grid_points(bounds, config.resolution_m)
        else:
            self.points = sample_points(bounds, config.samples, config.seed)
        self.n_points = len(self.points)
        self.disks = [
            kernels.disk_indices(self.points, np.ascontiguousarray(p, dtype=np.float64), self.radius)
            for p in self.positions
        ]

    @property
    def point_based(self):
        return self.disks is not None

    @property
    def default_epsilon(self):
        if self.point_based:
            return 1.0 / self.n_points
        return 1e-9

    def _compute_fraction(self, masters):
        if self.point_based:
            flat = np.concatenate([self.disks[m] for m in masters])
            return kernels.union_count(self.n_points, flat) / self.n_points
        (lo, hi), = self.bounds
        centers = [float(self.positions[m][0]) for m in masters]
        return interval_union_length(centers, self.radius, lo, hi) / self.area

    def fraction(self, masters) -> float:
        key = frozenset(int(m) for m in masters)
        if not key:
            raise CoverageError("coverage needs a nonempty master set")
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        value = self._compute_fraction(sorted(key))
        with self._lock:
            self._memo.setdefault(key, value)
        return value

    def result(self, masters) -> CoverageResult:
        frac = self.fraction(masters)
        return CoverageResult(absolute=frac * self.area, fraction=frac)

    def state(self, masters) -> CoverageState:
        if self.point_based:
            return PointCoverageState(self, masters)
        return CoverageState(self, masters)


class CoverageState:
    """Mutable coverage of a master set, with what-if queries.

    The base class answers every query through the memoised
    :meth:`CoverageModel.fraction`; :class:`PointCoverageState` overrides
    them with incremental count arithmetic.
    """

    def __init__(self, model: CoverageModel, masters):
        self.model = model
        self.masters = set(int(m) for m in masters)

    def fraction(self):
        return self.model.fraction(self.masters)

    def fraction_without(self, j):
        return self.model.fraction(self.masters - {j})

    def fraction_swapped(self, out, into):
        return self.model.fraction((self.masters - {out}) | {into})

    def remove(self, j):
        self.masters.discard(j)

    def swap(self, out, into):
        self.masters.discard(out)
        self.masters.add(into)


class PointCoverageState(CoverageState):
    def __init__(self, model: CoverageModel, masters):
        super().__init__(model, masters)
        self.cnt = np.zeros(model.n_points, dtype=np.int64)
        for m in self.masters:
            kernels.add_disk(self.cnt, model.disks[m], 1)
        self.covered = int(np.count_nonzero(self.cnt))

    def fraction(self):
        return self.covered / self.model.n_points

    def fraction_without(self, j):
        lost = kernels.count_sole(self.cnt, self.model.disks[j])
        return (self.covered - lost) / self.model.n_points

    def _swap_delta(self, out, into):
        disks = self.model.disks
        lost = kernels.count_sole(self.cnt, disks[out])
        gained = kernels.count_gain_after_swap(self.cnt, disks[out], disks[into])
        return gained - lost

    def fraction_swapped(self, out, into):
        if out == into:
            return self.fraction()
        return (self.covered + self._swap_delta(out, into)) / self.model.n_points

    def remove(self, j):
        self.covered -= kernels.count_sole(self.cnt, self.model.disks[j])
        kernels.add_disk(self.cnt, self.model.disks[j], -1)
        self.masters.discard(j)

    def swap(self, out, into):
        if out == into:
            return
        self.covered += self._swap_delta(out, into)
        kernels.add_disk(self.cnt, self.model.disks[out], -1)
        kernels.add_disk(self.cnt, self.model.disks[into], 1)
        self.masters.discard(out)
        self.masters.add(into)


def coverage(scenario, masters, config: CoverageConfig | None = None) -> CoverageResult:
    """Covered measure of the region for the given master indices (0-based)."""
    masters = list(masters)
    if not masters:
        raise CoverageError("coverage needs a nonempty master set")
    n = len(scenario.nodes)
    for m in masters:
        if not 0 <= m < n:
            raise CoverageError(f"master index {m} out of range for {n} nodes")
    return CoverageModel(scenario, config).result(masters)


def covers_everything(scenario, masters, config: CoverageConfig | None = None, epsilon=None) -> bool:
    model = CoverageModel(scenario, config)
    eps = model.default_epsilon if epsilon is None else epsilon
    return model.fraction(masters) >= 1.0 - eps
