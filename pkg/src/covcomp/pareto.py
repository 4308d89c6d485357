"""Lambda sweeps of the local search and Pareto-frontier extraction."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

SWEEP_FIELDS = (
    "lambda",
    "coverage_fraction",
    "coverage_abs_m2",
    "rate_tasks_per_s",
    "master_count",
    "iterations",
    "stable",
)


def default_lambdas(lo=1e-3, hi=10.0, count=25, include_zero=True):
    """``count`` log-spaced multipliers in ``[lo, hi]``, preceded by 0."""
    grid = list(np.logspace(np.log10(lo), np.log10(hi), count))
    return ([0.0] if include_zero else []) + [float(x) for x in grid]


def pareto_indices(coverages, rates):
    """Indices of the non-dominated points, sorted by coverage ascending.

    A point is dropped when some other point has coverage and rate both at
    least as large. Exact duplicates would knock each other out under that
    rule, so one representative (the first index) is kept.
    """
    cov = np.asarray(coverages, dtype=float)
    rate = np.asarray(rates, dtype=float)
    if cov.size == 0:
        return []
    # coverage descending, then rate descending, then index ascending
    order = np.lexsort((np.arange(cov.size), -rate, -cov))
    keep = []
    best_rate = -np.inf
    prev_cov = None
    for k in order:
        if cov[k] == prev_cov:
            continue
        prev_cov = cov[k]
        if rate[k] > best_rate:
            keep.append(int(k))
            best_rate = rate[k]
    keep.reverse()
    return keep


def pareto_filter(points):
    """Non-dominated subset of ``(coverage, rate)`` pairs, coverage ascending."""
    points = list(points)
    if not points:
        return []
    idx = pareto_indices([p[0] for p in points], [p[1] for p in points])
    return [points[k] for k in idx]


def is_antichain(points):
    for a in points:
        for b in points:
            if a is not b and b[0] >= a[0] and b[1] >= a[1]:
                return False
    return True


@dataclass(frozen=True)
class FrontierPoint:
    lam: float | None
    coverage_fraction: float
    coverage_abs: float
    rate: float
    master_count: int
    clustering: object = None


@dataclass(frozen=True)
class SweepConfig:
    lambdas: tuple = field(default_factory=lambda: tuple(default_lambdas()))
    tol: float = 1e-9
    max_outer_iters: int | None = None
    restarts: int = 1
    absolute_area: bool = False
    leximin: bool = True

    def __post_init__(self):
        lams = tuple(float(x) for x in self.lambdas)
        if not lams:
            raise ValueError("the lambda grid is empty")
        if any(x < 0 for x in lams):
            raise ValueError("lambda values must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        object.__setattr__(self, "lambdas", lams)

    @classmethod
    def log_grid(cls, lo, hi, count, include_zero=False, **kwargs):
        if count < 1:
            raise ValueError("grid count must be at least 1")
        return cls(lambdas=tuple(default_lambdas(lo, hi, count, include_zero)), **kwargs)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    clustering: object
    evaluation: object
    iterations: int
    converged: bool


def sweep(scenario, config: SweepConfig, *, alpha=None, model=None) -> list[SweepRow]:
    """One local-search result per multiplier, best Lagrangian over restarts.

    Restart 0 uses the canonical scan order; restart ``k`` shuffles the scans
    with seed ``k``.
    """
    from .coverage import CoverageModel
    from .descent import DescentConfig, run_descent
    from .linkmodel import build_alpha

    if alpha is None:
        alpha = build_alpha(scenario)
    if model is None:
        model = CoverageModel(scenario)
    rows = []
    for lam in config.lambdas:
        dcfg = DescentConfig(
            lam=lam,
            tol=config.tol,
            max_outer_iters=config.max_outer_iters,
            absolute_area=config.absolute_area,
            leximin=config.leximin,
        )
        best = None
        for k in range(config.restarts):
            res = run_descent(scenario, dcfg, alpha=alpha, model=model, order_seed=None if k == 0 else k)
            if best is None or res.evaluation.lagrangian > best.evaluation.lagrangian:
                best = res
        rows.append(SweepRow(lam, best.clustering, best.evaluation, best.iterations, best.converged))
    return rows


def frontier(rows) -> list[FrontierPoint]:
    """Pareto frontier of sweep rows, coverage ascending."""
    keep = pareto_indices([r.evaluation.coverage.fraction for r in rows], [r.evaluation.rate for r in rows])
    out = []
    for k in keep:
        r = rows[k]
        e = r.evaluation
        out.append(FrontierPoint(r.lam, e.coverage.fraction, e.coverage.absolute, e.rate, len(r.clustering.masters), r.clustering))
    return out


def sweep_csv(rows, tasks, pareto=False) -> str:
    """CSV text with the sweep schema; ``pareto`` keeps only the frontier."""
    if pareto:
        rows = [rows[k] for k in pareto_indices([r.evaluation.coverage.fraction for r in rows], [r.evaluation.rate for r in rows])]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for r in rows:
        e = r.evaluation
        w.writerow(
            [
                repr(r.lam),
                repr(e.coverage.fraction),
                repr(e.coverage.absolute),
                repr(e.rate),
                len(r.clustering.masters),
                r.iterations,
                str(e.rate >= tasks.task_arrival_RT).lower(),
            ]
        )
    return buf.getvalue()
