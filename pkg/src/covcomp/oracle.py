"""Exhaustive search over clusterings for small instances.

Finding the best coverage/rate tradeoff is NP-complete in general, so the
local search has no optimality guarantee; for a handful of nodes we can
afford to look at every clustering and use the result as ground truth.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .clustering import Clustering, Evaluation, coverage_term, evaluate, lagrangian
from .coverage import CoverageModel
from .linkmodel import build_alpha
from .pareto import FrontierPoint, pareto_indices

DEFAULT_CAP = 8


class EnumerationTooLarge(RuntimeError):
    def __init__(self, n, count, cap):
        super().__init__(f"refusing to enumerate {count} clusterings of {n} nodes (cap is n <= {cap})")
        self.n = n
        self.count = count
        self.cap = cap


def clustering_count(n):
    """Number of clusterings of ``n`` nodes: sum over m of C(n, m) * m**(n - m)."""
    return sum(math.comb(n, m) * m ** (n - m) for m in range(1, n + 1))


def enumerate_clusterings(n, cap=DEFAULT_CAP):
    """Yield every clustering of ``n`` nodes exactly once.

    Master sets come in order of size, then lexicographically; for a fixed
    master set the worker assignments run in mixed-radix order (first worker
    varies slowest).
    """
    if n > cap:
        raise EnumerationTooLarge(n, clustering_count(n), cap)
    nodes = range(n)
    for size in range(1, n + 1):
        for masters in itertools.combinations(nodes, size):
            workers = [j for j in nodes if j not in masters]
            for targets in itertools.product(masters, repeat=len(workers)):
                owner = list(range(n))
                for w, m in zip(workers, targets):
                    owner[w] = m
                yield Clustering(tuple(owner))


@dataclass
class OracleTable:
    """Evaluations of every clustering, in enumeration order."""

    clusterings: list
    evaluations: list
    area: float
    absolute_area: bool = False

    @property
    def rates(self):
        return np.array([e.rate for e in self.evaluations])

    @property
    def fractions(self):
        return np.array([e.coverage.fraction for e in self.evaluations])

    def best(self, lam):
        """Index of the Lagrangian maximiser; ties go to the earliest (fewest masters)."""
        best_k, best_L = 0, -math.inf
        for k, e in enumerate(self.evaluations):
            L = lagrangian(e.rate, coverage_term(e.coverage.fraction, self.area, self.absolute_area), lam)
            if L > best_L:
                best_k, best_L = k, L
        return best_k


def oracle_table(scenario, *, alpha=None, model=None, cap=DEFAULT_CAP, absolute_area=False) -> OracleTable:
    if alpha is None:
        alpha = build_alpha(scenario)
    if model is None:
        model = CoverageModel(scenario)
    clusterings = list(enumerate_clusterings(scenario.n, cap))
    evaluations = [evaluate(scenario, c, 0.0, model, alpha, absolute_area) for c in clusterings]
    return OracleTable(clusterings, evaluations, model.area, absolute_area)


def oracle_best(scenario, lam, *, table=None, **kwargs) -> tuple[Clustering, Evaluation]:
    """Exact maximiser of the Lagrangian at ``lam``."""
    if table is None:
        table = oracle_table(scenario, **kwargs)
    k = table.best(lam)
    e = table.evaluations[k]
    term = coverage_term(e.coverage.fraction, table.area, table.absolute_area)
    best = Evaluation(e.coverage, e.rate, lagrangian(e.rate, term, lam), float(lam), e.per_cluster_rates, table.absolute_area)
    return table.clusterings[k], best


def oracle_pareto(scenario, *, table=None, **kwargs) -> list[FrontierPoint]:
    """Exact (coverage, rate) Pareto frontier, sorted by coverage ascending."""
    if table is None:
        table = oracle_table(scenario, **kwargs)
    keep = pareto_indices(table.fractions, table.rates)
    out = []
    for k in keep:
        e = table.evaluations[k]
        c = table.clusterings[k]
        out.append(
            FrontierPoint(
                lam=None,
                coverage_fraction=e.coverage.fraction,
                coverage_abs=e.coverage.absolute,
                rate=e.rate,
                master_count=len(c.masters),
                clustering=c,
            )
        )
    return out
