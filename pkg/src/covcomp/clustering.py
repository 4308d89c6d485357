"""Clusterings, optimal task splits, rates and the Lagrangian.

A clustering is stored as an ``owner`` vector: ``owner[j]`` is the master
of node ``j`` and ``owner[m] == m`` exactly for masters. Every node is
either a master or a worker; an idle node could always be attached as a
worker without lowering any rate, so nothing is lost by requiring it.

Cluster rates are summed with :func:`math.fsum`. The correctly rounded sum
does not depend on member order, so the descent and the exhaustive oracle
produce bit-identical rates for the same cluster.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .coverage import CoverageModel, CoverageResult


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class Clustering:
    owner: tuple

    def __post_init__(self):
        owner = tuple(int(o) for o in self.owner)
        n = len(owner)
        if n == 0:
            raise ClusteringError("empty clustering")
        for j, o in enumerate(owner):
            if not 0 <= o < n:
                raise ClusteringError(f"node {j} assigned to unknown node {o}")
            if owner[o] != o:
                raise ClusteringError(f"node {j} assigned to {o}, which is not a master")
        object.__setattr__(self, "owner", owner)

    @classmethod
    def from_assignment(cls, n, masters, assignment):
        """Build from a master list and a ``{worker: master}`` mapping."""
        owner = [-1] * n
        for m in masters:
            owner[m] = m
        for w, m in assignment.items():
            if owner[w] != -1:
                raise ClusteringError(f"node {w} is both a master and a worker, or assigned twice")
            if m not in masters:
                raise ClusteringError(f"node {w} assigned to non-master {m}")
            owner[w] = m
        missing = [j for j, o in enumerate(owner) if o == -1]
        if missing:
            raise ClusteringError(f"nodes {missing} are neither masters nor workers")
        return cls(tuple(owner))

    @classmethod
    def all_masters(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def single_master(cls, n, master):
        return cls((master,) * n)

    @property
    def n(self):
        return len(self.owner)

    @property
    def masters(self):
        return tuple(j for j, o in enumerate(self.owner) if o == j)

    def clusters(self):
        """``{master: [members...]}`` with members ascending (master included)."""
        out = {m: [] for m in self.masters}
        for j, o in enumerate(self.owner):
            out[o].append(j)
        return out

    def workers(self, master):
        return [j for j, o in enumerate(self.owner) if o == master and j != master]


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class Evaluation:
    coverage: CoverageResult
    rate: float
    lagrangian: float
    lam: float
    per_cluster_rates: dict
    absolute_area: bool = False


def optimal_split(master, members, alpha):
    """Fractions proportional to ``1 / alpha[master, j]``, normalised to 1."""
    inv = 1.0 / alpha[master, list(members)]
    return inv / math.fsum(inv)


def cluster_rate(master, members, alpha):
    """Tasks/second of a cluster under its optimal split."""
    return math.fsum(1.0 / alpha[master, list(members)])


def network_rate(clustering: Clustering, alpha):
    return min(cluster_rate(m, mem, alpha) for m, mem in clustering.clusters().items())


def coverage_term(fraction, area, absolute_area=False):
    return fraction * area if absolute_area else fraction


def lagrangian(rate, cov_term, lam):
    return rate + lam * cov_term


def evaluate(scenario, clustering: Clustering, lam, coverage=None, alpha=None, absolute_area=False) -> Evaluation:
    """Coverage, rate and Lagrangian of ``clustering`` at multiplier ``lam``.

    ``coverage`` may be a :class:`CoverageModel` (reused, memoised), a
    :class:`CoverageConfig`, or ``None`` for the scenario's own config.
    The coverage term of the Lagrangian is the covered fraction unless
    ``absolute_area`` is set.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if clustering.n != scenario.n:
        raise ClusteringError(f"clustering has {clustering.n} nodes, scenario has {scenario.n}")
    model = coverage if isinstance(coverage, CoverageModel) else CoverageModel(scenario, coverage)
    if alpha is None:
        from .linkmodel import build_alpha

        alpha = build_alpha(scenario)
    rates = {m: cluster_rate(m, mem, alpha) for m, mem in clustering.clusters().items()}
    cov = model.result(clustering.masters)
    rate = min(rates.values())
    term = coverage_term(cov.fraction, model.area, absolute_area)
    return Evaluation(cov, rate, lagrangian(rate, term, lam), float(lam), rates, absolute_area)


def stability(evaluation: Evaluation, tasks) -> Stability:
    return Stability.STABLE if evaluation.rate >= tasks.task_arrival_RT else Stability.UNSTABLE


def max_single_master_rate(alpha):
    """``max_i sum_j 1/alpha_ij``: the best rate any clustering can reach."""
    n = alpha.shape[0]
    return max(cluster_rate(i, range(n), alpha) for i in range(n))


def topology_document(scenario, clustering: Clustering, evaluation: Evaluation, alpha):
    """JSON-ready description of a clustering (1-based node ids)."""
    clusters = []
    for m, members in clustering.clusters().items():
        split = optimal_split(m, members, alpha)
        clusters.append(
            {
                "master": m + 1,
                "workers": [j + 1 for j in members if j != m],
                "split": {str(j + 1): float(e) for j, e in zip(members, split)},
                "rate_tasks_per_s": evaluation.per_cluster_rates[m],
            }
        )
    return {
        "n": scenario.n,
        "masters": [m + 1 for m in clustering.masters],
        "clusters": clusters,
        "evaluation": {
            "lambda": evaluation.lam,
            "coverage_fraction": evaluation.coverage.fraction,
            "coverage_abs_m2": evaluation.coverage.absolute,
            "rate_tasks_per_s": evaluation.rate,
            "lagrangian": evaluation.lagrangian,
            "absolute_area": evaluation.absolute_area,
            "stable": stability(evaluation, scenario.tasks) is Stability.STABLE,
        },
    }


def clustering_from_topology(doc, n) -> Clustering:
    """Inverse of :func:`topology_document` for the clustering part."""
    try:
        clusters = [(cl["master"], list(cl["workers"])) for cl in doc["clusters"]]
    except (KeyError, TypeError) as exc:
        raise ClusteringError(f"malformed topology: missing or invalid field {exc}") from None
    masters = []
    assignment = {}
    for master, workers in clusters:
        m = int(master) - 1
        if not 0 <= m < n:
            raise ClusteringError(f"unknown node id {master}")
        masters.append(m)
        for w in workers:
            w = int(w) - 1
            if not 0 <= w < n:
                raise ClusteringError(f"unknown node id {w + 1}")
            if w in assignment:
                raise ClusteringError(f"node id {w + 1} appears in two clusters")
            assignment[w] = m
    return Clustering.from_assignment(n, masters, assignment)
