"""Lagrangian local search over clusterings.

Starting from "every node is a master", each outer iteration runs four
scans in a fixed order:

1. merge: for masters ``i < j`` fold cluster ``j`` (master included) into
   cluster ``i`` when the Lagrangian does not drop (ties accepted, so the
   master count shrinks at equal value);
2. best master: within each cluster, promote the member that maximises the
   Lagrangian, other clusters held fixed (ties keep the current master);
3. reassign: move each worker to the cluster maximising the network rate
   (ties keep the current cluster, then prefer the lowest master index);
4. swap: exchange the clusters of two workers when the network rate
   strictly improves.

The network rate is a minimum over clusters, so from the all-masters start
it sits on a wide plateau: no single worker move raises it while two or
more singleton clusters remain. With ``leximin`` enabled (the default),
steps 3 and 4 compare the ascending-sorted vector of cluster rates
lexicographically instead of its first entry alone, so the search can fill
bottleneck clusters one at a time. The minimum never drops under either
comparison.

The loop stops when a full iteration gains less than ``tol`` and (with
``leximin``) accepted no move at all. Every accepted move is monotone in
the Lagrangian, and merge ties strictly reduce the master count, so the
search cannot cycle.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .clustering import Clustering, Evaluation, coverage_term, evaluate, lagrangian
from .coverage import CoverageConfig, CoverageModel
from .linkmodel import build_alpha


@dataclass(frozen=True)
class DescentConfig:
    lam: float = 0.0
    tol: float = 1e-9
    max_outer_iters: int | None = None
    coverage_config: CoverageConfig | None = None
    absolute_area: bool = False
    leximin: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_outer_iters is not None and self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    lagrangian: float
    rate: float
    coverage_fraction: float
    merges: int = 0
    remasters: int = 0
    reassigns: int = 0
    swaps: int = 0


TRACE_FIELDS = ("iteration", "lagrangian", "rate", "coverage_fraction", "merges", "remasters", "reassigns", "swaps")


@dataclass
class DescentTrace:
    rows: list = field(default_factory=list)

    @property
    def lagrangians(self):
        return [r.lagrangian for r in self.rows]

    def is_monotone(self):
        ls = self.lagrangians
        return all(b >= a for a, b in zip(ls, ls[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_FIELDS)
        for r in self.rows:
            w.writerow([getattr(r, f) for f in TRACE_FIELDS])
        return buf.getvalue()


class DescentResult(NamedTuple):
    clustering: Clustering
    evaluation: Evaluation
    trace: DescentTrace
    converged: bool

    @property
    def iterations(self):
        return len(self.trace.rows) - 1


class DescentState:
    """Mutable clustering with cached cluster rates and incremental coverage."""

    def __init__(self, scenario, alpha, model: CoverageModel, lam, absolute_area=False, owner=None, leximin=True):
        n = scenario.n
        self.leximin = leximin
        self.inv = 1.0 / np.asarray(alpha)
        self.lam = float(lam)
        self.area = model.area
        self.absolute_area = absolute_area
        self.owner = list(range(n)) if owner is None else list(owner)
        self.members: dict[int, list] = {}
        for j, o in enumerate(self.owner):
            self.members.setdefault(o, []).append(j)
        self.rates = {m: self.rate_of(m, mem) for m, mem in self.members.items()}
        self.cov = model.state(self.members)
        self._refresh()

    def rate_of(self, master, members):
        return math.fsum(self.inv[master, members])

    def term(self, fraction):
        return coverage_term(fraction, self.area, self.absolute_area)

    def _refresh(self):
        self._low = heapq.nsmallest(4, ((r, m) for m, r in self.rates.items()))
        self.rate = self._low[0][0]
        self.fraction = self.cov.fraction()
        self.L = lagrangian(self.rate, self.term(self.fraction), self.lam)

    def min_excluding(self, *excluded):
        # at most three exclusions, four smallest kept
        for r, m in self._low:
            if m not in excluded:
                return r
        return math.inf

    def better(self, new, old):
        """Is rate change ``new`` strictly better than ``old``?

        Both map master -> replacement rate on top of the current state. Plain
        mode compares the network rate; leximin mode compares the sorted rate
        vectors, which only differ on the clusters named in either change.
        """
        touched = set(new) | set(old)
        if self.leximin:
            a = sorted(new.get(c, self.rates[c]) for c in touched)
            b = sorted(old.get(c, self.rates[c]) for c in touched)
            return a > b
        rest = self.min_excluding(*touched)
        a = min([rest] + [new.get(c, self.rates[c]) for c in touched])
        b = min([rest] + [old.get(c, self.rates[c]) for c in touched])
        return a > b

    def clustering(self):
        return Clustering(tuple(self.owner))

    # -- mutations ---------------------------------------------------------------

    def apply_merge(self, i, j, merged, rate):
        for x in self.members.pop(j):
            self.owner[x] = i
        del self.rates[j]
        self.members[i] = merged
        self.rates[i] = rate
        self.cov.remove(j)
        self._refresh()

    def apply_remaster(self, i, j, rate):
        mem = self.members.pop(i)
        del self.rates[i]
        for x in mem:
            self.owner[x] = j
        self.members[j] = mem
        self.rates[j] = rate
        self.cov.swap(i, j)
        self._refresh()

    def apply_regroup(self, updates):
        """``updates``: {master: (new member list, new rate)}; coverage unchanged."""
        for m, (mem, rate) in updates.items():
            self.members[m] = mem
            self.rates[m] = rate
            for x in mem:
                self.owner[x] = m
        self._refresh()


def _ordered(items, rng):
    items = list(items)
    if rng is not None:
        rng.shuffle(items)
    return items


def move_merge(state: DescentState, rng=None, strict=False):
    """Scan master pairs ``i < j`` and fold ``j`` into ``i``; returns the number accepted."""
    ms = sorted(state.members)
    pairs = [(a, b) for k, a in enumerate(ms) for b in ms[k + 1:]]
    accepted = 0
    for i, j in _ordered(pairs, rng):
        if i not in state.members or j not in state.members:
            continue
        merged = sorted(state.members[i] + state.members[j])
        r_new = state.rate_of(i, merged)
        rate = min(r_new, state.min_excluding(i, j))
        L_new = lagrangian(rate, state.term(state.cov.fraction_without(j)), state.lam)
        if L_new > state.L or (not strict and L_new == state.L):
            state.apply_merge(i, j, merged, r_new)
            accepted += 1
    return accepted


def move_best_master(state: DescentState, rng=None):
    """Promote the Lagrangian-maximising member of each cluster."""
    accepted = 0
    for i in _ordered(sorted(state.members), rng):
        if i not in state.members:
            continue
        mem = state.members[i]
        rest = state.min_excluding(i)
        best_j, best_L, best_r = i, state.L, None
        for j in mem:
            if j == i:
                continue
            r = state.rate_of(j, mem)
            frac = state.cov.fraction_swapped(i, j)
            L_new = lagrangian(min(r, rest), state.term(frac), state.lam)
            if L_new > best_L:
                best_j, best_L, best_r = j, L_new, r
        if best_j != i:
            state.apply_remaster(i, best_j, best_r)
            accepted += 1
    return accepted


def move_reassign(state: DescentState, rng=None):
    """Move each worker to the cluster that maximises the network rate."""
    accepted = 0
    workers = [w for w in range(len(state.owner)) if state.owner[w] != w]
    for w in _ordered(workers, rng):
        a = state.owner[w]
        stay = [x for x in state.members[a] if x != w]
        r_a = state.rate_of(a, stay)
        best, best_m = {}, a
        for m in sorted(state.members):
            if m == a:
                continue
            cand = {a: r_a, m: state.rate_of(m, state.members[m] + [w])}
            if state.better(cand, best):
                best, best_m = cand, m
        if best_m != a:
            state.apply_regroup({a: (stay, r_a), best_m: (sorted(state.members[best_m] + [w]), best[best_m])})
            accepted += 1
    return accepted


def move_swap(state: DescentState, rng=None):
    """Exchange two workers' clusters when the network rate strictly improves."""
    accepted = 0
    workers = [w for w in range(len(state.owner)) if state.owner[w] != w]
    pairs = [(u, v) for k, u in enumerate(workers) for v in workers[k + 1:]]
    for u, v in _ordered(pairs, rng):
        a, b = state.owner[u], state.owner[v]
        if a == b:
            continue
        mem_a = sorted([x for x in state.members[a] if x != u] + [v])
        mem_b = sorted([x for x in state.members[b] if x != v] + [u])
        cand = {a: state.rate_of(a, mem_a), b: state.rate_of(b, mem_b)}
        if state.better(cand, {}):
            state.apply_regroup({a: (mem_a, cand[a]), b: (mem_b, cand[b])})
            accepted += 1
    return accepted


def run_descent(scenario, config: DescentConfig, *, alpha=None, model=None, order_seed=None) -> DescentResult:
    """Run the four-move local search from the all-masters start.

    ``order_seed`` shuffles the scan orders (used for restarts); ``None``
    keeps the canonical ascending orders.
    """
    if alpha is None:
        alpha = build_alpha(scenario)
    if model is None:
        model = CoverageModel(scenario, config.coverage_config)
    max_iters = config.max_outer_iters or 10 * scenario.n
    rng = None if order_seed is None else random.Random(order_seed)

    state = DescentState(scenario, alpha, model, config.lam, config.absolute_area, leximin=config.leximin)
    trace = DescentTrace([TraceRow(0, state.L, state.rate, state.fraction)])
    converged = False
    for it in range(1, max_iters + 1):
        before = state.L
        merges = move_merge(state, rng)
        remasters = move_best_master(state, rng)
        reassigns = move_reassign(state, rng)
        swaps = move_swap(state, rng)
        trace.rows.append(TraceRow(it, state.L, state.rate, state.fraction, merges, remasters, reassigns, swaps))
        moved = merges + remasters + reassigns + swaps
        if state.L - before < config.tol and not (config.leximin and moved):
            converged = True
            break

    clustering = state.clustering()
    evaluation = evaluate(scenario, clustering, config.lam, model, alpha, config.absolute_area)
    return DescentResult(clustering, evaluation, trace, converged)
