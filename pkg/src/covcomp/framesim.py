"""Event-driven simulation of one frame of a cluster.

At time 0 the master starts computing its own share and, over orthogonal
channels, starts sending every worker its task data. A worker computes once
all of its data has arrived and returns its outputs when done. The frame
ends when the last output reaches the master.

This walks the events one by one instead of evaluating a closed form, so
it serves as an independent check on the analytical cluster rate.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field

PHASES = ("dispatch", "compute", "return")


@dataclass(frozen=True)
class PhaseInterval:
    node: int
    phase: str
    start: float
    end: float


@dataclass
class FrameSchedule:
    master: int
    T: float
    intervals: list = field(default_factory=list)

    @property
    def tau(self):
        return max(self.finish_times().values())

    def finish_times(self):
        """Time at which each member's last phase ends."""
        out = {}
        for iv in self.intervals:
            out[iv.node] = max(out.get(iv.node, 0.0), iv.end)
        return out

    def for_node(self, node):
        return [iv for iv in self.intervals if iv.node == node]


def simulate_frame(master, members, split, rho, gamma, b0, b1, T=1.0) -> FrameSchedule:
    """Schedule of one frame.

    ``split[k]``, ``rho[k]`` and ``gamma[k]`` belong to ``members[k]``;
    ``rho`` is the link rate to the master in bits/s (``inf`` for the master
    itself). ``T`` is the number of tasks in the frame.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if abs(math.fsum(split) - 1.0) > 1e-9:
        raise ValueError("split must sum to 1")

    sched = FrameSchedule(master, float(T))
    events = []
    seq = 0
    for node, eps, r, g in zip(members, split, rho, gamma):
        tasks = eps * T
        dispatch = 0.0 if math.isinf(r) else tasks * b0 / r
        ret = 0.0 if math.isinf(r) else tasks * b1 / r
        ctx = {"tasks": tasks, "gamma": g, "ret": ret}
        heapq.heappush(events, (dispatch, seq, node, "dispatch", 0.0, ctx))
        seq += 1

    while events:
        t, _, node, phase, start, ctx = heapq.heappop(events)
        sched.intervals.append(PhaseInterval(node, phase, start, t))
        if phase == "dispatch":
            nxt, dur = "compute", ctx["tasks"] / ctx["gamma"]
        elif phase == "compute":
            nxt, dur = "return", ctx["ret"]
        else:
            continue
        heapq.heappush(events, (t + dur, seq, node, nxt, t, ctx))
        seq += 1
    return sched


def throughput_check(schedule: FrameSchedule, T=None):
    """Tasks per second sustained by the simulated frame."""
    T = schedule.T if T is None else T
    return T / schedule.tau


def simulate_cluster(scenario, master, members, split=None, T=1.0, rho=None):
    """Simulate one cluster of ``scenario``; ``split`` defaults to the optimal one."""
    from .clustering import optimal_split
    from .linkmodel import build_alpha, rate_matrix

    if rho is None:
        rho = rate_matrix(scenario)
    if split is None:
        split = optimal_split(master, members, build_alpha(scenario))
    return simulate_frame(
        master,
        list(members),
        [float(e) for e in split],
        [float(rho[master, j]) for j in members],
        [float(scenario.gammas[j]) for j in members],
        scenario.tasks.b0_bits,
        scenario.tasks.b1_bits,
        T,
    )


def schedule_csv(schedules, id_offset=1) -> str:
    """Event rows ``node,phase,start_s,end_s`` (node ids shifted by ``id_offset``)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("node", "phase", "start_s", "end_s"))
    for sched in schedules:
        for iv in sched.intervals:
            w.writerow((iv.node + id_offset, iv.phase, repr(iv.start), repr(iv.end)))
    return buf.getvalue()
