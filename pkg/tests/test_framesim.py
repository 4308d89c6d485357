import math

import numpy as np
import pytest

from covcomp.clustering import cluster_rate, optimal_split
from covcomp.framesim import schedule_csv, simulate_cluster, simulate_frame, throughput_check
from covcomp.linkmodel import build_alpha

from conftest import small_scenario

INF = math.inf


def test_singleton():
    s = simulate_frame(0, [0], [1.0], [INF], [1.0], 4e6, 0.0, T=1.0)
    assert s.tau == 1.0
    compute = [iv for iv in s.intervals if iv.phase == "compute"]
    assert [(iv.start, iv.end) for iv in compute] == [(0.0, 1.0)]
    assert all(iv.start == iv.end for iv in s.intervals if iv.phase != "compute")


def test_master_plus_worker_hand_walk():
    s = simulate_frame(0, [0, 1], [0.5, 0.5], [INF, 1e6], [1.0, 1.0], 1e6, 0.0, T=1.0)
    by = {(iv.node, iv.phase): (iv.start, iv.end) for iv in s.intervals}
    assert by[(0, "compute")] == (0.0, 0.5)
    assert by[(1, "dispatch")] == (0.0, 0.5)
    assert by[(1, "compute")] == (0.5, 1.0)
    assert by[(1, "return")] == (1.0, 1.0)
    assert s.tau == 1.0
    assert throughput_check(s) == 1.0


def test_phases_contiguous():
    s = simulate_frame(0, [0, 1, 2], [0.2, 0.3, 0.5], [INF, 2e6, 5e5], [1.0, 2.0, 0.5], 1e6, 2e5, T=3.0)
    for node in (0, 1, 2):
        ivs = sorted(s.for_node(node), key=lambda iv: ("dispatch", "compute", "return").index(iv.phase))
        assert ivs[0].start == 0.0
        assert ivs[0].end == ivs[1].start and ivs[1].end == ivs[2].start


def test_tau_matches_closed_form():
    split = [0.2, 0.3, 0.5]
    rho = [INF, 2e6, 5e5]
    gamma = [1.0, 2.0, 0.5]
    b0, b1, T = 1e6, 2e5, 3.0
    s = simulate_frame(0, [0, 1, 2], split, rho, gamma, b0, b1, T)
    expected = max(e * T * (0 if math.isinf(r) else (b0 + b1) / r) + e * T / g for e, r, g in zip(split, rho, gamma))
    assert s.tau == pytest.approx(expected, rel=1e-12)


def test_throughput_trivial():
    s = simulate_frame(0, [0], [1.0], [INF], [0.5], 1.0, 0.0, T=1.0)
    assert s.tau == 2.0
    assert throughput_check(s, 1.0) == 0.5


def test_validation():
    with pytest.raises(ValueError):
        simulate_frame(0, [0], [1.0], [INF], [1.0], 1, 0, T=0)
    with pytest.raises(ValueError):
        simulate_frame(0, [0, 1], [0.5, 0.6], [INF, 1.0], [1.0, 1.0], 1, 0)


@pytest.mark.parametrize("seed", range(5))
def test_scenario_cluster_equal_finish_and_rate(seed):
    sc = small_scenario(6, seed=seed)
    alpha = build_alpha(sc)
    members = list(range(6))
    for master in members:
        s = simulate_cluster(sc, master, members, T=1.0)
        ends = list(s.finish_times().values())
        assert max(ends) - min(ends) <= 1e-9 * max(ends)
        assert throughput_check(s) == pytest.approx(cluster_rate(master, members, alpha), rel=1e-9)


def test_T_invariance():
    sc = small_scenario(4, seed=7)
    a = simulate_cluster(sc, 0, [0, 1, 2, 3], T=1.0)
    b = simulate_cluster(sc, 0, [0, 1, 2, 3], T=2.0)
    assert b.tau == pytest.approx(2 * a.tau, rel=1e-12)
    assert throughput_check(a) == pytest.approx(throughput_check(b), rel=1e-12)


def test_unbalanced_split_is_slower(rng):
    sc = small_scenario(5, seed=3)
    members = [0, 1, 2, 3, 4]
    best = throughput_check(simulate_cluster(sc, 0, members))
    opt = optimal_split(0, members, build_alpha(sc))
    for _ in range(50):
        eps = np.clip(opt + rng.normal(0, 0.05, size=5), 1e-6, None)
        eps = eps / eps.sum()
        assert throughput_check(simulate_cluster(sc, 0, members, split=eps)) <= best * (1 + 1e-12)


def test_schedule_csv():
    s = simulate_frame(0, [0, 1], [0.5, 0.5], [INF, 1e6], [1.0, 1.0], 1e6, 0.0)
    lines = schedule_csv([s]).strip().split("\n")
    assert lines[0] == "node,phase,start_s,end_s"
    assert len(lines) == 7
    assert "2,compute,0.5,1.0" in lines
