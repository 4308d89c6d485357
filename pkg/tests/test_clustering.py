import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covcomp.clustering import (
    Clustering,
    ClusteringError,
    Evaluation,
    Stability,
    cluster_rate,
    clustering_from_topology,
    evaluate,
    max_single_master_rate,
    network_rate,
    optimal_split,
    stability,
    topology_document,
)
from covcomp.coverage import CoverageResult
from covcomp.linkmodel import build_alpha
from covcomp.scenario import TaskParams

from conftest import line_scenario, small_scenario


def simplex_grid_min_makespan(alpha_row, step):
    """Smallest max_j eps_j * alpha_j over a simplex grid (brute force)."""
    k = len(alpha_row)
    ticks = int(round(1 / step))
    best = math.inf
    for combo in itertools.product(range(ticks + 1), repeat=k - 1):
        rest = ticks - sum(combo)
        if rest < 0:
            continue
        eps = [c / ticks for c in combo] + [rest / ticks]
        best = min(best, max(e * a for e, a in zip(eps, alpha_row)))
    return best


def test_split_singleton():
    alpha = np.array([[3.0]])
    assert optimal_split(0, [0], alpha).tolist() == [1.0]


def test_split_symmetric():
    alpha = np.ones((2, 2))
    assert optimal_split(0, [0, 1], alpha).tolist() == [0.5, 0.5]


def test_split_one_two():
    alpha = np.array([[1.0, 2.0], [2.0, 1.0]])
    eps = optimal_split(0, [0, 1], alpha)
    assert eps == pytest.approx([2 / 3, 1 / 3], rel=1e-15)
    assert max(eps * alpha[0]) == pytest.approx(2 / 3, rel=1e-15)
    # grid search over eps in [0, 1] lands on the same optimum
    assert simplex_grid_min_makespan([1.0, 2.0], 1e-4) == pytest.approx(2 / 3, abs=1e-4)


def test_cluster_rate_examples():
    assert cluster_rate(0, [0], np.array([[1.0]])) == 1.0
    alpha = np.array([[1.0, 2.0], [2.0, 1.0]])
    assert cluster_rate(0, [0, 1], alpha) == 1.5


@given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_split_optimal_against_grid(alpha_row):
    alpha = np.array([alpha_row])
    members = list(range(len(alpha_row)))
    eps = optimal_split(0, members, alpha)
    assert math.fsum(eps) == pytest.approx(1.0, abs=1e-12)
    closed = 1.0 / cluster_rate(0, members, alpha)
    step = 0.02 if len(alpha_row) == 4 else 0.005
    assert simplex_grid_min_makespan(alpha_row, step) >= closed - 1e-6
    products = eps * alpha[0]
    assert np.allclose(products, products[0], rtol=1e-12, atol=0)
    assert max(products) == pytest.approx(closed, rel=1e-12)


@given(st.lists(st.floats(0.1, 10.0), min_size=2, max_size=6), st.floats(0.1, 10.0))
def test_adding_worker_increases_rate(alpha_row, extra):
    alpha = np.array([alpha_row + [extra]])
    members = list(range(len(alpha_row)))
    assert cluster_rate(0, members + [len(alpha_row)], alpha) > cluster_rate(0, members, alpha)


def test_network_rate_all_masters_unit():
    sc = line_scenario([1.0, 4.0, 8.0])
    alpha = build_alpha(sc)
    assert network_rate(Clustering.all_masters(3), alpha) == 1.0


def test_network_rate_is_min():
    alpha = np.array([[1 / 1.5, 1.0, 1.0], [1.0, 1 / 0.8, 1.0], [1.0, 1.0, 1.0]])
    c = Clustering((0, 1, 0))
    assert cluster_rate(0, [0, 2], alpha) == 2.5
    assert network_rate(c, alpha) == 0.8


def test_single_master_dominance_4_nodes():
    from covcomp.oracle import enumerate_clusterings

    sc = small_scenario(4, seed=3)
    alpha = build_alpha(sc)
    best = max(network_rate(c, alpha) for c in enumerate_clusterings(4))
    assert best == max_single_master_rate(alpha)


@pytest.mark.parametrize("seed", range(5))
def test_single_master_dominance_all_clusterings(seed):
    from covcomp.oracle import enumerate_clusterings

    sc = small_scenario(5, seed=seed)
    alpha = build_alpha(sc)
    bound = max_single_master_rate(alpha)
    for c in enumerate_clusterings(5):
        assert network_rate(c, alpha) <= bound


def test_moving_worker_to_bottleneck():
    sc = small_scenario(6, seed=11)
    alpha = build_alpha(sc)
    c = Clustering((0, 0, 0, 0, 4, 4))
    rates = {m: cluster_rate(m, mem, alpha) for m, mem in c.clusters().items()}
    low = min(rates, key=rates.get)
    high = max(rates, key=rates.get)
    w = next(j for j in c.workers(high))
    owner = list(c.owner)
    owner[w] = low
    moved = Clustering(tuple(owner))
    assert cluster_rate(low, moved.clusters()[low], alpha) >= rates[low]


def test_clustering_validation():
    with pytest.raises(ClusteringError):
        Clustering((1, 0))
    with pytest.raises(ClusteringError):
        Clustering(())
    with pytest.raises(ClusteringError):
        Clustering.from_assignment(3, [0], {1: 0})
    with pytest.raises(ClusteringError):
        Clustering.from_assignment(3, [0], {1: 0, 2: 1})
    c = Clustering.from_assignment(4, [0, 2], {1: 2, 3: 0})
    assert c.owner == (0, 2, 2, 0)
    assert c.masters == (0, 2)
    assert c.clusters() == {0: [0, 3], 2: [1, 2]}
    assert c.workers(2) == [1]


def test_evaluate_lambda_zero_and_growth():
    sc = small_scenario(4, seed=1)
    c = Clustering((0, 0, 2, 2))
    e0 = evaluate(sc, c, 0.0)
    assert e0.lagrangian == e0.rate
    e1 = evaluate(sc, c, 1.0)
    assert e1.lagrangian == e1.rate + e1.coverage.fraction
    assert evaluate(sc, c, 2.0).lagrangian >= e1.lagrangian
    assert e1.rate == min(e1.per_cluster_rates.values())


def test_evaluate_arithmetic():
    sc = line_scenario([2.5, 7.5], D=2.5)
    alpha = np.array([[1 / 0.8, 1.0], [1.0, 1 / 0.8]])
    e = evaluate(sc, Clustering.all_masters(2), 1.0, alpha=alpha)
    assert e.coverage.fraction == 1.0
    e = evaluate(sc, Clustering((0, 0)), 1.0, alpha=np.array([[1 / 0.3, 2.0], [2.0, 1.0]]))
    assert e.coverage.fraction == 0.5
    assert e.rate == pytest.approx(0.8)
    assert e.lagrangian == pytest.approx(1.3)


def test_evaluate_absolute_area():
    sc = line_scenario([2.0], D=1.0)
    e = evaluate(sc, Clustering((0,)), 0.5, absolute_area=True)
    assert e.lagrangian == e.rate + 0.5 * 2.0


def test_evaluate_negative_lambda():
    with pytest.raises(ValueError):
        evaluate(line_scenario([1.0]), Clustering((0,)), -1.0)


def _ev(rate):
    return Evaluation(CoverageResult(0.0, 0.0), rate, rate, 0.0, {0: rate})


@pytest.mark.parametrize("rate, expected", [(1.2, Stability.STABLE), (0.5985, Stability.UNSTABLE), (1.0, Stability.STABLE)])
def test_stability(rate, expected):
    assert stability(_ev(rate), TaskParams(4e6, 0, 1.0)) is expected


def test_topology_round_trip():
    sc = small_scenario(5, seed=2)
    alpha = build_alpha(sc)
    c = Clustering((0, 0, 2, 2, 0))
    doc = topology_document(sc, c, evaluate(sc, c, 0.3, alpha=alpha), alpha)
    assert doc["masters"] == [1, 3]
    assert clustering_from_topology(doc, 5) == c
    for cl in doc["clusters"]:
        assert math.fsum(cl["split"].values()) == pytest.approx(1.0, abs=1e-12)


def test_topology_unknown_node():
    doc = {"clusters": [{"master": 1, "workers": [9]}]}
    with pytest.raises(ClusteringError):
        clustering_from_topology(doc, 3)
