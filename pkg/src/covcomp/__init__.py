"""Master/worker clustering of wireless nodes: sensing coverage vs. computation rate."""

from ._jit import backend_name
from .clustering import (
    Clustering,
    Evaluation,
    Stability,
    cluster_rate,
    evaluate,
    network_rate,
    optimal_split,
    stability,
)
from .coverage import CoverageConfig, CoverageModel, CoverageResult, coverage, covers_everything
from .descent import DescentConfig, run_descent
from .framesim import simulate_frame, throughput_check
from .linkmodel import build_alpha, link_rate
from .oracle import enumerate_clusterings, oracle_best, oracle_pareto
from .pareto import SweepConfig, pareto_filter, sweep
from .scenario import Node, RadioParams, Region, Scenario, TaskParams, generate_scenario, load_scenario, save_scenario

__version__ = "0.1.0"
