"""Problem instances: region, nodes, radio and task parameters.

Scenario files are JSON documents::

    {
      "region":   {"dimension": 2, "bounds": [[0, 10000], [0, 10000]]},
      "nodes":    [{"id": 1, "pos": [x, y], "gamma": 0.185}, ...],
      "radio":    {"B_hz": 1e6, "P_dBm": 0, "N0_dBm_per_hz": -170,
                   "lambda_c_m": 0.333, "d0_m": 10, "pathloss_r": 3},
      "tasks":    {"b0_bits": 4e6, "b1_bits": 0, "RT": 1},
      "coverage": {"D_m": 2000, "method": "grid", "resolution_m": 25}
    }

``radio`` may also carry ``rate_override_bps``, a constant link rate used for
every pair of distinct nodes in place of the path-loss model. Unknown keys
anywhere are rejected.

Node ids in files are 1-based; in memory nodes are addressed by their
0-based position in :attr:`Scenario.nodes`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .coverage import CoverageConfig, CoverageError


class ScenarioError(ValueError):
    """Malformed or invalid scenario."""


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class Region:
    dimension: int
    bounds: tuple

    def __post_init__(self):
        if self.dimension == 3:
            raise ScenarioError("3-D regions are not supported")
        if self.dimension not in (1, 2):
            raise ScenarioError(f"dimension must be 1 or 2, got {self.dimension}")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(bounds) != self.dimension:
            raise ScenarioError(f"region has dimension {self.dimension} but {len(bounds)} axis intervals")
        for lo, hi in bounds:
            if not lo < hi:
                raise ScenarioError(f"empty region interval [{lo}, {hi}]")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def square(cls, side_m, dimension=2):
        return cls(dimension, ((0.0, float(side_m)),) * dimension)

    @property
    def measure(self):
        return math.prod(hi - lo for lo, hi in self.bounds)

    def contains(self, point):
        return all(lo <= x <= hi for x, (lo, hi) in zip(point, self.bounds))


@dataclass(frozen=True)
class Node:
    id: int
    position: tuple
    gamma: float


@dataclass(frozen=True)
class RadioParams:
    """Link-budget parameters in linear units (Hz, W, W/Hz, m)."""

    bandwidth_B: float = 1e6
    power_P: float = 1e-3
    noise_N0: float = 1e-20
    wavelength_lambda_c: float = 1.0 / 3.0
    ref_dist_d0: float = 10.0
    pathloss_r: float = 3.0
    rate_override: float | None = None

    def __post_init__(self):
        for name in ("bandwidth_B", "power_P", "noise_N0", "wavelength_lambda_c", "ref_dist_d0", "pathloss_r"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ScenarioError(f"radio parameter {name} must be positive and finite, got {value}")
        if self.rate_override is not None and not self.rate_override > 0:
            raise ScenarioError("rate_override must be positive")


@dataclass(frozen=True)
class TaskParams:
    b0_bits: float = 4e6
    b1_bits: float = 0.0
    task_arrival_RT: float = 1.0

    def __post_init__(self):
        if self.b0_bits < 0 or self.b1_bits < 0:
            raise ScenarioError("task sizes b0_bits and b1_bits must be non-negative")
        if not self.task_arrival_RT > 0:
            raise ScenarioError("task arrival rate RT must be positive")


@dataclass(frozen=True)
class Scenario:
    region: Region
    nodes: tuple
    radio: RadioParams
    tasks: TaskParams
    coverage_radius_D: float
    coverage_config: CoverageConfig = field(default_factory=CoverageConfig)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise ScenarioError("scenario needs at least one node")
        if not self.coverage_radius_D > 0:
            raise ScenarioError("coverage radius D must be positive")
        if self.tasks.b0_bits + self.tasks.b1_bits == 0 and self.radio.rate_override is None:
            raise ScenarioError("b0_bits + b1_bits must be positive unless rate_override_bps is given")
        if self.coverage_config.method == "exact1d" and self.region.dimension != 1:
            raise ScenarioError("exact1d coverage requires a 1-D region")
        for k, node in enumerate(self.nodes, start=1):
            if node.id != k:
                raise ScenarioError(f"node ids must be 1..n in order; found id {node.id} at position {k}")
            if len(node.position) != self.region.dimension:
                raise ScenarioError(f"node {node.id} position has wrong dimension")
            if not all(math.isfinite(x) for x in node.position) or not self.region.contains(node.position):
                raise ScenarioError(f"node {node.id}: position outside region")
            if not (node.gamma > 0 and math.isfinite(node.gamma)):
                raise ScenarioError(f"node {node.id}: gamma must be positive")

    @property
    def n(self):
        return len(self.nodes)

    @cached_property
    def positions(self):
        arr = np.array([node.position for node in self.nodes], dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def gammas(self):
        arr = np.array([node.gamma for node in self.nodes], dtype=np.float64)
        arr.setflags(write=False)
        return arr

    def with_radio(self, **changes):
        return replace(self, radio=replace(self.radio, **changes))

    def with_coverage(self, config: CoverageConfig):
        return replace(self, coverage_config=config)


# Constants of the UAV surveillance setting: 10 km square, 2 km sensing
# radius, 900 MHz carrier, one task = one second of 720p video.
UAV_RADIO = RadioParams(
    bandwidth_B=1e6,
    power_P=dbm_to_watts(0.0),
    noise_N0=dbm_to_watts(-170.0),
    wavelength_lambda_c=1.0 / 3.0,
    ref_dist_d0=10.0,
    pathloss_r=3.0,
)
UAV_TASKS = TaskParams(b0_bits=4e6, b1_bits=0.0, task_arrival_RT=1.0)
UAV_GAMMA = 1.0 / 5.4
UAV_D = 2000.0
UAV_SIDE = 10_000.0


def generate_scenario(
    n,
    region: Region,
    radio: RadioParams = UAV_RADIO,
    tasks: TaskParams = UAV_TASKS,
    coverage_radius_D=UAV_D,
    gamma=UAV_GAMMA,
    coverage_config: CoverageConfig | None = None,
    seed=0,
) -> Scenario:
    """Scenario with ``n`` nodes placed uniformly at random in ``region``."""
    if n < 1:
        raise ScenarioError("n must be at least 1")
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in region.bounds])
    hi = np.array([b[1] for b in region.bounds])
    pos = rng.uniform(lo, hi, size=(n, region.dimension))
    nodes = [Node(k + 1, tuple(float(x) for x in pos[k]), float(gamma)) for k in range(n)]
    return Scenario(region, nodes, radio, tasks, float(coverage_radius_D), coverage_config or CoverageConfig())


# -- file format -----------------------------------------------------------------

_TOP_KEYS = {"region", "nodes", "radio", "tasks", "coverage"}
_REGION_KEYS = {"dimension", "bounds"}
_NODE_KEYS = {"id", "pos", "gamma"}
_RADIO_KEYS = {"B_hz", "P_dBm", "N0_dBm_per_hz", "lambda_c_m", "d0_m", "pathloss_r"}
_RADIO_OPTIONAL = {"rate_override_bps"}
_TASK_KEYS = {"b0_bits", "b1_bits", "RT"}
_COVERAGE_KEYS = {"D_m", "method"}
_COVERAGE_OPTIONAL = {"resolution_m", "samples", "seed"}


def _check_keys(where, obj, required, optional=frozenset()):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = set(obj) - required - optional
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioError(f"{where}: missing keys {sorted(missing)}")


def scenario_from_dict(doc) -> Scenario:
    _check_keys("scenario", doc, _TOP_KEYS)
    reg = doc["region"]
    _check_keys("region", reg, _REGION_KEYS)
    region = Region(int(reg["dimension"]), tuple(tuple(b) for b in reg["bounds"]))

    if not isinstance(doc["nodes"], list):
        raise ScenarioError("nodes: expected a list")
    nodes = []
    for k, nd in enumerate(doc["nodes"]):
        _check_keys(f"nodes[{k}]", nd, _NODE_KEYS)
        nodes.append(Node(int(nd["id"]), tuple(float(x) for x in nd["pos"]), float(nd["gamma"])))

    rd = doc["radio"]
    _check_keys("radio", rd, _RADIO_KEYS, _RADIO_OPTIONAL)
    radio = RadioParams(
        bandwidth_B=float(rd["B_hz"]),
        power_P=dbm_to_watts(float(rd["P_dBm"])),
        noise_N0=dbm_to_watts(float(rd["N0_dBm_per_hz"])),
        wavelength_lambda_c=float(rd["lambda_c_m"]),
        ref_dist_d0=float(rd["d0_m"]),
        pathloss_r=float(rd["pathloss_r"]),
        rate_override=None if rd.get("rate_override_bps") is None else float(rd["rate_override_bps"]),
    )

    tk = doc["tasks"]
    _check_keys("tasks", tk, _TASK_KEYS)
    tasks = TaskParams(float(tk["b0_bits"]), float(tk["b1_bits"]), float(tk["RT"]))

    cv = doc["coverage"]
    _check_keys("coverage", cv, _COVERAGE_KEYS, _COVERAGE_OPTIONAL)
    try:
        config = CoverageConfig(
            method=cv["method"],
            resolution_m=cv.get("resolution_m", 25.0 if cv["method"] == "grid" else None),
            samples=cv.get("samples"),
            seed=cv.get("seed"),
        )
    except CoverageError as exc:
        raise ScenarioError(f"coverage: {exc}") from None
    return Scenario(region, nodes, radio, tasks, float(cv["D_m"]), config)


def scenario_to_dict(scenario: Scenario) -> dict:
    radio = scenario.radio
    rd = {
        "B_hz": radio.bandwidth_B,
        "P_dBm": watts_to_dbm(radio.power_P),
        "N0_dBm_per_hz": watts_to_dbm(radio.noise_N0),
        "lambda_c_m": radio.wavelength_lambda_c,
        "d0_m": radio.ref_dist_d0,
        "pathloss_r": radio.pathloss_r,
    }
    if radio.rate_override is not None:
        rd["rate_override_bps"] = radio.rate_override
    cfg = scenario.coverage_config
    cv = {"D_m": scenario.coverage_radius_D, "method": cfg.method}
    if cfg.method == "grid":
        cv["resolution_m"] = cfg.resolution_m
    elif cfg.method == "montecarlo":
        cv["samples"] = cfg.samples
        cv["seed"] = cfg.seed
    return {
        "region": {"dimension": scenario.region.dimension, "bounds": [list(b) for b in scenario.region.bounds]},
        "nodes": [{"id": nd.id, "pos": list(nd.position), "gamma": nd.gamma} for nd in scenario.nodes],
        "radio": rd,
        "tasks": {"b0_bits": scenario.tasks.b0_bits, "b1_bits": scenario.tasks.b1_bits, "RT": scenario.tasks.task_arrival_RT},
        "coverage": cv,
    }


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def save_scenario(scenario: Scenario, path):
    Path(path).write_text(dumps_scenario(scenario))


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from None
    return scenario_from_dict(doc)


def bundled_scenario_path(name="uav50.json") -> Path:
    return Path(__file__).parent / "data" / name
