import numpy as np
import pytest

from covcomp.coverage import CoverageConfig
from covcomp.scenario import (
    UAV_RADIO,
    UAV_TASKS,
    Node,
    RadioParams,
    Region,
    Scenario,
    TaskParams,
    bundled_scenario_path,
    generate_scenario,
    load_scenario,
)


def small_scenario(n, seed, side=2000.0, D=500.0, resolution=20.0, pathloss_r=3.0):
    """Random instance sized so that coverage and rate genuinely compete."""
    radio = RadioParams(
        bandwidth_B=UAV_RADIO.bandwidth_B,
        power_P=UAV_RADIO.power_P,
        noise_N0=UAV_RADIO.noise_N0,
        wavelength_lambda_c=UAV_RADIO.wavelength_lambda_c,
        ref_dist_d0=UAV_RADIO.ref_dist_d0,
        pathloss_r=pathloss_r,
    )
    return generate_scenario(
        n,
        Region.square(side),
        radio=radio,
        tasks=UAV_TASKS,
        coverage_radius_D=D,
        coverage_config=CoverageConfig(method="grid", resolution_m=resolution),
        seed=seed,
    )


def line_scenario(positions, D=1.0, bounds=(0.0, 10.0), gammas=None):
    gammas = gammas or [1.0] * len(positions)
    nodes = [Node(k + 1, (float(x),), g) for k, (x, g) in enumerate(zip(positions, gammas))]
    return Scenario(
        Region(1, (bounds,)),
        nodes,
        RadioParams(rate_override=1e6),
        TaskParams(0.5, 0.5, 1.0),
        D,
        CoverageConfig(method="exact1d", resolution_m=None),
    )


@pytest.fixture(scope="session")
def uav50():
    return load_scenario(bundled_scenario_path())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def report(criterion, ok, detail=""):
    """Record one acceptance line; shown in the terminal summary."""
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
