"""Inter-node link rates and per-pair task delay coefficients."""

import math

import numpy as np

INFINITE_RATE = math.inf


def link_rate(d, radio):
    """Achievable rate in bits/s at distance ``d`` (meters).

    Free-space style path loss with reference distance ``d0`` and exponent
    ``r``; no clamping below ``d0``. ``d == 0`` returns :data:`INFINITE_RATE`.
    """
    if d < 0:
        raise ValueError("distance must be non-negative")
    if d == 0:
        return INFINITE_RATE
    if radio.rate_override is not None:
        return radio.rate_override
    snr = _snr_at_d0(radio) * (radio.ref_dist_d0 / d) ** radio.pathloss_r
    return radio.bandwidth_B * math.log2(1.0 + snr)


def _snr_at_d0(radio):
    gain = (radio.wavelength_lambda_c / (4.0 * math.pi * radio.ref_dist_d0)) ** 2
    return radio.power_P / (radio.bandwidth_B * radio.noise_N0) * gain


def pairwise_distances(positions):
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def rate_matrix(scenario):
    """``rho_ij`` in bits/s with ``inf`` on the diagonal and at zero distance."""
    dist = pairwise_distances(scenario.positions)
    rho = np.full_like(dist, INFINITE_RATE)
    far = dist > 0
    radio = scenario.radio
    if radio.rate_override is not None:
        rho[far] = radio.rate_override
    else:
        snr = _snr_at_d0(radio) * (radio.ref_dist_d0 / dist[far]) ** radio.pathloss_r
        rho[far] = radio.bandwidth_B * np.log2(1.0 + snr)
    return rho


def comm_seconds_per_task(scenario):
    """``(b0 + b1) / rho_ij`` for every pair; exactly 0 where the rate is infinite."""
    bits = scenario.tasks.b0_bits + scenario.tasks.b1_bits
    return bits / rate_matrix(scenario)


def build_alpha(scenario):
    """Seconds per task when master ``i`` hands a task to member ``j``.

    ``alpha[i, j] = (b0 + b1) / rho_ij + 1 / gamma_j`` and ``alpha[i, i] =
    1 / gamma_i``. Rows index the master. The result is read-only.
    """
    alpha = comm_seconds_per_task(scenario) + 1.0 / scenario.gammas[None, :]
    np.fill_diagonal(alpha, 1.0 / scenario.gammas)
    alpha.setflags(write=False)
    return alpha
