"""Closed-form SINR in the large-antenna limit, for every CSI scheme.

All expressions assume the per-BS transmit power is scaled down with the
antenna count (p = E / M with E fixed), under which channel vectors of
different users become orthogonal and each user's SINR converges to a
deterministic function of the large-scale gains.

Everything is computed and returned in linear scale; conversion to dB happens
only at reporting time.
"""

import numpy as np

_SIMPLEX_TOL = 1e-9

#: Returned by ceiling formulas when there is no interfering cell, in which
#: case the SINR grows without bound instead of saturating.
UNBOUNDED = np.inf


def sinr_perfect_csi(lambdas, betas_own, bs_power: float, sigma2: float) -> np.ndarray:
    """Per-user limit SINR with perfect CSI: lambda_k * E * beta_k / sigma^2.

    ``lambdas`` must be a point on the probability simplex (the normalized
    per-user shares of the beam).  With the max-min-optimal shares all K
    values are equal to E / (sigma^2 * sum_k 1/beta_k).
    """
    lam = np.asarray(lambdas, dtype=float)
    betas = np.asarray(betas_own, dtype=float)
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > _SIMPLEX_TOL:
        raise ValueError("lambdas must be nonnegative and sum to 1")
    return lam * bs_power * betas / sigma2


def _gamma_inf_sq(betas, xis, pilot_power: float, pilot_len: int, sigma_p2: float):
    """Limit of the squared normalizer of a beam built from contaminated
    per-user estimates, for every cell: sum_k xi^2 * p * tau * sum_l beta[j,l,k]
    plus the noise term."""
    xi2 = np.asarray(xis, dtype=float) ** 2  # (N, K)
    beta_sum = betas.sum(axis=1)  # (N, K): sum over transmitting cells l
    return pilot_power * pilot_len * (xi2 * beta_sum).sum(axis=1) + sigma_p2 * xi2.sum(
        axis=1
    )


def sinr_contaminated(
    betas,
    xis,
    bs_power,
    pilot_power: float,
    pilot_len: int,
    sigma_p2: float,
    sigma2: float,
    cell: int,
    user: int,
) -> float:
    """Limit SINR of user (cell, user) when beams use contaminated per-user
    channel estimates.

    ``betas`` is the full (N, N, K) gain tensor and ``xis`` the (N, K)
    combining weights of every cell.  Because all cells reuse the same pilot
    set, the beam of each interfering cell j is partially aligned with the
    victim's channel from BS j, which produces interference that scales with
    the BS power and caps the SINR.
    """
    betas = np.asarray(betas, dtype=float)
    xis = np.asarray(xis, dtype=float)
    n = betas.shape[0]
    e = np.broadcast_to(np.asarray(bs_power, dtype=float), (n,))
    gamma2 = _gamma_inf_sq(betas, xis, pilot_power, pilot_len, sigma_p2)
    coupling = pilot_power * pilot_len * betas[:, cell, user] ** 2 * xis[:, user] ** 2
    terms = e / gamma2 * coupling
    signal = terms[cell]
    interference = terms.sum() - signal
    return float(signal / (interference + sigma2))


def sinr_contamination_ceiling(
    betas,
    xis,
    pilot_power: float,
    pilot_len: int,
    sigma_p2: float,
    cell: int,
    user: int,
) -> float:
    """Large-power limit of ``sinr_contaminated`` with equal BS powers.

    Returns ``UNBOUNDED`` when there is no interfering cell.
    """
    betas = np.asarray(betas, dtype=float)
    xis = np.asarray(xis, dtype=float)
    if betas.shape[0] == 1:
        return UNBOUNDED
    gamma2 = _gamma_inf_sq(betas, xis, pilot_power, pilot_len, sigma_p2)
    coupling = betas[:, cell, user] ** 2 * xis[:, user] ** 2 / gamma2
    signal = coupling[cell]
    interference = coupling.sum() - signal
    return float(signal / interference)


def sinr_composite(
    betas_own,
    pilot_powers,
    bs_power: float,
    pilot_len: int,
    sigma_p2: float,
    sigma2: float,
) -> np.ndarray:
    """Per-user limit SINR when the beam is the estimated composite channel.

    Only the serving cell's own gains appear: the composite estimate carries
    no other-cell component, so there is no contamination term and the SINR
    keeps growing linearly with the BS power.
    """
    betas = np.asarray(betas_own, dtype=float)
    p = np.asarray(pilot_powers, dtype=float)
    denom = betas @ p + sigma_p2 / pilot_len
    return bs_power / sigma2 * betas**2 * p / denom


def sinr_composite_optimal(
    betas_own,
    peak_power: float,
    bs_power: float,
    pilot_len: int,
    sigma_p2: float,
    sigma2: float,
) -> float:
    """Common limit SINR of the composite scheme under optimal pilot powers.

    E/sigma^2 / (sum_k 1/beta_k + sigma_p^2 / (omega * beta_min^2 * p_peak));
    every user achieves this same value.
    """
    betas = np.asarray(betas_own, dtype=float)
    if np.any(betas <= 0):
        raise ValueError("all gains must be positive")
    noise_term = sigma_p2 / (pilot_len * betas.min() ** 2 * peak_power)
    return float(bs_power / sigma2 / ((1.0 / betas).sum() + noise_term))


def sinr_gap_db(betas_own, peak_power: float, pilot_len: int, sigma_p2: float) -> float:
    """dB gap between the perfect-CSI optimum and the power-controlled
    composite scheme.

    10*log10(1 + sigma_p^2 / (omega * p_peak * beta_min^2 * sum_k 1/beta_k));
    nonnegative, independent of the BS power, and shrinking as the peak pilot
    power or the pilot length grows.
    """
    betas = np.asarray(betas_own, dtype=float)
    if np.any(betas <= 0):
        raise ValueError("all gains must be positive")
    ratio = sigma_p2 / (pilot_len * peak_power * betas.min() ** 2 * (1.0 / betas).sum())
    return float(10.0 * np.log10(1.0 + ratio))


def _mu_inf_sq(betas, pilot_powers, kappas, pilot_len: int, sigma_p2: float):
    """Limit of the squared norm (per antenna) of the delay-polluted composite
    estimate at every BS: sum over all arrivals of omega * beta * p * |kappa|^2
    plus the estimation noise power."""
    k2 = np.abs(np.asarray(kappas)) ** 2  # (N, N, K)
    p = np.asarray(pilot_powers, dtype=float)  # (N, K)
    return pilot_len * (betas * p[None, :, :] * k2).sum(axis=(1, 2)) + sigma_p2


def sinr_async(
    betas,
    pilot_powers,
    kappas,
    bs_power,
    pilot_len: int,
    sigma_p2: float,
    sigma2: float,
    cell: int,
    user: int,
) -> float:
    """Limit SINR of the composite scheme under asynchronous pilot arrival.

    ``kappas[j, l, k]`` is the correlation at receiving BS j between the
    polluted pilot of user (l, k) and BS j's own pilot.  In-cell |kappa| < 1
    is a pure scaling loss; nonzero cross-cell kappas act exactly like pilot
    contamination and reintroduce a power ceiling.
    """
    betas = np.asarray(betas, dtype=float)
    p = np.asarray(pilot_powers, dtype=float)
    k2 = np.abs(np.asarray(kappas)) ** 2
    n = betas.shape[0]
    e = np.broadcast_to(np.asarray(bs_power, dtype=float), (n,))
    mu2 = _mu_inf_sq(betas, p, kappas, pilot_len, sigma_p2)
    terms = e / mu2 * betas[:, cell, user] ** 2 * k2[:, cell, user]
    signal = terms[cell]
    interference = terms.sum() - signal
    noise = sigma2 / (pilot_len * p[cell, user])
    return float(signal / (interference + noise))
