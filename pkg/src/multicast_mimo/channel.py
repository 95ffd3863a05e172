"""Large-scale and small-scale channel generation.

The channel vector from base station i to user k of cell j is
``g[i,j,k] = sqrt(beta[i,j,k]) * h[i,j,k]`` with ``beta`` the slowly varying
power gain (path loss, shadowing, penetration) and ``h`` an i.i.d. circularly
symmetric complex Gaussian vector with unit per-entry variance.

Loss terms are combined in the dB domain and converted to linear once, since
typical gains near 1e-15 would otherwise lose precision.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import CellLayout, UserPositions, distance_m
from .seeding import child_seed, make_rng
from .units import dbm_to_watts


@dataclass(frozen=True)
class FadingConfig:
    """Propagation constants. Defaults model an urban macro deployment."""

    pathloss_intercept_db: float = 128.1
    pathloss_slope: float = 37.6  # dB per decade of distance in km
    shadow_sigma_db: float = 8.0
    penetration_loss_db: float = 20.0
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 20e6
    pilot_noise_ratio: float = 0.1  # sigma_p^2 / sigma^2

    def __post_init__(self):
        for name in (
            "pathloss_intercept_db",
            "pathloss_slope",
            "shadow_sigma_db",
            "penetration_loss_db",
            "noise_psd_dbm_hz",
        ):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        if self.pilot_noise_ratio <= 0:
            raise ValueError("pilot_noise_ratio must be positive")


def noise_power(fading: FadingConfig) -> float:
    """Receiver noise power sigma^2 in Watts over the configured bandwidth."""
    return float(
        dbm_to_watts(fading.noise_psd_dbm_hz + 10.0 * np.log10(fading.bandwidth_hz))
    )


def pilot_noise_power(fading: FadingConfig) -> float:
    """Uplink pilot noise power sigma_p^2 in Watts."""
    return fading.pilot_noise_ratio * noise_power(fading)


def large_scale_gain(dist_m, fading: FadingConfig, rng_seed):
    """Linear power gain beta for one link (or one shadowing realization
    shared by an array of co-located links).

    beta = 10^(-(intercept + slope*log10(d_km) + shadow + penetration)/10),
    with shadow ~ Normal(0, shadow_sigma_db^2).  A single shadowing value is
    drawn per call and applied to every distance passed in; links that need
    independent shadowing must use distinct seeds.
    """
    d = np.asarray(dist_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    shadow_db = make_rng(rng_seed).normal(0.0, fading.shadow_sigma_db)
    loss_db = (
        fading.pathloss_intercept_db
        + fading.pathloss_slope * np.log10(d / 1000.0)
        + shadow_db
        + fading.penetration_loss_db
    )
    beta = 10.0 ** (-loss_db / 10.0)
    return float(beta) if beta.ndim == 0 else beta


def draw_small_scale(antennas: int, rng_seed) -> np.ndarray:
    """One i.i.d. CN(0, 1) fading vector of length ``antennas``."""
    if antennas < 1:
        raise ValueError(f"antennas must be >= 1, got {antennas}")
    rng = make_rng(rng_seed)
    return complex_gaussian(rng, (antennas,))


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0):
    """Circularly symmetric complex Gaussian array, per-entry variance ``variance``."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class ChannelState:
    """One realization of all BS-to-user channels.

    ``beta[i, j, k]`` is the large-scale gain and ``h[i, j, k]`` the
    small-scale vector from BS i to user k of cell j.
    """

    beta: np.ndarray  # (N, N, K)
    h: np.ndarray  # (N, N, K, M) complex

    @property
    def num_cells(self) -> int:
        return self.beta.shape[0]

    @property
    def users_per_cell(self) -> int:
        return self.beta.shape[2]

    @property
    def antennas(self) -> int:
        return self.h.shape[3]

    def vector(self, i: int, j: int, k: int) -> np.ndarray:
        """Channel vector g from BS i to user k of cell j."""
        return np.sqrt(self.beta[i, j, k]) * self.h[i, j, k]

    def g(self) -> np.ndarray:
        """Full channel tensor sqrt(beta) * h, shape (N, N, K, M)."""
        return np.sqrt(self.beta)[..., None] * self.h


# Tag for deriving independent shadowing streams from a large-scale seed.
_SHADOW_STREAM = 101


def large_scale_tensor(
    layout: CellLayout,
    positions: UserPositions,
    fading: FadingConfig,
    large_seed: int,
) -> np.ndarray:
    """Gains beta[i, j, k] for every (BS i, user k of cell j) pair.

    Shadowing is drawn once per (BS, cell) pair and shared by that cell's
    users; distances stay per-user.
    """
    n = layout.num_cells
    k = positions.pos.shape[1]
    if positions.pos.shape[0] != n:
        raise ValueError(
            f"positions cover {positions.pos.shape[0]} cells, layout has {n}"
        )
    beta = np.empty((n, n, k))
    for i in range(n):
        for j in range(n):
            d = distance_m(layout.centers[i], positions.pos[j])
            beta[i, j] = large_scale_gain(
                d, fading, child_seed(large_seed, _SHADOW_STREAM, i, j)
            )
    return beta


def assemble_channels(
    layout: CellLayout,
    positions: UserPositions,
    fading: FadingConfig,
    antennas: int,
    large_seed: int,
    small_seed: int,
) -> ChannelState:
    """Build a full ChannelState from geometry and independent seed streams.

    The large-scale and small-scale streams are independent, so the fast
    fading can be redrawn while holding ``beta`` fixed.
    """
    beta = large_scale_tensor(layout, positions, fading, large_seed)
    rng = make_rng(small_seed)
    h = complex_gaussian(rng, beta.shape + (antennas,))
    return ChannelState(beta=beta, h=h)
