"""Monte Carlo engine: finite-antenna trials and asymptotic experiments.

A trial draws one large-scale realization (geometry, shadowing) and one
small-scale realization (fast fading, pilot noise), runs the selected pilot
scheme, builds every cell's beamformer from its estimate (or from true CSI),
and evaluates the actual downlink SINR of the evaluated cell's users.

An experiment aggregates many trials.  With ``antennas = None`` the engine
skips fast fading entirely and evaluates the closed-form large-antenna SINR
per realization instead.

Randomness is derived from a single master seed via counter-based seed paths,
so any trial is reproducible in isolation and results do not depend on
execution order.  Within one small-scale draw the stream order is fixed:
first the full fading tensor, then one pilot noise block per base station in
cell order.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from . import asymptotic
from .beamforming import CombiningWeights, optimal_lambdas
from .channel import (
    ChannelState,
    complex_gaussian,
    large_scale_tensor,
    noise_power,
    pilot_noise_power,
)
from .config import (
    SCHEMES,
    ConfigError,
    NetworkConfig,
    serialize_config,
    validate_scheme_requirements,
)
from .geometry import build_hex_layout, drop_users
from .kernels import get_kernels
from .pilots import (
    AsyncProfile,
    async_kappas,
    make_pilot_book,
    optimal_pilot_powers,
)
from .seeding import child_seed, make_rng
from .units import linear_to_db

# Seed stream tags (stable identifiers; changing them changes every result).
_POSITIONS_STREAM = 1
_LARGE_STREAM = 2
_SMALL_STREAM = 3


@dataclass(frozen=True)
class TrialResult:
    """Downlink SINRs of the evaluated cell for one channel realization."""

    per_user_sinr_db: np.ndarray
    min_sinr_db: float
    scheme: str
    large_seed: int
    small_seed: int


@dataclass(frozen=True)
class SinrReport:
    """Aggregate of an experiment: one min-SINR sample per large-scale trial.

    Within a realization the minimum SINR is averaged over fast-fading draws
    in linear scale; across realizations the summary mean is taken over the
    per-realization dB samples, so no single lucky realization dominates.
    """

    samples_db: np.ndarray
    cdf: np.ndarray  # (n, 2): (sinr_db, probability), sorted ascending
    mean_min_sinr_db: float
    scheme: str
    fingerprint: str


def empirical_cdf(samples) -> np.ndarray:
    """Right-continuous empirical CDF as sorted (value, probability) pairs."""
    s = np.sort(np.asarray(samples, dtype=float))
    if s.size == 0:
        raise ValueError("cannot build a CDF from no samples")
    probs = np.arange(1, s.size + 1) / s.size
    return np.column_stack([s, probs])


def downlink_sinr(
    channels: ChannelState,
    beamformers,
    powers,
    sigma2: float,
    cell: int,
    user: int,
) -> float:
    """Downlink SINR of one user: serving beam power over the sum of
    other-cell beam powers plus noise.

    ``beamformers`` holds one unit-norm beam per cell, ``powers`` the per-cell
    transmit powers in Watts.  This is the direct reference evaluation; the
    trial loop uses the vectorized kernels, which must agree with it.
    """
    n = channels.num_cells
    if len(beamformers) != n or len(powers) != n:
        raise ValueError("need one beamformer and one power per cell")
    received = np.empty(n)
    for j in range(n):
        w = beamformers[j].w if hasattr(beamformers[j], "w") else beamformers[j]
        if w.shape[0] != channels.antennas:
            raise ValueError("beamformer length does not match antenna count")
        received[j] = powers[j] * np.abs(channels.vector(j, cell, user).conj() @ w) ** 2
    interference = received.sum() - received[cell]
    return float(received[cell] / (interference + sigma2))


@dataclass(frozen=True)
class _TrialContext:
    """Everything about one large-scale realization that the fast loop needs."""

    beta: np.ndarray  # (N, N, K)
    weights: np.ndarray  # (N, N, K) complex: estimate recipe incl. sqrt(beta)
    noise_combiner: np.ndarray | None  # (N, L) complex, None for perfect CSI
    eval_amp: np.ndarray  # (N, K) sqrt(beta) toward the evaluated cell
    bs_power_w: float
    sigma2: float
    sigma_p2: float
    antennas: int
    eval_cell: int


def _single_bs_power(config: NetworkConfig) -> float:
    if len(config.E_dbw) != 1:
        raise ConfigError(
            "E_dbw", "experiments need a single BS power; sweep presets iterate"
        )
    return config.bs_power_w[0]


def _large_scale_for_trial(config: NetworkConfig, large_seed: int):
    layout = build_hex_layout(config.cells, config.radius_m)
    positions = drop_users(
        layout,
        config.users_per_cell,
        config.exclusion_m,
        child_seed(large_seed, _POSITIONS_STREAM),
    )
    beta = large_scale_tensor(layout, positions, config.fading, large_seed)
    return layout, positions, beta


def _async_setup(config: NetworkConfig):
    """Pilot book, delay profile and correlation tensor for the async scheme.

    The correlations depend only on the sequences and delays, not on the
    channel realization, so they are computed once per experiment.
    """
    n, k = config.cells, config.users_per_cell
    offsets = np.asarray(config.async_offsets_s, dtype=float).reshape(n, k)
    profile = AsyncProfile.from_user_offsets(offsets, config.pilot_symbol_s)
    book = make_pilot_book(
        "per-cell", n, k, config.pilot_length, config.peak_pilot_power_w
    )
    kappas = np.stack([async_kappas(book, profile, j) for j in range(n)])
    return book, profile, kappas


def _scheme_pilot_powers(config: NetworkConfig, own: np.ndarray, controlled: bool):
    """(N, K) uplink pilot powers: closed-form rule per cell, or all-peak."""
    p_u = config.peak_pilot_power_w
    if not controlled:
        return np.full(own.shape, p_u)
    return np.stack([optimal_pilot_powers(own[j], p_u) for j in range(own.shape[0])])


def _build_trial_context(
    config: NetworkConfig,
    scheme: str,
    large_seed: int,
    kappas: np.ndarray | None = None,
) -> _TrialContext:
    if scheme not in SCHEMES:
        raise ConfigError("scheme", f"unknown scheme {scheme!r}")
    if config.antennas is None:
        raise ConfigError("antennas", "finite-antenna trials need an antenna count")
    validate_scheme_requirements(config, scheme)
    _, _, beta = _large_scale_for_trial(config, large_seed)
    n, k = config.cells, config.users_per_cell
    length = config.pilot_length
    own = np.einsum("jjk->jk", beta)  # (N, K)
    sqrt_beta = np.sqrt(beta)
    p_u = config.peak_pilot_power_w

    weights = np.zeros((n, n, k), dtype=np.complex128)
    noise_combiner = None
    if scheme == "perfect-optimal":
        for j in range(n):
            weights[j, j] = 1.0 / np.sqrt(own[j])
    elif scheme == "perfect-equal":
        for j in range(n):
            weights[j, j] = np.sqrt(own[j])
    elif scheme == "individual-pilot":
        weights = np.sqrt(p_u * length) * sqrt_beta.astype(np.complex128)
        book = make_pilot_book("per-user", n, k, length, p_u)
        combiner = book.sequences[:k].conj().sum(axis=0)
        noise_combiner = np.broadcast_to(combiner, (n, length)).copy()
    elif scheme in ("composite", "composite-power-controlled"):
        powers = _scheme_pilot_powers(
            config, own, controlled=(scheme == "composite-power-controlled")
        )
        for j in range(n):
            weights[j, j] = np.sqrt(powers[j] * length * own[j])
        book = make_pilot_book("per-cell", n, k, length, p_u, powers=powers)
        noise_combiner = book.sequences[:n].conj()
    elif scheme == "composite-async":
        if kappas is None:
            _, _, kappas = _async_setup(config)
        powers = _scheme_pilot_powers(config, own, config.async_power_control)
        weights = (
            np.sqrt(powers * length)[None, :, :] * sqrt_beta * kappas
        ).astype(np.complex128)
        book = make_pilot_book("per-cell", n, k, length, p_u, powers=powers)
        noise_combiner = book.sequences[:n].conj()

    return _TrialContext(
        beta=beta,
        weights=weights,
        noise_combiner=noise_combiner,
        eval_amp=sqrt_beta[:, 0, :],
        bs_power_w=_single_bs_power(config),
        sigma2=noise_power(config.fading),
        sigma_p2=pilot_noise_power(config.fading),
        antennas=config.antennas,
        eval_cell=0,
    )


def _eval_draw(ctx: _TrialContext, small_seed: int, kern) -> np.ndarray:
    """Per-user linear SINRs of the evaluated cell for one fast-fading draw."""
    n, _, k = ctx.beta.shape
    m = ctx.antennas
    rng = make_rng(small_seed)
    h = complex_gaussian(rng, (n, n, k, m))
    noise = None
    if ctx.noise_combiner is not None:
        length = ctx.noise_combiner.shape[1]
        noise = np.empty((n, m), dtype=np.complex128)
        for i in range(n):
            z = complex_gaussian(rng, (m, length), ctx.sigma_p2)
            noise[i] = z @ ctx.noise_combiner[i]
    beams = kern.combine(h, ctx.weights, noise)
    powers = np.full(n, ctx.bs_power_w / m)
    return kern.downlink(
        h[:, ctx.eval_cell], ctx.eval_amp, beams, powers, ctx.sigma2, ctx.eval_cell
    )


def run_trial(
    config: NetworkConfig, scheme: str, large_seed: int, small_seed: int
) -> TrialResult:
    """One finite-antenna realization: channels, pilots, beams, downlink SINR."""
    ctx = _build_trial_context(config, scheme, large_seed)
    sinr = _eval_draw(ctx, small_seed, get_kernels())
    if not np.all(np.isfinite(sinr)):
        raise ArithmeticError("non-finite SINR in trial")
    db = linear_to_db(sinr)
    return TrialResult(
        per_user_sinr_db=db,
        min_sinr_db=float(db.min()),
        scheme=scheme,
        large_seed=int(large_seed),
        small_seed=int(small_seed),
    )


def asymptotic_user_sinrs(
    config: NetworkConfig,
    scheme: str,
    beta: np.ndarray,
    kappas: np.ndarray | None = None,
) -> np.ndarray:
    """Large-antenna per-user SINRs of the evaluated cell for one realization."""
    own = beta[0, 0]
    e = _single_bs_power(config)
    sigma2 = noise_power(config.fading)
    sigma_p2 = pilot_noise_power(config.fading)
    length = config.pilot_length
    p_u = config.peak_pilot_power_w
    k = own.shape[0]
    if scheme == "perfect-optimal":
        return asymptotic.sinr_perfect_csi(optimal_lambdas(own), own, e, sigma2)
    if scheme == "perfect-equal":
        lam = CombiningWeights.from_xi(np.ones(k), own).lambdas
        return asymptotic.sinr_perfect_csi(lam, own, e, sigma2)
    if scheme == "individual-pilot":
        xis = np.ones((config.cells, k))
        return np.array(
            [
                asymptotic.sinr_contaminated(
                    beta, xis, e, p_u, length, sigma_p2, sigma2, 0, u
                )
                for u in range(k)
            ]
        )
    if scheme == "composite":
        return asymptotic.sinr_composite(
            own, np.full(k, p_u), e, length, sigma_p2, sigma2
        )
    if scheme == "composite-power-controlled":
        value = asymptotic.sinr_composite_optimal(own, p_u, e, length, sigma_p2, sigma2)
        return np.full(k, value)
    if scheme == "composite-async":
        if kappas is None:
            _, _, kappas = _async_setup(config)
        powers = _scheme_pilot_powers(
            config, np.einsum("jjk->jk", beta), config.async_power_control
        )
        return np.array(
            [
                asymptotic.sinr_async(
                    beta, powers, kappas, e, length, sigma_p2, sigma2, 0, u
                )
                for u in range(k)
            ]
        )
    raise ConfigError("scheme", f"unknown scheme {scheme!r}")


def _fingerprint(config: NetworkConfig, scheme, num_large, num_small, master_seed):
    text = serialize_config(config) + f"\n{scheme}|{num_large}|{num_small}|{master_seed}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def run_experiment(
    config: NetworkConfig,
    scheme: str | None = None,
    num_large: int | None = None,
    num_small: int | None = None,
    master_seed: int | None = None,
) -> SinrReport:
    """Aggregate min-SINR statistics over independent large-scale realizations.

    With finite antennas each realization's minimum SINR is averaged over
    ``num_small`` fast-fading draws in linear scale before conversion to dB;
    in asymptotic mode (``config.antennas is None``) the closed forms need no
    fast fading and ``num_small`` is ignored.  Seeds for trial (t, s) depend
    only on the master seed and the indices, never on execution order.
    """
    scheme = scheme if scheme is not None else config.scheme
    num_large = num_large if num_large is not None else config.num_large
    num_small = num_small if num_small is not None else config.num_small
    master_seed = master_seed if master_seed is not None else config.master_seed
    if scheme not in SCHEMES:
        raise ConfigError("scheme", f"unknown scheme {scheme!r}")
    if num_large < 1 or (config.antennas is not None and num_small < 1):
        raise ConfigError("num_large", "trial counts must be at least 1")
    validate_scheme_requirements(config, scheme)

    is_asymptotic = config.antennas is None
    kappas = None
    if scheme == "composite-async":
        _, _, kappas = _async_setup(config)
    kern = None if is_asymptotic else get_kernels()

    samples = np.empty(num_large)
    for t in range(num_large):
        large_seed = child_seed(master_seed, _LARGE_STREAM, t)
        if is_asymptotic:
            _, _, beta = _large_scale_for_trial(config, large_seed)
            per_user = asymptotic_user_sinrs(config, scheme, beta, kappas)
            samples[t] = linear_to_db(per_user.min())
        else:
            ctx = _build_trial_context(config, scheme, large_seed, kappas)
            acc = 0.0
            for s in range(num_small):
                small_seed = child_seed(master_seed, _SMALL_STREAM, t, s)
                acc += _eval_draw(ctx, small_seed, kern).min()
            samples[t] = linear_to_db(acc / num_small)

    return SinrReport(
        samples_db=samples,
        cdf=empirical_cdf(samples),
        mean_min_sinr_db=float(samples.mean()),
        scheme=scheme,
        fingerprint=_fingerprint(config, scheme, num_large, num_small, master_seed),
    )
