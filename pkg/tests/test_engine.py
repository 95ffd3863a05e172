import numpy as np
import pytest

import multicast_mimo.engine as engine
from multicast_mimo.beamforming import (
    beamformer_from_estimate,
    combine_beamformer,
    optimal_beamformer_perfect,
)
from multicast_mimo.channel import (
    ChannelState,
    FadingConfig,
    assemble_channels,
    complex_gaussian,
    noise_power,
    pilot_noise_power,
)
from multicast_mimo.config import ConfigError, NetworkConfig
from multicast_mimo.engine import (
    downlink_sinr,
    empirical_cdf,
    run_experiment,
    run_trial,
)
from multicast_mimo.geometry import build_hex_layout, drop_users
from multicast_mimo.pilots import (
    estimate_composite,
    estimate_individual,
    make_pilot_book,
    optimal_pilot_powers,
    uplink_rx,
)
from multicast_mimo.seeding import make_rng


class TestEmpiricalCdf:
    def test_single_sample(self):
        assert np.allclose(empirical_cdf([5.0]), [[5.0, 1.0]])

    def test_quartiles(self):
        cdf = empirical_cdf([1.0, 2.0, 3.0, 4.0])
        assert np.allclose(cdf[:, 1], [0.25, 0.5, 0.75, 1.0])
        assert np.allclose(cdf[:, 0], [1, 2, 3, 4])

    def test_permutation_invariant(self):
        a = empirical_cdf([3.0, 1.0, 2.0])
        b = empirical_cdf([2.0, 3.0, 1.0])
        assert np.array_equal(a, b)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            empirical_cdf([])


class TestDownlinkSinr:
    def make_state(self, rng, n=3, k=2, m=24):
        beta = rng.lognormal(0, 1, (n, n, k)) * 1e-12
        h = complex_gaussian(rng, (n, n, k, m))
        return ChannelState(beta=beta, h=h)

    def test_single_cell_formula(self):
        rng = np.random.default_rng(0)
        cs = self.make_state(rng, n=1)
        bf = optimal_beamformer_perfect(
            np.stack([cs.vector(0, 0, k) for k in range(2)]), cs.beta[0, 0]
        )
        sigma2 = 1e-13
        value = downlink_sinr(cs, [bf], [0.5], sigma2, 0, 1)
        expect = 0.5 * abs(np.vdot(cs.vector(0, 0, 1), bf.w)) ** 2 / sigma2
        assert value == pytest.approx(expect, rel=1e-12)

    def test_orthogonal_beam_gives_zero(self):
        rng = np.random.default_rng(1)
        cs = self.make_state(rng, n=1, k=1, m=8)
        g = cs.vector(0, 0, 0)
        w = np.zeros_like(g)
        w[0], w[1] = g[1].conj(), -g[0].conj()
        w /= np.linalg.norm(w)
        bf = beamformer_from_estimate(w)
        assert downlink_sinr(cs, [bf], [1.0], 1e-13, 0, 0) < 1e-12

    def test_matches_explicit_sum_reimplementation(self):
        rng = np.random.default_rng(2)
        cs = self.make_state(rng)
        beams = [
            combine_beamformer(
                np.stack([cs.vector(j, j, k) for k in range(2)]), rng.uniform(0.1, 1, 2), cell=j
            )
            for j in range(3)
        ]
        powers = rng.uniform(0.1, 1.0, 3)
        sigma2 = 3e-13
        for user in range(2):
            value = downlink_sinr(cs, beams, powers, sigma2, 0, user)
            num = 0.0
            den = sigma2
            for j in range(3):
                dot = 0.0 + 0.0j
                for t in range(cs.antennas):
                    dot += np.conj(cs.vector(j, 0, user)[t]) * beams[j].w[t]
                term = powers[j] * abs(dot) ** 2
                if j == 0:
                    num = term
                else:
                    den += term
            assert value == pytest.approx(num / den, rel=1e-12)


def explicit_trial_minimum(config, scheme, large_seed, small_seed):
    """Re-run one trial through the public pilot/beamforming ops only."""
    layout, positions, beta = engine._large_scale_for_trial(config, large_seed)
    n, k, m = config.cells, config.users_per_cell, config.antennas
    rng = make_rng(small_seed)
    h = complex_gaussian(rng, (n, n, k, m))
    cs = ChannelState(beta=beta, h=h)
    sigma2 = noise_power(config.fading)
    sigma_p2 = pilot_noise_power(config.fading)
    p_u = config.peak_pilot_power_w
    own = np.einsum("jjk->jk", beta)
    profile = None
    if scheme == "individual-pilot":
        book = make_pilot_book("per-user", n, k, config.pilot_length, p_u)
    elif scheme == "composite":
        book = make_pilot_book("per-cell", n, k, config.pilot_length, p_u)
    elif scheme == "composite-power-controlled":
        powers = np.stack([optimal_pilot_powers(own[j], p_u) for j in range(n)])
        book = make_pilot_book("per-cell", n, k, config.pilot_length, p_u, powers=powers)
    elif scheme == "composite-async":
        from multicast_mimo.pilots import AsyncProfile

        offsets = np.asarray(config.async_offsets_s).reshape(n, k)
        profile = AsyncProfile.from_user_offsets(offsets, config.pilot_symbol_s)
        if config.async_power_control:
            powers = np.stack([optimal_pilot_powers(own[j], p_u) for j in range(n)])
        else:
            powers = np.full((n, k), p_u)
        book = make_pilot_book("per-cell", n, k, config.pilot_length, p_u, powers=powers)
    else:
        raise ValueError(scheme)

    beams = []
    for j in range(n):
        y = uplink_rx(cs, book, j, sigma_p2, rng, async_profile=profile)
        if scheme == "individual-pilot":
            est = sum(estimate_individual(y, book, kk) for kk in range(k))
        else:
            est = estimate_composite(y, book, j)
        beams.append(beamformer_from_estimate(est, cell=j))
    p = np.full(n, config.bs_power_w[0] / m)
    values = [downlink_sinr(cs, beams, p, sigma2, 0, kk) for kk in range(k)]
    return 10 * np.log10(min(values))


class TestRunTrial:
    def test_deterministic(self):
        config = NetworkConfig(antennas=32)
        a = run_trial(config, "composite", 5, 6)
        b = run_trial(config, "composite", 5, 6)
        assert np.array_equal(a.per_user_sinr_db, b.per_user_sinr_db)
        assert a.min_sinr_db == b.min_sinr_db

    def test_min_is_minimum_and_finite(self):
        config = NetworkConfig(antennas=32)
        result = run_trial(config, "perfect-optimal", 1, 2)
        assert result.min_sinr_db == result.per_user_sinr_db.min()
        assert np.all(np.isfinite(result.per_user_sinr_db))

    def test_requires_finite_antennas(self):
        with pytest.raises(ConfigError):
            run_trial(NetworkConfig(antennas=None), "perfect-optimal", 1, 2)

    def test_single_user_single_cell_near_asymptote(self):
        config = NetworkConfig(cells=1, users_per_cell=1, antennas=10_000, E_dbw=(10.0,))
        _, _, beta = engine._large_scale_for_trial(config, 3)
        asym_db = 10 * np.log10(
            config.bs_power_w[0] * beta[0, 0, 0] / noise_power(config.fading)
        )
        result = run_trial(config, "perfect-optimal", 3, 4)
        assert result.min_sinr_db == pytest.approx(asym_db, abs=0.5)

    def test_clean_composite_matches_perfect_on_same_seeds(self):
        # near-noiseless pilots at high peak power reproduce the perfect-CSI beam
        fading = FadingConfig(pilot_noise_ratio=1e-12)
        config = NetworkConfig(antennas=10_000, fading=fading, p_u_dbw=40.0, cells=3)
        perfect = run_trial(config, "perfect-optimal", 7, 8)
        composite = run_trial(config, "composite-power-controlled", 7, 8)
        assert composite.min_sinr_db == pytest.approx(perfect.min_sinr_db, abs=0.5)

    @pytest.mark.parametrize(
        "scheme", ["individual-pilot", "composite", "composite-power-controlled"]
    )
    def test_engine_matches_explicit_pilot_route(self, scheme):
        config = NetworkConfig(antennas=48, cells=3, users_per_cell=2)
        got = run_trial(config, scheme, 11, 22).min_sinr_db
        expected = explicit_trial_minimum(config, scheme, 11, 22)
        assert got == pytest.approx(expected, rel=1e-9)

    def test_engine_matches_explicit_pilot_route_async(self):
        rng = np.random.default_rng(0)
        offsets = tuple(float(x) for x in rng.uniform(0, 1e-6, 6))
        config = NetworkConfig(
            antennas=48,
            cells=3,
            users_per_cell=2,
            scheme="composite-async",
            async_offsets_s=offsets,
            pilot_symbol_s=1e-6,
        )
        got = run_trial(config, "composite-async", 13, 24).min_sinr_db
        expected = explicit_trial_minimum(config, "composite-async", 13, 24)
        assert got == pytest.approx(expected, rel=1e-9)


class TestRunExperiment:
    def test_reproducible_and_seed_sensitive(self):
        config = NetworkConfig(antennas=None, num_large=20)
        a = run_experiment(config, scheme="perfect-optimal")
        b = run_experiment(config, scheme="perfect-optimal")
        c = run_experiment(config, scheme="perfect-optimal", master_seed=2)
        assert np.array_equal(a.samples_db, b.samples_db)
        assert a.fingerprint == b.fingerprint
        assert not np.array_equal(a.samples_db, c.samples_db)
        assert a.fingerprint != c.fingerprint

    def test_cdf_endpoints(self):
        config = NetworkConfig(antennas=None, num_large=40)
        report = run_experiment(config, scheme="perfect-optimal")
        assert report.cdf[0, 0] == report.samples_db.min()
        assert report.cdf[0, 1] == pytest.approx(1 / 40)
        assert report.cdf[-1, 0] == report.samples_db.max()
        assert report.cdf[-1, 1] == 1.0

    def test_small_count_ignored_in_asymptotic_mode(self):
        config = NetworkConfig(antennas=None, num_large=10)
        a = run_experiment(config, scheme="perfect-optimal", num_small=1)
        b = run_experiment(config, scheme="perfect-optimal", num_small=50)
        assert np.array_equal(a.samples_db, b.samples_db)

    def test_fewer_users_stochastically_dominate(self):
        report3 = run_experiment(
            NetworkConfig(antennas=None, users_per_cell=3, num_large=300),
            scheme="perfect-optimal",
        )
        report10 = run_experiment(
            NetworkConfig(antennas=None, users_per_cell=10, num_large=300),
            scheme="perfect-optimal",
        )
        deciles = np.arange(0.1, 1.0, 0.1)
        q3 = np.quantile(report3.samples_db, deciles)
        q10 = np.quantile(report10.samples_db, deciles)
        assert np.all(q3 > q10)

    def test_finite_mode_averages_linear_minimum_over_draws(self):
        config = NetworkConfig(antennas=16, cells=3, num_large=2, num_small=3)
        report = run_experiment(config, scheme="composite")
        for t in range(2):
            large_seed = engine.child_seed(config.master_seed, engine._LARGE_STREAM, t)
            acc = 0.0
            for s in range(3):
                small_seed = engine.child_seed(
                    config.master_seed, engine._SMALL_STREAM, t, s
                )
                result = run_trial(config, "composite", large_seed, small_seed)
                acc += 10 ** (result.min_sinr_db / 10)
            assert report.samples_db[t] == pytest.approx(
                10 * np.log10(acc / 3), rel=1e-9
            )

    def test_zero_trials_rejected(self):
        with pytest.raises(ConfigError):
            run_experiment(NetworkConfig(antennas=None), num_large=0)

    def test_unknown_scheme_rejected(self):
        with pytest.raises(ConfigError):
            run_experiment(NetworkConfig(antennas=None), scheme="zero-forcing")


class TestConvergenceProperties:
    def test_gap_to_asymptote_shrinks_with_antennas(self):
        base = dict(cells=3, users_per_cell=2, E_dbw=(10.0,))
        asym = run_experiment(
            NetworkConfig(antennas=None, num_large=60, **base), scheme="perfect-optimal"
        )
        gaps = []
        for m in (50, 100, 300, 500):
            report = run_experiment(
                NetworkConfig(antennas=m, num_large=60, num_small=40, **base),
                scheme="perfect-optimal",
            )
            gaps.append(asym.mean_min_sinr_db - report.mean_min_sinr_db)
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    def test_intercell_interference_vanishes_with_antennas(self):
        layout = build_hex_layout(3, 1000.0)
        fading = FadingConfig()
        medians = []
        for m in (100, 400, 1600):
            ratios = []
            for trial in range(30):
                users = drop_users(layout, 2, 100.0, 1000 + trial)
                cs = assemble_channels(layout, users, fading, m, 2000 + trial, 3000 + trial)
                beams = [
                    optimal_beamformer_perfect(
                        np.stack([cs.vector(j, j, k) for k in range(2)]),
                        cs.beta[j, j],
                        cell=j,
                    )
                    for j in range(3)
                ]
                desired = abs(np.vdot(cs.vector(0, 0, 0), beams[0].w)) ** 2
                interference = sum(
                    abs(np.vdot(cs.vector(j, 0, 0), beams[j].w)) ** 2 for j in (1, 2)
                )
                ratios.append(interference / desired)
            medians.append(np.median(ratios))
        assert medians[0] > medians[1] > medians[2]

    def test_composite_beats_individual_at_high_power(self):
        base = dict(antennas=64, E_dbw=(40.0,), num_large=200, num_small=2)
        comp = run_experiment(NetworkConfig(**base), scheme="composite")
        indiv = run_experiment(NetworkConfig(**base), scheme="individual-pilot")
        assert np.median(comp.samples_db) > np.median(indiv.samples_db)
