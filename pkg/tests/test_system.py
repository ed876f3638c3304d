from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from ostn.errors import ConfigurationError
from ostn.system import (AdaptiveSplit, FixedInterference, FixedSplit, NetworkConfig,
                         OutageEstimate, ProportionalInterference, TrialDraw, chunk_rng,
                         draw_chunk, run_mc, select_best_pair, sinr_iot, sinr_primary,
                         threshold_from_rate)


class TestConfig:
    def test_defaults(self, baseline):
        assert baseline.gamma_p == pytest.approx(1.0)
        assert baseline.gamma_s == pytest.approx(1.0)
        assert baseline.mu == 0.75
        assert baseline.eta == pytest.approx(1000.0)
        assert baseline.interferer_powers() == pytest.approx((100.0, 100.0))

    def test_proportional_powers(self, baseline):
        cfg = replace(baseline, interference_policy=ProportionalInterference(-15.0))
        eta_s, eta_t = cfg.interferer_powers()
        assert eta_s == eta_t == pytest.approx(1000.0 * 10 ** -1.5)

    def test_adaptive_needs_resolution(self, baseline):
        cfg = replace(baseline, power_split=AdaptiveSplit(0.1))
        with pytest.raises(ConfigurationError):
            cfg.mu
        assert cfg.with_mu(0.6).mu == 0.6

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
    def test_split_bounds(self, bad):
        with pytest.raises(ConfigurationError):
            FixedSplit(bad)
        with pytest.raises(ConfigurationError):
            AdaptiveSplit(bad)

    def test_invalid_fields(self):
        with pytest.raises(ConfigurationError):
            NetworkConfig(K=0)
        with pytest.raises(ConfigurationError):
            NetworkConfig(omega_cb=0.0)
        with pytest.raises(ConfigurationError):
            NetworkConfig(r_p=-1.0)


class TestSinr:
    def test_threshold(self):
        assert threshold_from_rate(0.5) == pytest.approx(1.0)
        assert threshold_from_rate(0.0) == 0.0
        with pytest.raises(ConfigurationError):
            threshold_from_rate(-0.1)

    def test_primary_supremum(self):
        rng = np.random.default_rng(0)
        n = 1_000_000
        mu = rng.uniform(0.05, 0.95, n)
        s = sinr_primary(rng.exponential(1e3, n), rng.exponential(1e3, n),
                         rng.exponential(50, n), mu)
        assert np.all(s < mu / (1 - mu))

    def test_primary_value(self):
        # x = 10, y = 4: 0.5*40/(0.5*40+15)
        assert float(sinr_primary(20.0, 4.0, 1.0, 0.5)) == pytest.approx(20 / 35)

    def test_iot_value(self):
        # x = 2, z = 3: 0.25*3*3/(0.75*3+3)
        assert float(sinr_iot(4.0, 6.0, 1.0, 0.75)) == pytest.approx(2.25 / 5.25)

    def test_selection(self):
        draw = TrialDraw(np.array([5.0, 50.0, 50.0]), np.array([5.0, 9.0, 9.0]),
                         np.array([1.0, 1.0, 1.0]), 0.0)
        assert select_best_pair(draw, 0.75) == 1


class TestMonteCarlo:
    def test_frozen_baseline(self, baseline):
        est = run_mc(baseline, 100_000, 1)
        assert est["sat"].p_hat == 0.14812
        assert est["iot"].p_hat == 0.43312

    def test_frozen_bound_model(self, baseline):
        est = run_mc(baseline, 100_000, 1, model="bound")
        assert est["sat"].p_hat == 0.14318
        assert est["iot"].p_hat == 0.32626

    def test_thread_invariance(self, baseline):
        cfg = replace(baseline, K=2)
        ref = run_mc(cfg, 300_000, 7, threads=1)
        for t in (4, 8):
            assert run_mc(cfg, 300_000, 7, threads=t) == ref

    def test_independent_seed_agrees(self, baseline):
        a, b = run_mc(baseline, 100_000, 1)["sat"], run_mc(baseline, 100_000, 2)["sat"]
        assert abs(a.p_hat - b.p_hat) < 3 * np.hypot(a.std_err, b.std_err)

    def test_selection_gain(self, baseline):
        one = run_mc(baseline, 100_000, 1)["sat"].p_hat
        two = run_mc(replace(baseline, K=2), 100_000, 1)["sat"].p_hat
        assert two < one

    def test_seed_changes_result(self, baseline):
        assert run_mc(baseline, 50_000, 1) != run_mc(baseline, 50_000, 2)

    def test_std_err(self):
        e = OutageEstimate.from_count(250, 1000)
        assert e.std_err == pytest.approx(np.sqrt(0.25 * 0.75 / 1000))

    def test_forced_outage(self, baseline):
        cfg = baseline.with_mu(0.4)
        for snr in (10.0, 40.0, 80.0):
            assert run_mc(cfg.with_snr(snr), 20_000, 3)["sat"].p_hat == 1.0

    def test_nonincreasing_in_snr(self, baseline):
        prev = {"sat": 1.0, "iot": 1.0}
        for snr in (20.0, 25.0, 30.0, 35.0, 40.0):
            est = run_mc(baseline.with_snr(snr), 50_000, 5)
            for net in prev:
                assert est[net].p_hat <= prev[net]
                prev[net] = est[net].p_hat

    def test_selection_gain_common_numbers(self, baseline):
        cfg = replace(baseline, K=2)
        lam_ac, lam_cb, _, w = draw_chunk(chunk_rng(4, 0), cfg, 100_000)
        s = sinr_primary(lam_ac, lam_cb, w[:, None], cfg.mu)
        single = np.mean(s[:, 0] < cfg.gamma_p)
        best = np.mean(s.max(axis=1) < cfg.gamma_p)
        assert best <= single

    def test_empirical_cdf_valid(self, baseline):
        lam_ac, lam_cb, _, w = draw_chunk(chunk_rng(8, 0), baseline, 50_000)
        s = sinr_primary(lam_ac, lam_cb, w[:, None], baseline.mu)[:, 0]
        grid = np.linspace(0, 3.5, 50)
        F = np.array([np.mean(s < g) for g in grid])
        assert F[0] == 0.0 and F[-1] == 1.0 and np.all(np.diff(F) >= 0)

    def test_zero_interferers_allowed(self, baseline):
        cfg = replace(baseline, M1=0, M2=0)
        est = run_mc(cfg, 10_000, 1)
        assert est["sat"].p_hat < run_mc(baseline, 10_000, 1)["sat"].p_hat

    def test_invalid(self, baseline):
        with pytest.raises(ConfigurationError):
            run_mc(baseline, 0, 1)
        with pytest.raises(ConfigurationError):
            run_mc(baseline, 100, 1, model="other")
        with pytest.raises(ConfigurationError):
            run_mc(replace(baseline, power_split=AdaptiveSplit(0.1)), 100, 1)

    def test_fixed_policy_defaults(self):
        assert FixedInterference() == FixedInterference(20.0, 20.0)
