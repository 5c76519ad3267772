"""Estimator tests against closed-form oracles and structural contracts."""

import math

import numpy as np
import pytest

import stablelab as sl
from stablelab.closedform import (
    brownian_ball_mean_exit,
    brownian_interval_mean_exit,
    stable_interval_mean_exit,
)
from stablelab.process import PathSample

BM1 = sl.ProcessSpec(alpha=2.0, dim=1)
BM2 = sl.ProcessSpec(alpha=2.0, dim=2)
CAUCHY = sl.ProcessSpec(alpha=1.0, dim=1)


def _hop_path(positions, h=1.0):
    arr = np.asarray(positions, dtype=float)[:, None]
    return PathSample(spec=BM1, step_h=h, positions=arr, seed=0)


class TestExitTime:
    def test_start_outside_is_zero(self):
        path = _hop_path([5.0, 5.1, 5.2])
        assert sl.exit_time(path, sl.Interval(-1, 1)) == 0.0

    def test_conservative_survives(self):
        path = sl.sample_path(BM1, [0.0], t_max=1.0, h=0.01, seed=1)
        assert sl.exit_time(path, sl.FullSpace(1)) == math.inf

    def test_first_grid_exit(self):
        # 0 -> 0.5 -> 1.5 with h = 1 leaves (-1, 1) at the second step
        path = _hop_path([0.0, 0.5, 1.5], h=1.0)
        assert sl.exit_time(path, sl.Interval(-1, 1)) == 2.0


class TestMeanExitTime:
    def test_brownian_interval_ode_oracle(self):
        # (1/2) u'' = -1 on (-1,1), u(+-1) = 0  =>  u(0) = 1
        res = sl.estimate_mean_exit_time(BM1, [0.0], sl.Interval(-1, 1), 10.0, 1e-3, 20_000, 21)
        assert res.survived_fraction < 1e-3
        assert abs(res.mean - 1.0) <= max(3.0 * res.stderr, 0.015)

    def test_brownian_ball_center(self):
        res = sl.estimate_mean_exit_time(
            BM2, [0.0, 0.0], sl.Ball((0.0, 0.0), 1.0), 8.0, 1e-3, 20_000, 22
        )
        oracle = brownian_ball_mean_exit(1.0, 0.0, 2)
        assert oracle == 0.5
        assert abs(res.mean - oracle) <= max(3.0 * res.stderr, 0.015 * oracle)

    def test_stable_interval_getoor_oracle(self):
        # (a^2 - x^2)^(alpha/2) / Gamma(1 + alpha) at alpha = 1, a = 1, x = 0
        res = sl.estimate_mean_exit_time(CAUCHY, [0.0], sl.Interval(-1, 1), 30.0, 5e-4, 40_000, 23)
        oracle = stable_interval_mean_exit(1.0, 1.0, 0.0)
        assert oracle == pytest.approx(1.0, rel=1e-12)
        assert abs(res.mean - oracle) <= max(3.0 * res.stderr, 0.02 * oracle)

    def test_step_halving_drift_within_noise(self):
        # refining h must not move the Brownian interval estimate by more
        # than the combined noise (the bridge correction removes the
        # leading O(sqrt(h)) bias)
        a = sl.estimate_mean_exit_time(BM1, [0.0], sl.Interval(-1, 1), 10.0, 2e-3, 20_000, 25)
        b = sl.estimate_mean_exit_time(BM1, [0.0], sl.Interval(-1, 1), 10.0, 1e-3, 20_000, 26)
        assert abs(a.mean - b.mean) <= 3.0 * math.hypot(a.stderr, b.stderr)

    def test_survivor_warning_and_tail_correction(self):
        res = sl.estimate_mean_exit_time(BM1, [0.0], sl.Interval(-1, 1), 0.5, 1e-3, 4_000, 24)
        assert res.survived_fraction > 1e-3
        assert res.warnings
        assert res.tail_corrected_mean is None or res.tail_corrected_mean > res.mean


class TestSurvival:
    def test_outside_zero_and_fullspace_one(self):
        out = sl.estimate_survival(BM1, [3.0], sl.Interval(-1, 1), 1.0, 1e-2, 500, 3)
        assert out.mean == 0.0
        cons = sl.estimate_survival(BM1, [0.0], sl.FullSpace(1), 1.0, 1e-2, 500, 3)
        assert cons.mean == 1.0

    def test_monotone_in_t(self):
        vals = [
            sl.estimate_survival(BM2, [0.0, 0.0], sl.Ball((0.0, 0.0), 1.0), t, 1e-3, 8_000, 31).mean
            for t in (0.25, 0.5, 1.0, 2.0)
        ]
        assert all(a > b for a, b in zip(vals[:-1], vals[1:]))
        assert vals[-1] < 0.05


class TestResolventR1:
    def test_conservative_is_one(self):
        res = sl.estimate_resolvent_r1(BM1, [0.0], sl.FullSpace(1), 1e-2, 100, 4)
        assert res.mean == 1.0 and res.stderr == 0.0

    def test_small_ball_first_order(self):
        # R_1 1 ~ E[tau] for a tiny ball, and strictly below it
        dom = sl.Ball((0.0, 0.0), 0.05)
        r1 = sl.estimate_resolvent_r1(BM2, [0.0, 0.0], dom, 1e-6, 3_000, 5, t_max=1.0)
        et = sl.estimate_mean_exit_time(BM2, [0.0, 0.0], dom, 1.0, 1e-6, 3_000, 5)
        assert r1.mean < et.mean
        assert abs(r1.mean - et.mean) < 0.05 * et.mean

    def test_killed_process_quadrature(self):
        # V == c: zeta ~ Exp(c), R_1 1 = 1/(1+c)
        pot = sl.KillingPotential.constant(3.0)
        res = sl.estimate_resolvent_r1(BM1, [0.0], pot, 1e-3, 4_000, 6, t_max=10.0)
        assert abs(res.mean - 0.25) < 0.01


class TestFeynmanKac:
    def test_zero_potential_weighs_one(self):
        path = sl.sample_path(BM1, [0.0], 1.0, 0.01, 7)
        assert sl.feynman_kac_weight(path, sl.KillingPotential.none(), 1.0) == 1.0

    def test_constant_potential_exact(self):
        path = sl.sample_path(BM1, [0.0], 1.0, 0.01, 8)
        w = sl.feynman_kac_weight(path, sl.KillingPotential.constant(2.0), 0.5)
        assert w == pytest.approx(math.exp(-2.0 * 0.5), rel=1e-12)

    def test_riemann_sum_first_order_on_frozen_path(self):
        # halving h halves the quadrature error on a fixed Brownian path
        fine = sl.sample_path(BM1, [0.0], 1.0, 1e-4, 9)
        pot = sl.KillingPotential.power(1.0, 2.0)

        def weight_at_stride(stride):
            sub = PathSample(
                spec=BM1, step_h=fine.step_h * stride,
                positions=fine.positions[::stride], seed=9,
            )
            return sl.feynman_kac_weight(sub, pot, 1.0)

        w1, w2, w4 = weight_at_stride(1), weight_at_stride(2), weight_at_stride(4)
        err_coarse = abs(math.log(w4) - math.log(w1))
        err_fine = abs(math.log(w2) - math.log(w1))
        assert err_fine < 0.75 * err_coarse

    def test_negative_potential_rejected(self):
        path = sl.sample_path(BM1, [0.0], 1.0, 0.01, 10)
        bad = sl.KillingPotential.custom(lambda p: -np.ones(len(p)))
        with pytest.raises(ValueError, match="nonnegative"):
            sl.feynman_kac_weight(path, bad, 1.0)

    def test_weight_in_unit_interval(self):
        path = sl.sample_path(BM1, [0.5], 2.0, 0.01, 11)
        pot = sl.KillingPotential.power(1.0, 2.0, offset=1.0)
        w = [sl.feynman_kac_weight(path, pot, t) for t in (0.0, 0.5, 1.0, 2.0)]
        assert all(0.0 < v <= 1.0 for v in w)
        assert w[0] == 1.0


class TestKilledLifetime:
    def test_constant_potential_inverse_rate(self):
        pot = sl.KillingPotential.constant(2.0)
        res = sl.estimate_killed_lifetime_mean(BM1, [0.0], pot, 1e-3, 3_000, 12, t_max=8.0)
        assert res.mean == pytest.approx(0.5, abs=0.01)
        assert res.tail_corrected_mean == pytest.approx(0.5, abs=0.01)

    def test_geometric_bound_ordering(self):
        # 1/(1 - p) with p = exp(-c) overestimates the true mean 1/c
        pot = sl.KillingPotential.constant(1.0)
        res = sl.estimate_killed_lifetime_mean(BM1, [0.0], pot, 1e-3, 3_000, 13, t_max=8.0)
        assert res.p_hat == pytest.approx(math.exp(-1.0), abs=0.01)
        assert 1.0 / (1.0 - res.p_hat) > res.mean

    def test_decreasing_in_start_distance(self):
        pot = sl.KillingPotential.power(1.0, 2.0)  # V = |x|^2
        means = [
            sl.estimate_killed_lifetime_mean(BM1, [x], pot, 2e-3, 3_000, 14, t_max=6.0).mean
            for x in (0.0, 2.0, 4.0, 8.0)
        ]
        assert all(a > b for a, b in zip(means[:-1], means[1:]))

    def test_divergent_tail_bound_rejected(self):
        with pytest.raises(sl.TailBoundError):
            sl.estimate_killed_lifetime_mean(
                BM1, [0.0], sl.KillingPotential.none(), 1e-2, 100, 15
            )
        with pytest.raises(sl.TailBoundError):
            sl.estimate_killed_lifetime_mean(
                BM1, [0.0], sl.KillingPotential.power(0.0, 0.0), 1e-2, 100, 15
            )


class TestTimeChange:
    def test_identity_weight_identity_clock(self):
        path = sl.sample_path(BM1, [0.0], 1.0, 0.01, 16)
        one = sl.TimeChangeWeight(beta=0.0, fn=lambda p: np.full(len(p), 2.0))
        # W == 2 everywhere: clock runs at half speed, exactly
        clock = sl.time_change_clock(path, one)
        assert np.allclose(clock.values, path.times / 2.0, atol=1e-12)

    def test_clock_below_real_time(self):
        path = sl.sample_path(BM1, [1.0], 2.0, 0.01, 17)
        clock = sl.time_change_clock(path, sl.TimeChangeWeight(beta=2.0))
        assert np.all(clock.values <= path.times + 1e-12)
        assert np.all(np.diff(clock.values) > 0.0)

    def test_frozen_path_rate(self):
        # parked at x = 10 with W = 1 + x^2: the clock accumulates at 1/101
        pos = np.full((101, 1), 10.0)
        path = PathSample(spec=BM1, step_h=0.01, positions=pos, seed=0)
        clock = sl.time_change_clock(path, sl.TimeChangeWeight(beta=2.0))
        assert clock.total == pytest.approx(1.0 / 101.0, rel=1e-12)

    def test_inverse_and_position_lookup(self):
        path = sl.sample_path(BM1, [0.0], 1.0, 0.01, 18)
        clock = sl.time_change_clock(path, sl.TimeChangeWeight(beta=2.0))
        s = clock.total / 3.0
        tau = clock.inverse(s)
        k = int(round(tau / path.step_h))
        assert clock.values[k] >= s >= (clock.values[k - 1] if k else 0.0)
        assert np.allclose(clock.position(s), path.positions[k])
        with pytest.raises(ValueError):
            clock.inverse(clock.total * 1.5)

    def test_weight_lower_bound_enforced(self):
        w = sl.TimeChangeWeight(beta=2.0, fn=lambda p: np.ones(len(p)))
        with pytest.raises(ValueError, match="lower bound"):
            w(np.array([[3.0]]))


def test_estimator_result_needs_two_paths():
    with pytest.raises(ValueError):
        sl.EstimatorResult(mean=0.0, stderr=0.0, n_paths=1, step_h=0.1, seed=0)


def test_exit_scan_joint_columns():
    dom = sl.shrinking_ball_domain(2, 12)
    starts = np.array([[5.0, 0.0], [10.0, 0.0]])
    scan = sl.exit_time_scan(BM2, starts, dom, 15.0, 2e-3, 2_000, 19)
    for mexit, r1 in scan:
        assert 0.0 < r1.mean < 1.0
        assert r1.mean < mexit.mean


def test_threads_do_not_change_results(monkeypatch):
    # chunk layout is fixed by n_paths alone, so the worker count cannot
    # change the streams; shrink the chunk size to force a multi-chunk merge
    import stablelab.functionals as fn

    monkeypatch.setattr(fn, "_CHUNK", 10_000)
    dom = sl.Ball((0.0, 0.0), 1.0)
    a = sl.estimate_mean_exit_time(BM2, [0.0, 0.0], dom, 6.0, 1e-2, 60_000, 20, threads=1)
    b = sl.estimate_mean_exit_time(BM2, [0.0, 0.0], dom, 6.0, 1e-2, 60_000, 20, threads=3)
    assert a.mean == b.mean and a.stderr == b.stderr
