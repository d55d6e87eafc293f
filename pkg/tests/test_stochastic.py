"""Exact exit sampling and the Monte Carlo estimators.

The sampler inverts a tabulated CDF of the closed exit density; the
tests check the resulting law against an independent classical fact:
for a start at the center of the unit ball, the squared reciprocal
exit norm is Beta(alpha/2, 1 - alpha/2) distributed, in d = 1 and 2
alike.  scipy's Beta CDF is the oracle, so no table logic is shared.
"""

import math

import numpy as np
import pytest
from scipy import stats

from bregforms import (
    BallDomain,
    ExitSampler,
    QuadratureConfig,
    StableKernel,
    exit_time_closed_form,
    hardy_stein_verify,
    integrate_tail,
    make_preset,
    mc_exit_time,
    mc_exterior_expectation,
    poisson_ball,
    sample_exit_position,
)

D = BallDomain(center=0.0, radius=1.0)
D2 = BallDomain(center=(0.0, 0.0), radius=1.0)
Q6 = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9, max_subdivisions=600)

HARMONIC_MEASURE = (2.0 / math.pi) * (math.acos(1.0 / 3.0) - math.acos(1.0 / 2.0))


class TestExitLaw:
    def test_interval_overshoot_is_beta_distributed(self):
        alpha = 1.0
        s = ExitSampler(StableKernel(1, alpha), D, seed=901)
        z = s.sample(0.0, 6000)
        w = 1.0 / z ** 2
        res = stats.kstest(w, "beta", args=(alpha / 2.0, 1.0 - alpha / 2.0))
        assert res.pvalue > 0.01

    def test_disc_overshoot_is_beta_distributed(self):
        alpha = 1.5
        s = ExitSampler(StableKernel(2, alpha), D2, seed=902)
        z = s.sample(np.array([0.0, 0.0]), 6000)
        w = 1.0 / np.sum(z ** 2, axis=1)
        res = stats.kstest(w, "beta", args=(alpha / 2.0, 1.0 - alpha / 2.0))
        assert res.pvalue > 0.01

    def test_side_split_off_center(self):
        # Started right of center, the right ray must carry the Poisson
        # kernel's own mass of that ray.
        alpha, x = 1.5, 0.3
        k = StableKernel(1, alpha)
        s = ExitSampler(k, D, seed=903)
        n = 20000
        z = s.sample(x, n)
        frac_right = float(np.mean(z > 0.0))
        mass_right = integrate_tail(
            lambda t: np.where(np.asarray(t) > 0, poisson_ball(k, D, x, t), 0.0),
            1.0, Q6, exponent_hint=alpha, edge_levels=30).value
        se = math.sqrt(mass_right * (1.0 - mass_right) / n)
        assert abs(frac_right - mass_right) <= 4.0 * se

    def test_positions_leave_the_domain(self):
        s = ExitSampler(StableKernel(1, 0.5), D, seed=904)
        z = s.sample(0.7, 5000)
        assert np.all(np.abs(z) >= D.radius)
        s2 = ExitSampler(StableKernel(2, 1.5), D2, seed=905)
        z2 = s2.sample(np.array([0.3, -0.2]), 2000)
        assert np.all(np.linalg.norm(z2, axis=1) > D2.radius - 1e-9)

    def test_start_must_be_interior(self):
        s = ExitSampler(StableKernel(1, 1.0), D, seed=1)
        with pytest.raises(ValueError):
            s.sample(1.0, 10)


class TestReproducibility:
    def test_same_seed_same_draws(self):
        a = ExitSampler(StableKernel(1, 1.0), D, seed=42).sample(0.2, 500)
        b = ExitSampler(StableKernel(1, 1.0), D, seed=42).sample(0.2, 500)
        assert np.array_equal(a, b)

    def test_streams_are_independent(self):
        s = ExitSampler(StableKernel(1, 1.0), D, seed=42)
        a = s.sample(0.2, 500, stream=0)
        b = s.sample(0.2, 500, stream=1)
        assert not np.array_equal(a, b)

    def test_wrapper_matches_method(self):
        s = ExitSampler(StableKernel(1, 1.0), D, seed=7)
        direct = ExitSampler(StableKernel(1, 1.0), D, seed=7).sample(0.1, 64, 3)
        wrapped = sample_exit_position(s, 0.1, 64, 3)
        assert np.array_equal(direct, wrapped)


class TestEstimators:
    def test_exterior_expectation_hits_harmonic_measure(self):
        g = make_preset("annulus-indicator", D)
        s = ExitSampler(StableKernel(1, 1.0), D, seed=321)
        est = mc_exterior_expectation(s, g, 0.0, 40000)
        assert est.std_error > 0.0
        assert abs(est.mean - HARMONIC_MEASURE) <= 4.0 * est.std_error

    def test_interval_property(self):
        est = mc_exterior_expectation(
            ExitSampler(StableKernel(1, 1.0), D, seed=5), np.abs, 0.0, 1000)
        lo, hi = est.interval(2.0)
        assert lo < est.mean < hi
        assert hi - lo == pytest.approx(4.0 * est.std_error)

    def test_exit_time_from_center_is_exact(self):
        # From the center the first ball is the domain itself and every
        # path leaves in one step: zero-variance estimator.
        k = StableKernel(1, 1.0)
        s = ExitSampler(k, D, seed=11)
        est = mc_exit_time(s, 0.0, 256)
        assert est.std_error == 0.0
        assert est.mean == pytest.approx(exit_time_closed_form(k, D, 0.0), rel=1e-12)

    def test_exit_time_off_center(self):
        k = StableKernel(1, 1.0)
        s = ExitSampler(k, D, seed=12)
        est = mc_exit_time(s, 0.4, 20000)
        want = exit_time_closed_form(k, D, 0.4)
        assert est.std_error > 0.0
        assert abs(est.mean - want) <= 4.0 * est.std_error

    def test_exit_time_planar(self):
        k = StableKernel(2, 1.5)
        s = ExitSampler(k, D2, seed=13)
        x = np.array([0.2, 0.1])
        est = mc_exit_time(s, x, 6000)
        want = exit_time_closed_form(k, D2, x)
        assert abs(est.mean - want) <= 4.0 * est.std_error


class TestExitValueMoment:
    def test_verifies_for_both_exponents(self):
        g = make_preset("annulus-indicator", D)
        k = StableKernel(1, 1.0)
        for p in (2.0, 3.0):
            rep = hardy_stein_verify(k, D, g, p, 0.0, 20000, seed=777, q=Q6)
            assert rep.passed, p
            assert rep.extra["abs_tolerance"] > 0.0

    def test_quadrature_side_matches_harmonic_measure(self):
        g = make_preset("annulus-indicator", D)
        rep = hardy_stein_verify(StableKernel(1, 1.0), D, g, 2.0, 0.0, 5000,
                                 seed=1234, q=Q6)
        assert rep.rhs == pytest.approx(HARMONIC_MEASURE, rel=1e-7)

    def test_bitwise_reproducible(self):
        g = make_preset("annulus-indicator", D)
        k = StableKernel(1, 1.0)
        a = hardy_stein_verify(k, D, g, 2.0, 0.0, 8000, seed=99, q=Q6)
        b = hardy_stein_verify(k, D, g, 2.0, 0.0, 8000, seed=99, q=Q6)
        assert a.lhs == b.lhs
        assert a.rhs == b.rhs
        assert a.extra["std_error"] == b.extra["std_error"]
