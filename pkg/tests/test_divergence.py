"""Scalar Bregman layer: signed powers, divergences, moment identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bregforms import (
    RATIO_LOWER,
    RATIO_UPPER,
    bregman_fp,
    bregman_moment_check,
    comparison_constants,
    difference_quotient_ratio,
    french_power,
    regularized_fp,
    symmetrized_hp,
)

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
exponents = st.floats(min_value=1.05, max_value=6.0)


class TestFrenchPower:
    def test_zero_maps_to_zero_for_any_exponent(self):
        for kappa in (-2.0, -0.5, 0.0, 0.5, 1.0, 3.0):
            assert french_power(0.0, kappa) == 0.0

    def test_identity_at_kappa_one(self):
        x = np.linspace(-3.0, 3.0, 13)
        assert np.allclose(french_power(x, 1.0), x, rtol=0.0, atol=0.0)

    def test_known_value(self):
        assert french_power(-2.0, 0.5) == pytest.approx(-math.sqrt(2.0), rel=1e-15)

    @given(x=finite, kappa=st.floats(min_value=-1.0, max_value=4.0))
    def test_odd_symmetry(self, x, kappa):
        assert french_power(-x, kappa) == pytest.approx(-french_power(x, kappa), abs=1e-12)

    def test_vectorized_matches_scalar(self):
        x = np.array([-1.5, -0.1, 0.0, 0.3, 2.0])
        vec = french_power(x, 2.5)
        scal = np.array([french_power(float(t), 2.5) for t in x])
        assert np.array_equal(vec, scal)


class TestBregmanFp:
    def test_requires_p_above_one(self):
        with pytest.raises(ValueError):
            bregman_fp(0.0, 1.0, 1.0)

    def test_quadratic_case_is_squared_difference(self):
        a = np.linspace(-2.0, 2.0, 9)
        b = np.linspace(-1.0, 3.0, 9)
        assert np.allclose(bregman_fp(a, b, 2.0), (b - a) ** 2, rtol=1e-14, atol=1e-14)

    def test_closed_values_at_zero_arguments(self):
        # F_p(0, b) = |b|^p and F_p(a, 0) = (p-1)|a|^p.
        for p in (1.5, 2.0, 3.0, 4.0):
            assert bregman_fp(0.0, 2.0, p) == pytest.approx(2.0 ** p, rel=1e-14)
            assert bregman_fp(-3.0, 0.0, p) == pytest.approx((p - 1.0) * 3.0 ** p, rel=1e-14)

    @given(a=finite, b=finite, p=exponents)
    @settings(max_examples=200)
    def test_nonnegative_and_zero_only_on_diagonal(self, a, b, p):
        val = bregman_fp(a, b, p)
        assert val >= 0.0
        if a == b:
            assert val == 0.0

    @given(a=finite, b=finite, p=exponents)
    @settings(max_examples=200)
    def test_symmetrization_matches_average_of_both_orders(self, a, b, p):
        direct = symmetrized_hp(a, b, p)
        avg = 0.5 * (bregman_fp(a, b, p) + bregman_fp(b, a, p))
        scale = 1.0 + abs(a) ** p + abs(b) ** p
        assert direct == pytest.approx(avg, abs=1e-9 * scale)

    def test_symmetrized_is_symmetric(self):
        assert symmetrized_hp(1.3, -0.7, 3.0) == symmetrized_hp(-0.7, 1.3, 3.0)


class TestRegularizedFp:
    def test_eps_zero_recovers_plain_divergence(self):
        assert regularized_fp(0.4, -1.1, 1.5, 0.0) == bregman_fp(0.4, -1.1, 1.5)

    def test_negative_eps_rejected(self):
        with pytest.raises(ValueError):
            regularized_fp(0.0, 1.0, 2.0, -0.1)

    @given(a=finite, b=finite, eps=st.floats(min_value=1e-6, max_value=2.0))
    @settings(max_examples=150)
    def test_dominated_by_scaled_divergence_below_two(self, a, b, eps):
        p = 1.5
        reg = regularized_fp(a, b, p, eps)
        cap = bregman_fp(a, b, p) / (p - 1.0)
        scale = 1.0 + abs(a) ** p + abs(b) ** p
        assert reg <= cap + 1e-9 * scale

    def test_small_eps_limit(self):
        exact = bregman_fp(0.8, -0.3, 1.7)
        near = regularized_fp(0.8, -0.3, 1.7, 1e-9)
        assert near == pytest.approx(exact, rel=1e-7)


class TestMomentIdentities:
    def _identities_close(self, values, weights, p, tol=1e-10):
        out = bregman_moment_check(values, weights, p)
        for key, (lhs, rhs) in out.items():
            scale = max(1.0, abs(lhs), abs(rhs))
            assert abs(lhs - rhs) <= tol * scale, f"{key}: {lhs} vs {rhs}"

    def test_random_distributions(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = int(rng.integers(2, 12))
            v = rng.normal(0.0, 3.0, size=n)
            w = rng.dirichlet(np.ones(n))
            p = float(rng.uniform(1.1, 5.0))
            self._identities_close(v, w, p)

    @given(
        vals=st.lists(st.floats(min_value=-5.0, max_value=5.0), min_size=2, max_size=6),
        raw=st.lists(st.floats(min_value=0.1, max_value=1.0), min_size=2, max_size=6),
        p=exponents,
    )
    @settings(max_examples=60)
    def test_property_sweep(self, vals, raw, p):
        n = min(len(vals), len(raw))
        v = np.asarray(vals[:n])
        w = np.asarray(raw[:n])
        w = w / w.sum()
        self._identities_close(v, w, p, tol=1e-9)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            bregman_moment_check([1.0, 2.0], [0.5, 0.6], 2.0)
        with pytest.raises(ValueError):
            bregman_moment_check([1.0, 2.0], [-0.1, 1.1], 2.0)
        with pytest.raises(ValueError):
            bregman_moment_check([1.0, 2.0], [0.5, 0.4, 0.1], 2.0)

    def test_point_mass_gives_zero(self):
        out = bregman_moment_check([1.7, 1.7], [0.5, 0.5], 3.0)
        for lhs, rhs in out.values():
            assert lhs == pytest.approx(0.0, abs=1e-14)
            assert rhs == pytest.approx(0.0, abs=1e-14)


class TestComparisonConstants:
    def test_values(self):
        for p in (1.1, 2.0, 3.0):
            c_split, c_sum = comparison_constants(p)
            assert c_split == 2.0 ** (p - 1.0)
            assert c_sum == 1.0 + 2.0 ** p

    def test_centering_inequalities_hold(self):
        # E|X - EX|^p <= 2^{p-1} (E|X - a|^p + |EX - a|^p) <= 2^p E|X - a|^p
        # and |EX - a|^p + E|X - EX|^p <= (1 + 2^p) E|X - a|^p.
        rng = np.random.default_rng(77)
        for _ in range(300):
            n = int(rng.integers(2, 10))
            x = rng.normal(0.0, 2.0, size=n)
            w = rng.dirichlet(np.ones(n))
            a = float(rng.normal(0.0, 2.0))
            p = float(rng.uniform(1.1, 4.5))
            c_split, c_sum = comparison_constants(p)
            m = float(np.sum(w * x))
            central = float(np.sum(w * np.abs(x - m) ** p))
            about_a = float(np.sum(w * np.abs(x - a) ** p))
            shift = abs(m - a) ** p
            slack = 1e-12 * (1.0 + about_a)
            assert central <= c_split * (about_a + shift) + slack
            assert c_split * (about_a + shift) <= 2.0 ** p * about_a + slack
            assert shift + central <= c_sum * about_a + slack


class TestDifferenceQuotientRatio:
    def test_bounds_p_two(self):
        assert RATIO_LOWER(2.0) == 1.0
        assert RATIO_UPPER(2.0) == 2.0

    @given(a=finite, b=finite, p=exponents)
    @settings(max_examples=300)
    def test_ratio_in_sharp_bracket(self, a, b, p):
        if abs(a - b) < 1e-6 * (1.0 + abs(a) + abs(b)):
            return
        r = difference_quotient_ratio(a, b, p)
        if not math.isfinite(r):
            return
        assert r >= RATIO_LOWER(p) - 1e-9
        assert r <= RATIO_UPPER(p) + 1e-9

    def test_lower_bound_attained_near_diagonal(self):
        for p in (1.1, 1.5, 2.0, 3.0, 4.0):
            r = difference_quotient_ratio(1.0, 1.0 + 1e-5, p)
            assert abs(r - RATIO_LOWER(p)) < 1e-4

    def test_diagonal_is_nan(self):
        assert math.isnan(difference_quotient_ratio(0.7, 0.7, 3.0))
