"""Adaptive quadrature: intervals, boxes, diagonal pairs, tails."""

import math

import numpy as np
import pytest
from scipy import integrate as sint

from bregforms import (
    IntegrationResult,
    QuadratureConfig,
    integrate_adaptive,
    integrate_offdiagonal_pair,
    integrate_tail,
)

TIGHT = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-12, max_subdivisions=2000)
MED = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9, max_subdivisions=600)


def closed_pair_power(region, s):
    """Closed form of the double integral of |x - y|^{-s} over a product
    of intervals, via the mixed second antiderivative of |u|^{2-s}."""
    (a1, b1), (a2, b2) = region

    def psi(u):
        return abs(u) ** (2.0 - s)

    coeff = -1.0 / ((2.0 - s) * (1.0 - s))
    return coeff * (psi(b1 - b2) - psi(a1 - b2) - psi(b1 - a2) + psi(a1 - a2))


class TestIntervalAndBox:
    def test_polynomial(self):
        res = integrate_adaptive(lambda x: x ** 3, (0.0, 1.0), TIGHT)
        assert res.converged
        assert res.value == pytest.approx(0.25, rel=1e-12)

    def test_endpoint_inverse_sqrt(self):
        res = integrate_adaptive(lambda x: x ** -0.5, (0.0, 1.0), TIGHT)
        assert res.converged
        assert res.value == pytest.approx(2.0, rel=1e-8)

    def test_interior_kink_with_declared_point(self):
        res = integrate_adaptive(np.abs, (-0.3, 0.7), TIGHT, points=(0.0,))
        assert res.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-12)

    def test_oscillatory(self):
        res = integrate_adaptive(np.sin, (0.0, math.pi), TIGHT)
        assert res.value == pytest.approx(2.0, rel=1e-10)

    def test_error_estimate_covers_true_error(self):
        res = integrate_adaptive(lambda x: x ** -0.5, (0.0, 1.0), MED)
        assert abs(res.value - 2.0) <= 10.0 * res.error_estimate + 1e-12

    def test_two_dimensional_box(self):
        res = integrate_adaptive(lambda pts: pts[:, 0] * pts[:, 1],
                                 ((0.0, 1.0), (0.0, 1.0)), MED)
        assert res.value == pytest.approx(0.25, rel=1e-8)

    def test_gaussian_box(self):
        res = integrate_adaptive(
            lambda pts: np.exp(-pts[:, 0] ** 2 - pts[:, 1] ** 2),
            ((-6.0, 6.0), (-6.0, 6.0)), MED)
        assert res.value == pytest.approx(math.pi, rel=1e-7)

    def test_rejects_bad_boxes(self):
        with pytest.raises(ValueError):
            integrate_adaptive(np.sin, (1.0, 1.0))
        with pytest.raises(ValueError):
            integrate_adaptive(np.sin, (0.0, 1.0, 2.0))

    def test_halved_budget_does_not_worsen(self):
        full = integrate_adaptive(lambda x: x ** -0.5, (0.0, 1.0), MED)
        half = integrate_adaptive(lambda x: x ** -0.5, (0.0, 1.0), MED.scaled(0.5))
        assert abs(half.value - 2.0) <= 1.1 * abs(full.value - 2.0) + 1e-13
        assert half.error_estimate <= 1.1 * full.error_estimate + 1e-15


class TestOffdiagonalPair:
    def test_square_inverse_sqrt(self):
        region = ((0.0, 1.0), (0.0, 1.0))
        exact = closed_pair_power(region, 0.5)
        assert exact == pytest.approx(8.0 / 3.0, rel=1e-14)
        res = integrate_offdiagonal_pair(
            lambda x, y: np.abs(x - y) ** -0.5, region, 1.5, MED)
        assert res.converged and not res.divergent
        assert res.value == pytest.approx(exact, rel=1e-6)

    def test_symmetric_shortcut_agrees(self):
        region = ((0.0, 1.0), (0.0, 1.0))
        f = lambda x, y: np.abs(x - y) ** -0.5
        plain = integrate_offdiagonal_pair(f, region, 1.5, MED)
        sym = integrate_offdiagonal_pair(f, region, 1.5, MED, symmetric=True)
        assert sym.value == pytest.approx(plain.value, rel=1e-6)

    def test_offset_rectangles(self):
        region = ((0.0, 1.0), (0.5, 2.0))
        exact = closed_pair_power(region, 0.5)
        res = integrate_offdiagonal_pair(
            lambda x, y: np.abs(x - y) ** -0.5, region, 1.5, MED)
        assert res.value == pytest.approx(exact, rel=1e-6)

    def test_near_critical_exponent(self):
        region = ((0.0, 1.0), (0.0, 1.0))
        exact = closed_pair_power(region, 0.9)
        res = integrate_offdiagonal_pair(
            lambda x, y: np.abs(x - y) ** -0.9, region, 1.9, MED)
        assert res.value == pytest.approx(exact, rel=1e-4)

    def test_divergent_is_flagged_not_guessed(self):
        res = integrate_offdiagonal_pair(
            lambda x, y: np.abs(x - y) ** -1.1,
            ((0.0, 1.0), (0.0, 1.0)), 2.1, MED)
        assert res.divergent
        assert math.isinf(res.value)

    def test_smooth_integrand(self):
        res = integrate_offdiagonal_pair(
            lambda x, y: (x - y) ** 2, ((0.0, 1.0), (0.0, 1.0)), 0.5, MED)
        assert res.value == pytest.approx(1.0 / 6.0, rel=1e-8)

    def test_kink_factor_against_library_quadrature(self):
        # F(x, y) = |x - 0.5| |x - y|^{-1/2}; integrate y analytically,
        # then the remaining 1-d integral with scipy as the oracle.
        f = lambda x, y: np.abs(x - 0.5) * np.abs(x - y) ** -0.5
        res = integrate_offdiagonal_pair(f, ((0.0, 1.0), (0.0, 1.0)), 1.5,
                                         MED, points=(0.5,))
        oracle, _ = sint.quad(
            lambda x: abs(x - 0.5) * 2.0 * (math.sqrt(x) + math.sqrt(1.0 - x)),
            0.0, 1.0, points=[0.5])
        assert res.value == pytest.approx(oracle, rel=1e-6)

    def test_rejects_degenerate_region(self):
        with pytest.raises(ValueError):
            integrate_offdiagonal_pair(lambda x, y: x + y,
                                       ((0.0, 0.0), (0.0, 1.0)), 1.5)

    def test_tightened_budget_improves_singular_pair(self):
        region = ((0.0, 1.0), (0.0, 1.0))
        exact = 8.0 / 3.0
        f = lambda x, y: np.abs(x - y) ** -0.5
        coarse = integrate_offdiagonal_pair(f, region, 1.5,
                                            QuadratureConfig(rel_tol=1e-3, abs_tol=1e-6))
        fine = integrate_offdiagonal_pair(f, region, 1.5,
                                          QuadratureConfig(rel_tol=1e-8, abs_tol=1e-11))
        assert abs(fine.value - exact) < abs(coarse.value - exact)
        assert abs(fine.value - exact) < 1e-7 * exact


class TestTail:
    def test_inverse_square(self):
        res = integrate_tail(lambda z: np.abs(z) ** -2.0, 1.0, MED, exponent_hint=1.0)
        assert res.value == pytest.approx(2.0, rel=1e-7)

    def test_slow_tail(self):
        res = integrate_tail(lambda z: np.abs(z) ** -1.5, 1.0, MED, exponent_hint=0.5)
        assert res.value == pytest.approx(4.0, rel=1e-6)

    def test_hint_is_advisory_only(self):
        # Wrong hint (too slow); the measured decay must still win.
        res = integrate_tail(lambda z: np.abs(z) ** -3.0, 1.0, MED, exponent_hint=1.0)
        assert res.value == pytest.approx(1.0, rel=1e-6)

    def test_asymmetric_rays(self):
        def f(z):
            z = np.asarray(z, dtype=float)
            return np.where(z > 0, np.abs(z) ** -2.0, 2.0 * np.abs(z) ** -3.0)
        res = integrate_tail(f, 1.0, MED, exponent_hint=1.0)
        assert res.value == pytest.approx(2.0, rel=1e-6)

    def test_divergent_tail_flagged(self):
        res = integrate_tail(lambda z: np.abs(z) ** -1.0, 1.0, MED, exponent_hint=1.0)
        assert res.divergent

    def test_edge_singularity_with_grading(self):
        # int_{|z|>1} (|z|-1)^{-1/2} |z|^{-2} dz = 2 B(1/2, 3/2) = pi.
        def f(z):
            az = np.abs(np.asarray(z, dtype=float))
            return (az - 1.0) ** -0.5 * az ** -2.0
        res = integrate_tail(f, 1.0, MED, exponent_hint=1.0, edge_levels=25)
        assert res.value == pytest.approx(math.pi, rel=1e-6)

    def test_planar_tail(self):
        res = integrate_tail(
            lambda pts: np.linalg.norm(pts, axis=1) ** -3.0,
            1.0, MED, d=2, exponent_hint=1.0)
        assert res.value == pytest.approx(2.0 * math.pi, rel=1e-6)

    def test_validation(self):
        with pytest.raises(ValueError):
            integrate_tail(lambda z: z, 0.0)
        with pytest.raises(ValueError):
            integrate_tail(lambda z: z, 1.0, exponent_hint=-1.0)


class TestConfigAndResult:
    def test_scaled_tightens(self):
        cfg = QuadratureConfig(rel_tol=1e-4, abs_tol=1e-8, max_subdivisions=100,
                               tail_cut=30.0)
        half = cfg.scaled(0.5)
        assert half.rel_tol == 5e-5
        assert half.abs_tol == 5e-9
        assert half.max_subdivisions >= 200
        assert half.tail_cut == 30.0

    def test_divergent_result_forces_infinite_value(self):
        res = IntegrationResult(3.0, 0.1, 5, False, divergent=True)
        assert math.isinf(res.value) and res.value > 0
