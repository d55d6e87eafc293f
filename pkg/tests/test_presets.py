"""Preset data families: supports, breakpoints, bounds, registry."""

import numpy as np
import pytest

from bregforms import AnnulusSupport, BallDomain, ExteriorData, FunctionHandle, PRESETS, make_preset
from bregforms.presets import (
    annulus_indicator,
    constant,
    gaussian,
    hat_function,
    polynomial_bump,
    smooth_annulus_bump,
    truncated_blowup,
    two_level,
)

D = BallDomain(center=0.0, radius=1.0)


def test_registry_is_complete():
    assert set(PRESETS) == {
        "annulus-indicator", "smooth-annulus-bump", "two-level",
        "truncated-blowup", "polynomial-bump", "hat", "gaussian", "constant",
    }


def test_make_preset_unknown_name():
    with pytest.raises(KeyError, match="unknown preset"):
        make_preset("bogus", D)


def test_make_preset_dispatches():
    g = make_preset("annulus-indicator", D, height=2.0)
    assert isinstance(g, ExteriorData)
    assert g(2.5) == 2.0


class TestAnnulusIndicator:
    def test_values(self):
        g = annulus_indicator(D, inner=2.0, outer=3.0, height=1.0)
        z = np.array([-3.5, -2.5, -1.0, 0.0, 1.5, 2.0, 2.9, 3.2])
        want = [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0]
        assert g(z).tolist() == want

    def test_bound(self):
        assert annulus_indicator(D, height=-2.5).bound == 2.5

    def test_scalar_call_returns_float(self):
        val = annulus_indicator(D)(2.5)
        assert isinstance(val, float)


class TestSmoothBump:
    def test_vanishes_flat_at_shell_edges(self):
        g = smooth_annulus_bump(D, inner=2.0, outer=3.0, height=1.0)
        edges = np.array([2.0, 3.0, -2.0, -3.0])
        assert np.all(g(edges) == 0.0)
        # Flat contact: still tiny just inside the edge.
        assert g(2.001) < 1e-100

    def test_peak_at_midline(self):
        g = smooth_annulus_bump(D, inner=2.0, outer=3.0, height=0.7)
        assert g(2.5) == pytest.approx(0.7, rel=1e-12)
        assert g(-2.5) == pytest.approx(0.7, rel=1e-12)

    def test_no_breakpoints(self):
        assert smooth_annulus_bump(D).g.breakpoints == ()


class TestTwoLevel:
    def test_levels_and_sign_change(self):
        g = two_level(D, inner=1.5, outer=3.5, split=2.5, hi=1.0, lo=-0.5)
        assert g(2.0) == 1.0
        assert g(-2.0) == 1.0
        assert g(3.0) == -0.5
        assert g(1.0) == 0.0
        assert g(4.0) == 0.0

    def test_breakpoints_at_split(self):
        g = two_level(D, split=2.5)
        assert g.g.breakpoints == (-2.5, 2.5)

    def test_bound(self):
        assert two_level(D, hi=1.0, lo=-3.0).bound == 3.0


class TestTruncatedBlowup:
    def test_cap_and_profile(self):
        g = truncated_blowup(D, n=10.0, p=3.0)
        # Default inner edge at radius + 1 = 2; exponent 1/(p-1) = 0.5,
        # so the cap bites for s < n^{-2} = 0.01.
        assert g(2.005) == 10.0
        s = 0.25
        assert g(2.0 + s) == pytest.approx(s ** -0.5, rel=1e-12)

    def test_shell_keeps_distance_from_domain(self):
        with pytest.raises(ValueError):
            truncated_blowup(D, n=5.0, p=2.0, inner=0.9)

    def test_support_is_disjoint_from_domain(self):
        g = truncated_blowup(D, n=50.0, p=3.0)
        sup = g.g.support
        assert isinstance(sup, AnnulusSupport)
        assert sup.inner > D.radius
        assert np.all(g(np.linspace(-1.5, 1.5, 7)) == 0.0)

    def test_bound_tracks_cap(self):
        assert truncated_blowup(D, n=123.0, p=3.0).bound == 123.0

    def test_crossover_is_declared(self):
        g = truncated_blowup(D, n=100.0, p=3.0)
        s_star = 100.0 ** -2.0
        assert g.g.breakpoints == (-(2.0 + s_star), 2.0 + s_star)

    def test_small_p_uses_linear_exponent(self):
        g = truncated_blowup(D, n=10.0, p=1.5)
        s = 0.5
        assert g(2.0 + s) == pytest.approx(1.0 / s, rel=1e-12)


class TestInteriorHandles:
    def test_polynomial_bump_values(self):
        u = polynomial_bump(center=0.0, radius=1.0, height=2.0)
        assert u(0.0) == 2.0
        assert u(1.0) == 0.0
        assert u(1.5) == 0.0
        assert u(0.5) == pytest.approx(2.0 * 0.75 ** 2, rel=1e-14)

    def test_polynomial_bump_smooth_contact(self):
        # C^1 at the support edge: one-sided slope tends to 0.
        u = polynomial_bump()
        h = 1e-6
        assert abs(u(1.0 - h) / h) < 1e-4

    def test_polynomial_bump_declares_zero_exterior(self):
        assert polynomial_bump().exterior_support == ()

    def test_hat_values_and_kinks(self):
        u = hat_function(center=0.0, radius=1.0, height=0.8)
        assert u(0.0) == 0.8
        assert u(0.5) == pytest.approx(0.4)
        assert u(1.0) == 0.0
        assert u(-2.0) == 0.0
        assert u.breakpoints == (-1.0, 0.0, 1.0)

    def test_gaussian_and_constant_have_full_support(self):
        assert gaussian().support is None
        assert constant().support is None
        assert constant(3.5)(123.0) == 3.5
        assert gaussian()( 0.0) == 1.0


class TestFunctionHandleContract:
    def test_evaluator_only_sees_support(self):
        seen = []

        def ev(z):
            seen.extend(z.tolist())
            return np.ones_like(z)

        h = FunctionHandle(evaluator=ev, support=AnnulusSupport(2.0, 3.0))
        out = h(np.array([0.0, 2.5, 4.0, -2.2]))
        assert out.tolist() == [0.0, 1.0, 0.0, 1.0]
        assert all(2.0 <= abs(z) <= 3.0 for z in seen)

    def test_interval_support(self):
        h = FunctionHandle(evaluator=lambda x: x ** 2, support=(-1.0, 1.0))
        assert h(2.0) == 0.0
        assert h(0.5) == 0.25

    def test_unknown_smoothness_rejected(self):
        with pytest.raises(ValueError):
            FunctionHandle(evaluator=lambda x: x, smoothness="magic")

    def test_exterior_data_delegates(self):
        g = annulus_indicator(D)
        assert g.name == "annulus-indicator"
        assert g(2.5) == g.g(2.5)
