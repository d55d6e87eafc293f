"""Preset function families for the verification suites.

Exterior data lives on the complement of the unit-type interval and is
built here with declared support, breakpoints, and a sup bound, so the
forms can treat the zero set in closed form.  Interior presets (bumps,
hats) declare empty exterior support.

Factories take the domain explicitly; the registry at the bottom maps
CLI names to factories with their tunable parameters.
"""

from __future__ import annotations

import numpy as np

from .forms import GRID, PRESET, SMOOTH_INTERIOR, ExteriorData, FunctionHandle
from .kernels import AnnulusSupport, BallDomain

__all__ = [
    "annulus_indicator",
    "smooth_annulus_bump",
    "two_level",
    "truncated_blowup",
    "polynomial_bump",
    "hat_function",
    "gaussian",
    "constant",
    "PRESETS",
    "make_preset",
]


def annulus_indicator(D: BallDomain, inner=2.0, outer=3.0, height=1.0) -> ExteriorData:
    """height on the two-sided shell inner < |z - c| < outer, else 0."""
    h = float(height)
    handle = FunctionHandle(
        evaluator=lambda z: np.full(np.shape(z), h),
        support=AnnulusSupport(float(inner), float(outer), center=float(D.center)),
        smoothness=PRESET,
        breakpoints=(),
        name="annulus-indicator",
    )
    return ExteriorData(handle, bound=abs(h))


def smooth_annulus_bump(D: BallDomain, inner=2.0, outer=3.0, height=1.0) -> ExteriorData:
    """Flat-to-zero bump exp(-t^2/(1-t^2)) on the shell, infinitely
    smooth across its edges."""
    c = float(D.center)
    mid = 0.5 * (inner + outer)
    half = 0.5 * (outer - inner)
    h = float(height)

    def ev(z):
        t = (np.abs(np.asarray(z, dtype=float) - c) - mid) / half
        out = np.zeros(t.shape, dtype=float)
        m = np.abs(t) < 1.0
        tm = t[m]
        out[m] = h * np.exp(-tm * tm / (1.0 - tm * tm))
        return out

    handle = FunctionHandle(
        evaluator=ev,
        support=AnnulusSupport(float(inner), float(outer), center=c),
        smoothness=PRESET,
        name="smooth-annulus-bump",
    )
    return ExteriorData(handle, bound=abs(h))


def two_level(D: BallDomain, inner=1.5, outer=3.5, split=2.5, hi=1.0, lo=-0.5) -> ExteriorData:
    """Piecewise-constant shell: hi on inner < |z - c| < split, lo on
    split < |z - c| < outer.  Sign-changing, with interior jumps."""
    c = float(D.center)
    s = float(split)

    def ev(z):
        rad = np.abs(np.asarray(z, dtype=float) - c)
        return np.where(rad < s, float(hi), float(lo))

    handle = FunctionHandle(
        evaluator=ev,
        support=AnnulusSupport(float(inner), float(outer), center=c),
        smoothness=PRESET,
        breakpoints=(c - s, c + s),
        name="two-level",
    )
    return ExteriorData(handle, bound=max(abs(hi), abs(lo)))


def truncated_blowup(D: BallDomain, n, p, inner=None, width=1.0, exponent=None) -> ExteriorData:
    """min((|z - c| - inner)^{-e}, n) on the shell inner < |z - c| < inner + width.

    The profile blows up at the inner edge of the shell and is capped
    at level n; the crossover radius is a breakpoint.  The shell sits
    at unit distance from D by default so its closure stays clear of
    the domain.  The default exponent e is 1/(p-1) for p >= 2 and 1
    for p < 2; both make the level-n cap bite on a shrinking collar
    of width n^{-1/e}.
    """
    c = float(D.center)
    R = float(D.radius) + 1.0 if inner is None else float(inner)
    if R <= float(D.radius):
        raise ValueError("blowup shell must keep its distance from the domain")
    n = float(n)
    p = float(p)
    expo = float(exponent) if exponent is not None else (1.0 / (p - 1.0) if p >= 2.0 else 1.0)
    s_star = n ** (-1.0 / expo)

    def ev(z):
        s = np.abs(np.asarray(z, dtype=float) - c) - R
        s = np.maximum(s, 0.0)
        out = np.full(s.shape, n)
        m = s > s_star
        out[m] = s[m] ** (-expo)
        return out

    bps = tuple(sorted({c - R - s_star, c + R + s_star}))
    handle = FunctionHandle(
        evaluator=ev,
        support=AnnulusSupport(R, R + float(width), center=c),
        smoothness=PRESET,
        breakpoints=bps,
        name=f"truncated-blowup[n={n:g}]",
    )
    return ExteriorData(handle, bound=n)


def polynomial_bump(center=0.0, radius=1.0, height=1.0) -> FunctionHandle:
    """height * (1 - ((x-c)/r)^2)^2 inside |x - c| < r, zero outside."""
    c, r, h = float(center), float(radius), float(height)

    def ev(x):
        t = (np.asarray(x, dtype=float) - c) / r
        return h * (1.0 - t * t) ** 2

    return FunctionHandle(
        evaluator=ev,
        support=(c - r, c + r),
        smoothness=SMOOTH_INTERIOR,
        exterior_support=(),
        name="polynomial-bump",
    )


def hat_function(center=0.0, radius=1.0, height=0.8) -> FunctionHandle:
    """Piecewise-linear tent of the given height, zero outside."""
    c, r, h = float(center), float(radius), float(height)

    def ev(x):
        t = np.abs(np.asarray(x, dtype=float) - c) / r
        return h * np.maximum(1.0 - t, 0.0)

    return FunctionHandle(
        evaluator=ev,
        support=(c - r, c + r),
        smoothness=GRID,
        breakpoints=(c - r, c, c + r),
        exterior_support=(),
        name="hat",
    )


def gaussian(center=0.0, scale=1.0) -> FunctionHandle:
    """exp(-(x-c)^2), full support."""
    c, s = float(center), float(scale)
    return FunctionHandle(
        evaluator=lambda x: s * np.exp(-(np.asarray(x, dtype=float) - c) ** 2),
        support=None,
        smoothness=SMOOTH_INTERIOR,
        name="gaussian",
    )


def constant(value=1.0) -> FunctionHandle:
    """The constant function."""
    v = float(value)
    return FunctionHandle(
        evaluator=lambda x: np.full(np.shape(x), v),
        support=None,
        smoothness=SMOOTH_INTERIOR,
        name=f"constant[{v:g}]",
    )


def _mk_indicator(D, **kw):
    return annulus_indicator(D, **kw)


def _mk_bump(D, **kw):
    return smooth_annulus_bump(D, **kw)


def _mk_two_level(D, **kw):
    return two_level(D, **kw)


def _mk_blowup(D, n=10.0, p=3.0, inner=None, width=1.0):
    return truncated_blowup(D, n, p, inner=inner, width=width)


def _mk_poly(D, **kw):
    return polynomial_bump(center=D.center, radius=kw.pop("radius", D.radius), **kw)


def _mk_hat(D, **kw):
    return hat_function(center=D.center, radius=kw.pop("radius", D.radius), **kw)


def _mk_gaussian(D, **kw):
    return gaussian(center=D.center, **kw)


def _mk_constant(D, **kw):
    return constant(**kw)


PRESETS = {
    "annulus-indicator": _mk_indicator,
    "smooth-annulus-bump": _mk_bump,
    "two-level": _mk_two_level,
    "truncated-blowup": _mk_blowup,
    "polynomial-bump": _mk_poly,
    "hat": _mk_hat,
    "gaussian": _mk_gaussian,
    "constant": _mk_constant,
}


def make_preset(name, D: BallDomain, **params):
    """Build a preset by registry name."""
    try:
        factory = PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; known: {known}") from None
    return factory(D, **params)
