import time

import numpy as np

from bregforms.forms import (
    douglas_remainder_verify,
    energy_form_p,
    poisson_extension,
    remainder_AD,
)
from bregforms.kernels import BallDomain, StableKernel
from bregforms.presets import annulus_indicator, truncated_blowup
from bregforms.quadrature import QuadratureConfig

q = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9, max_subdivisions=400)
k = StableKernel(d=1, alpha=0.75)
D = BallDomain(center=np.zeros(1), radius=1.0)

# 1. harmonic remainder should still vanish
g = annulus_indicator(D)
u = poisson_extension(k, D, g, q)
t0 = time.time()
a_harm = remainder_AD(k, D, u, p=3.0, q=q)
print(f"A_D(harmonic) = {a_harm:.3e}  ({time.time()-t0:.1f}s)")

# 2. blowup preset: extension finite, pieces touch the boundary
for n in (10.0, 100.0):
    gn = truncated_blowup(D, n=n, p=3.0)
    ext = poisson_extension(k, D, gn, q)
    vals = ext(np.array([0.0, 0.5, 0.9, 0.99]))
    print(f"n={n}: P[g_n] at 0,0.5,0.9,0.99 ->", np.array2string(vals, precision=6))
    assert np.all(np.isfinite(vals)), "extension blew up"

# 3. remainder identity on a non-harmonic u built from the blowup data
gn = truncated_blowup(D, n=10.0, p=3.0)
ext = poisson_extension(k, D, gn, q)

def u_pert(x):
    x = np.asarray(x, dtype=float)
    bump = np.where(np.abs(x) < 1.0, 0.3 * (1.0 - x * x) ** 2, 0.0)
    return ext(x) + bump

from bregforms.forms import FunctionHandle

uh = FunctionHandle(
    evaluator=u_pert,
    support=None,
    smoothness="smooth-interior",
    breakpoints=(-1.0, 1.0) + tuple(gn.g.breakpoints),
    exterior_support=gn.g.exterior_support,
    name="blowup-plus-bump",
)
t0 = time.time()
rep = douglas_remainder_verify(k, D, uh, p=3.0, q=q, tolerance=2e-2)
print(f"remainder identity (blowup data): rel={rep.rel_err:.2e} passed={rep.passed} ({time.time()-t0:.1f}s)")

# 4. energy comparison pieces: E[P[u_n]] vs E[u_n] both computable
t0 = time.time()
e_ext = energy_form_p(k, D, uh, p=3.0, q=q)
print(f"E[u_n-like] = {e_ext.value:.6e} ({time.time()-t0:.1f}s)")
