import time

import numpy as np

from bregforms.forms import (
    FunctionHandle,
    energy_form_p,
    poisson_extension,
    remainder_AD,
)
from bregforms.kernels import BallDomain, StableKernel
from bregforms.presets import truncated_blowup
from bregforms.quadrature import QuadratureConfig

q = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9, max_subdivisions=400)
k = StableKernel(d=1, alpha=0.75)
D = BallDomain(center=np.zeros(1), radius=1.0)

gn = truncated_blowup(D, n=10.0, p=3.0)
ext = poisson_extension(k, D, gn, q)

def u_pert(x):
    x = np.asarray(x, dtype=float)
    bump = np.where(np.abs(x) < 1.0, 0.3 * (1.0 - x * x) ** 2, 0.0)
    return ext(x) + bump

uh = FunctionHandle(
    evaluator=u_pert,
    support=None,
    smoothness="smooth-interior",
    breakpoints=(-1.0, 1.0) + tuple(gn.g.breakpoints),
    exterior_support=((-2.0, -1.0), (1.0, 2.0)),
    name="blowup-plus-bump",
)

t0 = time.time()
e_u = energy_form_p(k, D, uh, p=3.0, q=q)
print(f"E[u] = {e_u.value:.6e}  ({time.time()-t0:.1f}s)")

t0 = time.time()
a = remainder_AD(k, D, uh, p=3.0, q=q)
print(f"A_D = {a:.6e}  ({time.time()-t0:.1f}s)")

t0 = time.time()
ext_u = poisson_extension(k, D, uh, q)
e_ext = energy_form_p(k, D, ext_u, p=3.0, q=q)
print(f"E[P[u]] = {e_ext.value:.6e}  ({time.time()-t0:.1f}s)")

lhs = e_ext.value
rhs = e_u.value + a
print(f"identity residual rel = {abs(lhs-rhs)/max(abs(lhs),abs(rhs)):.2e}")
print(f"E[u] - E[P[u]] = {e_u.value - e_ext.value:.6e} (should equal A_D > 0)")
