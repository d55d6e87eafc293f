import numpy as np

from bregforms.divergence import RATIO_LOWER, RATIO_UPPER, difference_quotient_ratio
from bregforms.forms import w_energy_p
from bregforms.kernels import BallDomain, StableKernel
from bregforms.presets import hat_function
from bregforms.quadrature import QuadratureConfig

# ratio bracket and same-sign limit
for p in (1.1, 1.5, 2.0, 3.0, 4.0):
    lo, up = RATIO_LOWER(p), RATIO_UPPER(p)
    rng = np.random.Generator(np.random.Philox(key=np.array([7, int(10 * p)], dtype=np.uint64)))
    a = rng.normal(size=10000) * np.exp(rng.normal(size=10000))
    b = rng.normal(size=10000) * np.exp(rng.normal(size=10000))
    mask = a != b
    r = difference_quotient_ratio(a[mask], b[mask], p)
    # same-sign near-equal probes
    aa = np.abs(rng.normal(size=2000)) + 0.1
    bb = aa * (1.0 + 1e-6)
    r2 = difference_quotient_ratio(aa, bb, p)
    rall = np.concatenate([r, r2])
    print(f"p={p}: lower={lo:.6f} upper={up}) min={rall.min():.8f} max={rall.max():.8f} "
          f"viol={(np.sum(rall < lo - 1e-12) + np.sum(rall > up + 1e-12))} "
          f"attained={rall.min() - lo:.2e}")

# W-form divergence flag: hat at p=alpha=1.5 (log-divergent near diagonal)
k = StableKernel(d=1, alpha=1.5)
D = BallDomain(center=np.zeros(1), radius=1.0)
hat = hat_function(center=0.0, radius=0.5, height=0.8)
q = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9, max_subdivisions=400)
w = w_energy_p(k, D, hat, 1.5, q)
print(f"w_energy(hat, p=1.5, a=1.5): divergent={w.divergent} value={w.value}")
# control: p=3 finite
w3 = w_energy_p(k, D, hat, 3.0, q)
print(f"w_energy(hat, p=3.0, a=1.5): divergent={w3.divergent} value={w3.value:.6f} err={w3.error_estimate:.2e}")
