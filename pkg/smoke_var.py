import time

import numpy as np
from scipy import integrate as si

from bregforms.forms import energy_form_p
from bregforms.kernels import BallDomain, StableKernel
from bregforms.presets import annulus_indicator
from bregforms.quadrature import QuadratureConfig
from bregforms.variational import (
    discrete_energy,
    discrete_w_form,
    discretize,
    discretized_extension,
    minimize_energy,
    quasiminimizer_ratio,
    refinement_divergence_check,
)

q = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9, max_subdivisions=400)
D = BallDomain(center=np.zeros(1), radius=1.0)

# adjacent weight against brute-force double quadrature
for alpha in (0.5, 1.0, 1.5):
    k = StableKernel(d=1, alpha=alpha)
    prob = discretize(k, D, None, 2.0, resolution=16, box=(-2.0, 2.0))
    h = prob.h
    num, _ = si.dblquad(lambda y, x: k.c * (x - y) ** 2 * abs(x - y) ** (-1 - alpha),
                        0.0, h, lambda x: h, lambda x: 2 * h)
    w1 = prob.lag_weights[1] * h * h  # weight applies to (dv)(dfp) = h^2 for slope 1
    print(f"alpha={alpha}: w1*h^2={w1:.12e} vs cell-pair quad {num:.12e} rel={abs(w1-num)/num:.2e}")

# midpoint lags + symmetry + tail closed form
k = StableKernel(d=1, alpha=1.0)
prob = discretize(k, D, annulus_indicator(D), 3.0, resolution=64, box=(-4.0, 4.0))
assert prob.pair_weight(3, 10) == prob.pair_weight(10, 3)
x5 = prob.nodes[5]
t_manual = prob.h * (k.c / k.alpha) * ((4.0 - x5) ** -1 + (x5 + 4.0) ** -1)
assert abs(prob.tail[5] - t_manual) < 1e-15
print("symmetry + tail ok")

# zero data, zero values -> zero energies
p0 = discretize(k, D, None, 2.0, resolution=32, box=(-2.0, 2.0))
z = np.zeros(32)
assert discrete_energy(p0, z) == 0.0 and discrete_w_form(p0, z) == 0.0
print("zero energy ok")

# p=2: discrete energy vs independent loop implementation
g = annulus_indicator(D)
prob2 = discretize(k, D, g, 2.0, resolution=48, box=(-4.0, 4.0))
u2 = discretized_extension(prob2, g, q)
v = u2.values
ref = 0.0
N = prob2.n_cells
for i in range(N):
    for j in range(i + 1, N):
        if prob2.free[i] or prob2.free[j]:
            ref += prob2.pair_weight(i, j) * (v[i] - v[j]) ** 2
ref += float(np.sum((v[prob2.free] ** 2) * prob2.tail[prob2.free]))
de = discrete_energy(prob2, u2)
print(f"p=2 oracle: {de:.10e} vs {ref:.10e} rel={abs(de-ref)/ref:.2e}")

# homogeneity
lam = -2.0
e1 = discrete_energy(prob2, v * lam)
print(f"homogeneity rel: {abs(e1 - abs(lam)**2 * de)/e1:.2e}")

# discrete vs continuum energy consistency (alpha=1, p in {1.5,2,3})
for p in (1.5, 2.0, 3.0):
    e_cont = energy_form_p(k, D, __import__("bregforms.forms", fromlist=["poisson_extension"]).poisson_extension(k, D, g, q), p, q).value
    vals = []
    for res in (64, 128, 256):
        pr = discretize(k, D, g, p, resolution=res, box=(-4.0, 4.0))
        uu = discretized_extension(pr, g, q)
        vals.append(discrete_energy(pr, uu))
    gaps = [abs(x - e_cont) / e_cont for x in vals]
    print(f"p={p}: discrete {vals} continuum {e_cont:.6f} gaps {[f'{x:.3f}' for x in gaps]}")

# descent: p=2 from extension should barely move; trace nonincreasing
t0 = time.time()
res = minimize_energy(prob2, u2)
tr = np.array(res.energy_trace)
assert np.all(np.diff(tr) <= 1e-12)
print(f"p=2 descent: E {tr[0]:.8f} -> {tr[-1]:.8f} rel drop {(tr[0]-tr[-1])/tr[0]:.2e} "
      f"sweeps={res.sweeps} conv={res.converged} ({time.time()-t0:.1f}s)")

# p=3 quasiminimizer ratios
t0 = time.time()
for p in (1.5, 2.0, 3.0):
    pr = discretize(k, D, g, p, resolution=128, box=(-4.0, 4.0))
    uu = discretized_extension(pr, g, q)
    qr = quasiminimizer_ratio(pr, uu, trials=20, rng_seed=7)
    print(f"p={p}: max_ratio={qr.max_ratio:.6f} K={qr.K_bound:.4f} ({time.time()-t0:.1f}s)")
    t0 = time.time()

# reproducibility
qr1 = quasiminimizer_ratio(pr, uu, trials=5, rng_seed=42)
qr2 = quasiminimizer_ratio(pr, uu, trials=5, rng_seed=42)
assert qr1.ratios == qr2.ratios and qr1.patches == qr2.patches
print("patch reproducibility ok")

# refinement divergence: p=alpha=1.5 (log regime) and a geometric control p=1.2, alpha=1.9
t0 = time.time()
k15 = StableKernel(d=1, alpha=1.5)
rep = refinement_divergence_check(k15, 1.5)
print(f"p=1.5 a=1.5: ratios={[f'{r:.3f}' for r in rep.extra['w_ratios']]} "
      f"e_changes={[f'{c:.3f}' for c in rep.extra['e_changes']]} passed={rep.passed} ({time.time()-t0:.1f}s)")
k19 = StableKernel(d=1, alpha=1.9)
rep2 = refinement_divergence_check(k19, 1.2)
print(f"p=1.2 a=1.9: ratios={[f'{r:.3f}' for r in rep2.extra['w_ratios']]} "
      f"e_changes={[f'{c:.3f}' for c in rep2.extra['e_changes']]} passed={rep2.passed}")
# p=2 control: both forms stable
kc = StableKernel(d=1, alpha=1.0)
wv, ev = [], []
for resn in (64, 128):
    prc = discretize(kc, D, None, 2.0, resolution=resn, box=(-2.0, 2.0))
    tt = np.abs(prc.nodes) / 0.5
    vv = np.where(prc.free, 0.8 * np.maximum(1 - tt, 0.0), 0.0)
    wv.append(discrete_w_form(prc, vv))
    ev.append(discrete_energy(prc, vv))
print(f"p=2 control: W {wv[1]/wv[0]:.4f}x E {ev[1]/ev[0]:.4f}x (both should be ~1)")
