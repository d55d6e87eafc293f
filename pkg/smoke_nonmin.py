import json
import time

import numpy as np

from bregforms.kernels import BallDomain, StableKernel
from bregforms.quadrature import QuadratureConfig
from bregforms.variational import nonminimizer_search

q = QuadratureConfig(rel_tol=1e-5, abs_tol=1e-8, max_subdivisions=300)
D = BallDomain(center=np.zeros(1), radius=1.0)
k = StableKernel(d=1, alpha=0.75)

t0 = time.time()
rep = nonminimizer_search(k, D, 3.0, n_list=(1, 10, 100, 1000, 10000), q=q)
dt = time.time() - t0
print(rep.one_line())
print(f"lhs(E[ext])={rep.lhs:.6e} rhs(E[u])={rep.rhs:.6e}  ({dt:.1f}s)")
print(json.dumps({kk: (vv if not isinstance(vv, float) else round(vv, 8))
                  for kk, vv in rep.extra.items()}, indent=2, default=str))
