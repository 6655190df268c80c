"""Which covariance directions carry the final error?

Sweeps a single eigenvalue from 1e-6 to 1e3 and reports its contribution
|sqrt(lam) - sqrt(lam_final)| for each sampler and continuous process.

    python demos/03_eigen_contribution.py
"""
import numpy as np

from gdiff import STANDARD_NORMAL, NoiseSchedule, SamplerConfig
from gdiff.wasserstein import eigen_contribution

lam = np.geomspace(1e-6, 1e3, 10)
cfg = SamplerConfig("heun", 1000, 1e-3, STANDARD_NORMAL, NoiseSchedule())
sources = ("continuous_sde", "continuous_ode", "em", "ei", "euler", "heun")
print(f"{'lambda':>10}" + "".join(f"{s.replace('continuous_', 'c-'):>10}" for s in sources))
table = {s: eigen_contribution(s, lam, cfg) for s in sources}
for i, value in enumerate(lam):
    print(f"{value:>10.1e}" + "".join(f"{table[s][i]:>10.4f}" for s in sources))
print("Small eigenvalues are dominated by truncation, large ones by initialization and discretization.")
