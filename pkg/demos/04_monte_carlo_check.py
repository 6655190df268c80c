"""Do the eigenvalue recursions describe what the samplers actually do?

Runs each sampler on 10^5 Gaussian draws and compares the per-step
empirical variance with the recursion. The Heun amplification factor must
be squared; the unsquared variant is rejected by the same test.

    python demos/04_monte_carlo_check.py
"""
from gdiff import STANDARD_NORMAL, NoiseSchedule, SamplerConfig
from gdiff.montecarlo import validate_scheme

sched = NoiseSchedule()
for kind in ("em", "ei", "euler", "heun"):
    cfg = SamplerConfig(kind, 100, 1e-3, STANDARD_NORMAL, sched)
    print(f"{kind:<6} lambda=0.1  {validate_scheme(kind, 0.1, cfg, 100_000, seed=1).summary()}")

cfg = SamplerConfig("heun", 10, 1e-3, STANDARD_NORMAL, sched)
print("heun squared   ", validate_scheme("heun", 2.0, cfg, 100_000, seed=2).summary())
print("heun unsquared ", validate_scheme("heun", 2.0, cfg, 100_000, seed=2, heun_squared=False).summary())
