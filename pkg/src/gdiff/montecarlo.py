"""Monte-Carlo checks of the analytic covariance formulas."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import streams
from .errors import DomainError
from .exact import ode_marginal_eigen, sde_gain, sde_marginal_eigen, sde_noise_eigen
from .schedule import NoiseSchedule
from .schemes import SamplerConfig, recursion_values, simulate

MIN_SAMPLES = 1000
DEFAULT_Z_MAX = 4.0


@dataclass
class ValidationReport:
    """Per-step comparison of analytic and empirical variances."""

    k: np.ndarray
    analytic: np.ndarray
    empirical: np.ndarray
    stderr: np.ndarray
    z: np.ndarray
    z_max: float
    n: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.all(np.abs(self.z) <= self.z_max))

    @property
    def worst(self) -> float:
        return float(np.max(np.abs(self.z))) if self.z.size else 0.0

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        text = f"{verdict}: {self.z.size} comparisons, max |z| = {self.worst:.3f} (threshold {self.z_max:g}, n = {self.n})"
        return f"{text}; {self.note}" if self.note else text

    def to_csv(self) -> str:
        lines = ["k,analytic,empirical,stderr,z"]
        for row in zip(self.k, self.analytic, self.empirical, self.stderr, self.z):
            lines.append(f"{int(row[0])}," + ",".join(repr(float(x)) for x in row[1:]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


def _report(k, analytic, empirical, n, z_max) -> ValidationReport:
    analytic = np.asarray(analytic, dtype=float)
    empirical = np.asarray(empirical, dtype=float)
    # Second moment of a zero-mean Gaussian: Var(mean x^2) = 2 sigma^4 / n.
    stderr = empirical * np.sqrt(2.0 / n)
    diff = empirical - analytic
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, diff / stderr, np.where(diff == 0, 0.0, np.inf * np.sign(diff)))
    m = z.size
    note = ""
    if m > 10:
        tail = math.erfc(z_max / math.sqrt(2.0))
        note = f"Bonferroni: {m} comparisons, family-wise false-fail rate <= {min(1.0, m * tail):.2g}"
    return ValidationReport(np.asarray(k), analytic, empirical, stderr, z, float(z_max), int(n), note)


def _check_n(n):
    if n < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {n}")


def validate_scheme(kind, lam: float, cfg: SamplerConfig, n: int, seed: int, z_max: float = DEFAULT_Z_MAX,
                    workers: int | None = None, heun_squared: bool = True) -> ValidationReport:
    """Compare the eigenvalue recursion of a scheme with its simulated second moments at every step."""
    _check_n(n)
    lam_arr = np.array([float(lam)])
    analytic = recursion_values(kind, lam_arr, cfg, heun_squared=heun_squared)[:, 0]
    sim = simulate(kind, lam_arr, cfg, seed, n, workers=workers, keep_final=False)
    return _report(np.arange(cfg.N + 1), analytic, sim.second_moments[:, 0], n, z_max)


def validate_continuous(which: str, lam: float, c0: float, sched: NoiseSchedule, s_grid, n: int, seed: int,
                        z_max: float = DEFAULT_Z_MAX, workers: int | None = None) -> ValidationReport:
    """Sample the closed-form SDE or ODE solution and compare with the exact marginal eigenvalues.

    The ODE sample at forward time ``s`` is ``sqrt(lam_s / lam_T) y0``; the
    SDE sample is ``gain(s) y0 + sqrt(noise(s)) z`` with ``z`` independent.
    ``y0 ~ N(0, c0)``.
    """
    _check_n(n)
    which = str(which).lower()
    if which not in ("sde", "ode"):
        raise DomainError(f"expected 'sde' or 'ode', got {which!r}")
    if c0 < 0 or lam < 0:
        raise DomainError("variances must be non-negative")
    s = np.atleast_1d(np.asarray(s_grid, dtype=float))
    if which == "ode":
        gain = np.sqrt(ode_marginal_eigen(lam, 1.0, s, sched))
        noise_sd = np.zeros_like(s)
        analytic = ode_marginal_eigen(lam, c0, s, sched)
    else:
        gain = sde_gain(lam, s, sched)
        noise_sd = np.sqrt(np.maximum(sde_noise_eigen(lam, s, sched), 0.0))
        analytic = sde_marginal_eigen(lam, c0, s, sched)
    K = s.size

    def run_block(block, start, stop):
        rng = streams.block_rng(seed, block)
        y0 = rng.standard_normal(streams.BLOCK)[: stop - start] * np.sqrt(c0)
        z = rng.standard_normal((streams.BLOCK, K))[: stop - start]
        x = y0[:, None] * gain[None, :] + z * noise_sd[None, :]
        return np.sum(x * x, axis=0)

    total = np.zeros(K)
    for part in streams.map_blocks(run_block, n, workers):
        total += part
    return _report(np.arange(K), analytic, total / n, n, z_max)
