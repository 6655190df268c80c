"""Discretized samplers of the backward SDE (EM, EI) and the flow ODE (Euler, Heun).

Two independent routes are provided for each scheme:

* ``recursion_values`` / ``eigen_recursion`` propagate the covariance
  eigenvalues exactly through the linear update of the scheme;
* ``simulate`` / ``sample_paths`` run the update rule itself on random
  initial states, coordinatewise in the eigenbasis, with the exact score
  ``-x / lam_tau``.

The uniform grid covers backward times ``t_k = k (T - eps) / N``, i.e.
forward times ``tau_k = T - t_k`` from ``T`` down to ``eps``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import streams
from .errors import DegenerateScore, DomainError
from .exact import STANDARD_NORMAL, InitLaw
from .schedule import NoiseSchedule
from .spectrum import as_eigenvalues, forward_eigen


class SchemeKind(str, Enum):
    EM = "em"
    EI = "ei"
    EULER = "euler"
    HEUN = "heun"

    @property
    def stochastic(self) -> bool:
        return self in (SchemeKind.EM, SchemeKind.EI)

    @property
    def label(self) -> str:
        return {"em": "EM", "ei": "EI", "euler": "Euler", "heun": "Heun"}[self.value]

    @classmethod
    def parse(cls, value) -> "SchemeKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown scheme {value!r}; expected one of em, ei, euler, heun") from None


ALL_SCHEMES = tuple(SchemeKind)


@dataclass(frozen=True)
class SamplerConfig:
    kind: SchemeKind = SchemeKind.HEUN
    N: int = 1000
    eps: float = 1e-3
    init: InitLaw = STANDARD_NORMAL
    sched: NoiseSchedule = field(default_factory=NoiseSchedule)

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind.parse(self.kind))
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"step count N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not 0 <= self.eps < self.sched.T:
            raise DomainError(f"truncation time must satisfy 0 <= eps < T, got eps={self.eps}")

    @property
    def step(self) -> float:
        return (self.sched.T - self.eps) / self.N


@dataclass
class EigenTrajectory:
    """Eigenvalue of one covariance direction along the sampler steps."""

    eigen_index: int
    values: np.ndarray
    times: np.ndarray
    backward_times: np.ndarray

    def __len__(self):
        return self.values.size


def time_grid(cfg: SamplerConfig):
    """Backward times ``t_k`` and forward times ``tau_k = T - t_k``, ``k = 0..N``."""
    T = cfg.sched.T
    t = np.linspace(0.0, T - cfg.eps, cfg.N + 1)
    tau = T - t
    tau[0], tau[-1] = T, cfg.eps
    return t, tau


def ei_coefficients(k: int, cfg: SamplerConfig):
    """Exponential-integrator coefficients ``(gamma1, gamma2)`` of step ``k``."""
    if not 0 <= k < cfg.N:
        raise DomainError(f"step index must be in [0, {cfg.N}), got {k}")
    g1, g2 = _ei_all(cfg)
    return float(g1[k]), float(g2[k])


def _ei_all(cfg: SamplerConfig):
    _, tau = time_grid(cfg)
    dB = np.diff(-cfg.sched.B(tau))  # B(tau_k) - B(tau_{k+1}) > 0
    return np.expm1(dB), 0.5 * np.expm1(2.0 * dB)


def degenerate_mask(kind, lam, cfg: SamplerConfig) -> np.ndarray:
    """True where the scheme would evaluate the score on a zero forward eigenvalue.

    EM, EI and Euler use the score at left endpoints ``tau_0..tau_{N-1}``
    only, all of which are positive times. Heun also uses ``tau_N = eps``.
    """
    kind = SchemeKind.parse(kind)
    lam = np.asarray(lam, dtype=float)
    _, tau = time_grid(cfg)
    used = tau if kind is SchemeKind.HEUN else tau[:-1]
    lam_min = forward_eigen(lam, cfg.sched, used.min())
    return np.asarray(lam_min <= 0.0)


def _require_score(kind, lam, cfg):
    bad = degenerate_mask(kind, lam, cfg)
    if np.any(bad):
        raise DegenerateScore(
            f"{SchemeKind.parse(kind).label} evaluates the score at forward time {cfg.eps} where a "
            f"covariance eigenvalue is zero; use a positive truncation time eps"
        )


def recursion_values(kind, lam, cfg: SamplerConfig, heun_squared: bool = True) -> np.ndarray:
    """Exact covariance eigenvalues of the scheme at every step, shape ``(N+1, d)``.

    ``heun_squared=False`` applies the Heun amplification factor unsquared.
    That variant is wrong and is kept so simulation can show it fails.
    """
    kind = SchemeKind.parse(kind)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam < 0):
        raise DomainError("eigenvalues must be non-negative")
    _require_score(kind, lam, cfg)
    sched, dt = cfg.sched, cfg.step
    _, tau = time_grid(cfg)
    beta = sched.beta(tau)
    out = np.empty((cfg.N + 1, lam.size))
    out[0] = cfg.init.variance(lam, sched)
    if kind is SchemeKind.EI:
        g1, g2 = _ei_all(cfg)
    lam_next = forward_eigen(lam, sched, tau[0])
    for k in range(cfg.N):
        lam_k, lam_next = lam_next, forward_eigen(lam, sched, tau[k + 1])
        prev = out[k]
        if kind is SchemeKind.EM:
            out[k + 1] = (1 + dt * beta[k] * (1 - 2 / lam_k)) ** 2 * prev + 2 * dt * beta[k]
        elif kind is SchemeKind.EI:
            out[k + 1] = (1 + g1[k] * (1 - 2 / lam_k)) ** 2 * prev + 2 * g2[k]
        elif kind is SchemeKind.EULER:
            out[k + 1] = (1 + dt * beta[k] * (1 - 1 / lam_k)) ** 2 * prev
        else:
            predictor = 1 + dt * beta[k] * (1 - 1 / lam_k)
            amp = (1 + 0.5 * dt * beta[k] * (1 - 1 / lam_k)
                   + 0.5 * dt * beta[k + 1] * (1 - 1 / lam_next) * predictor)
            out[k + 1] = (amp**2 if heun_squared else amp) * prev
    return out


def eigen_recursion(kind, lam: float, cfg: SamplerConfig, heun_squared: bool = True,
                    eigen_index: int = 0) -> EigenTrajectory:
    t, tau = time_grid(cfg)
    values = recursion_values(kind, np.array([lam], dtype=float), cfg, heun_squared)[:, 0]
    return EigenTrajectory(eigen_index, values, tau, t)


def _step(kind: SchemeKind, x, k, lam_k, lam_next, beta, dt, g1, g2, rng):
    """One update of the scheme as written in its dynamics; ``x`` has shape ``(n, d)``."""
    if kind is SchemeKind.EM:
        drift = beta[k] * (x - 2 * x / lam_k)
        return x + dt * drift + np.sqrt(2 * dt * beta[k]) * rng.standard_normal(x.shape)
    if kind is SchemeKind.EI:
        return x + g1[k] * (x - 2 * x / lam_k) + np.sqrt(2 * g2[k]) * rng.standard_normal(x.shape)

    def f(b, lam_tau, y):
        return b * y - b * y / lam_tau

    if kind is SchemeKind.EULER:
        return x + dt * f(beta[k], lam_k, x)
    fk = f(beta[k], lam_k, x)
    half = x + dt * fk
    return x + 0.5 * dt * (fk + f(beta[k + 1], lam_next, half))


def propagate(kind, lam, cfg: SamplerConfig, x0, rng: np.random.Generator | None = None,
              record=None) -> np.ndarray:
    """Run the scheme from explicit initial states ``x0`` of shape ``(n, d)``.

    ``rng`` supplies the injected noise of stochastic schemes. If ``record``
    is an array of shape ``(N+1, d)`` the per-step sums of squares are
    accumulated into it.
    """
    kind = SchemeKind.parse(kind)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    _require_score(kind, lam, cfg)
    if kind.stochastic and rng is None:
        raise DomainError(f"{kind.label} needs a random generator for its noise")
    sched, dt = cfg.sched, cfg.step
    _, tau = time_grid(cfg)
    beta = sched.beta(tau)
    g1, g2 = _ei_all(cfg) if kind is SchemeKind.EI else (None, None)
    x = np.array(x0, dtype=float, copy=True).reshape(-1, lam.size)
    if record is not None:
        record[0] += np.sum(x * x, axis=0)
    lam_next = forward_eigen(lam, sched, tau[0])
    for k in range(cfg.N):
        lam_k, lam_next = lam_next, forward_eigen(lam, sched, tau[k + 1])
        x = _step(kind, x, k, lam_k, lam_next, beta, dt, g1, g2, rng)
        if record is not None:
            record[k + 1] += np.sum(x * x, axis=0)
    return x


@dataclass
class Simulation:
    """Output of ``simulate``: final states and per-step second moments."""

    final: np.ndarray | None
    second_moments: np.ndarray
    n_samples: int


def simulate(kind, spec, cfg: SamplerConfig, seed: int, n_samples: int, workers: int | None = None,
             keep_final: bool = True) -> Simulation:
    """Monte-Carlo run of a scheme in the eigenbasis of the data covariance.

    Initial states are drawn from the configured initialization law. The
    result is a deterministic function of ``(seed, n_samples)`` only.
    """
    kind = SchemeKind.parse(kind)
    lam = np.atleast_1d(as_eigenvalues(spec)).astype(float)
    _require_score(kind, lam, cfg)
    if n_samples < 0:
        raise DomainError("n_samples must be non-negative")
    d = lam.size
    scale = np.sqrt(cfg.init.variance(lam, cfg.sched))

    def run_block(block, start, stop):
        rng = streams.block_rng(seed, block)
        x0 = rng.standard_normal((streams.BLOCK, d))[: stop - start] * scale
        noise = _BlockNoise(rng, stop - start) if kind.stochastic else None
        moments = np.zeros((cfg.N + 1, d))
        final = propagate(kind, lam, cfg, x0, noise, record=moments)
        return (final if keep_final else None), moments

    parts = streams.map_blocks(run_block, n_samples, workers)
    moments = np.zeros((cfg.N + 1, d))
    for _, m in parts:
        moments += m
    if n_samples:
        moments /= n_samples
    final = None
    if keep_final:
        final = np.concatenate([f for f, _ in parts]) if parts else np.empty((0, d))
    return Simulation(final, moments, n_samples)


class _BlockNoise:
    """Draws full-block normal arrays and hands out the rows of the live samples."""

    def __init__(self, rng: np.random.Generator, rows: int):
        self._rng = rng
        self._rows = rows

    def standard_normal(self, shape):
        full = self._rng.standard_normal((streams.BLOCK,) + tuple(shape[1:]))
        return full[: self._rows]


def sample_paths(kind, spec, cfg: SamplerConfig, seed: int, n_samples: int,
                 workers: int | None = None) -> np.ndarray:
    """Final states of ``n_samples`` runs, shape ``(n_samples, d)``, in eigenbasis coordinates."""
    return simulate(kind, spec, cfg, seed, n_samples, workers).final
