"""Closed-form marginals of the continuous backward SDE and flow ODE.

All formulas are per eigenvalue and indexed by forward time ``s``: the
backward process at backward time ``T - s`` is compared with ``p_s``.
``c0`` is the eigenvalue of the initial covariance (1 for a standard
normal start, ``lam_T`` for an exact ``p_T`` start).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .schedule import NoiseSchedule
from .spectrum import CovarianceSpectrum, as_eigenvalues, forward_eigen

INIT_KINDS = ("standard_normal", "p_T", "custom")
_INIT_ALIASES = {"n0": "standard_normal", "N0": "standard_normal", "standard_normal": "standard_normal",
                 "pT": "p_T", "p_T": "p_T", "pt": "p_T", "custom": "custom"}


@dataclass(frozen=True)
class InitLaw:
    """Law of the backward process at its start (forward time ``T``)."""

    kind: str = "standard_normal"
    custom_eigenvalue: float | None = None

    def __post_init__(self):
        kind = _INIT_ALIASES.get(self.kind)
        if kind is None:
            raise DomainError(f"unknown initialization {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "custom":
            if self.custom_eigenvalue is None or not self.custom_eigenvalue >= 0:
                raise DomainError("custom initialization needs a non-negative custom_eigenvalue")

    @property
    def short(self) -> str:
        return {"standard_normal": "N0", "p_T": "pT", "custom": "custom"}[self.kind]

    def variance(self, lam, sched: NoiseSchedule):
        """Initial eigenvalue for each data eigenvalue ``lam``."""
        lam = np.asarray(lam, dtype=float)
        if self.kind == "standard_normal":
            return np.ones_like(lam)
        if self.kind == "p_T":
            return forward_eigen(lam, sched, sched.T)
        return np.full_like(lam, self.custom_eigenvalue)


STANDARD_NORMAL = InitLaw("standard_normal")
EXACT_PT = InitLaw("p_T")


def _check_s(s, sched):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > sched.T):
        raise DomainError(f"forward time outside [0, {sched.T}]")
    return s


def sde_marginal_eigen(lam, c0, s, sched: NoiseSchedule):
    """Eigenvalue of the backward SDE marginal at forward time ``s``.

    ``lam_s + exp(-2(B_T - B_s)) lam_s**2 / lam_T**2 * (c0 - lam_T)``
    """
    s = _check_s(s, sched)
    lam_s = forward_eigen(lam, sched, s)
    lam_T = forward_eigen(lam, sched, sched.T)
    damp = np.exp(-2.0 * (sched.B(sched.T) - np.asarray(sched.B(s))))
    return lam_s + damp * lam_s**2 / lam_T**2 * (np.asarray(c0, dtype=float) - lam_T)


def ode_marginal_eigen(lam, c0, s, sched: NoiseSchedule):
    """Eigenvalue of the flow-ODE marginal at forward time ``s``: ``(lam_s / lam_T) c0``."""
    s = _check_s(s, sched)
    return forward_eigen(lam, sched, s) / forward_eigen(lam, sched, sched.T) * np.asarray(c0, dtype=float)


def sde_gain(lam, s, sched: NoiseSchedule):
    """Multiplier applied to the initial state by the backward SDE solution."""
    s = _check_s(s, sched)
    lam_s = forward_eigen(lam, sched, s)
    lam_T = forward_eigen(lam, sched, sched.T)
    return np.exp(-(sched.B(sched.T) - np.asarray(sched.B(s)))) * lam_s / lam_T


def sde_noise_eigen(lam, s, sched: NoiseSchedule):
    """Variance of the stochastic part of the backward SDE solution,
    ``lam_s - exp(-2(B_T - B_s)) lam_s**2 / lam_T``.
    """
    s = _check_s(s, sched)
    lam_s = forward_eigen(lam, sched, s)
    lam_T = forward_eigen(lam, sched, sched.T)
    damp = np.exp(-2.0 * (sched.B(sched.T) - np.asarray(sched.B(s))))
    return lam_s - damp * lam_s**2 / lam_T


def ode_gain(lam, s, sched: NoiseSchedule):
    """Optimal-transport multiplier ``sqrt(lam_s / lam_T)`` of the flow ODE."""
    return np.sqrt(ode_marginal_eigen(lam, 1.0, s, sched))


def generative_marginals(spec, sched: NoiseSchedule, s, init: InitLaw = STANDARD_NORMAL):
    """SDE and ODE marginal spectra at forward time ``s``.

    With the default standard normal start these are the spectra of the
    generative processes; with ``init=EXACT_PT`` both equal ``p_s``.
    """
    lam = as_eigenvalues(spec)
    c0 = init.variance(lam, sched)
    sde = np.maximum(sde_marginal_eigen(lam, c0, s, sched), 0.0)
    ode = ode_marginal_eigen(lam, c0, s, sched)
    return CovarianceSpectrum(sde), CovarianceSpectrum(ode)
