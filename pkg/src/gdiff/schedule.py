"""Noise schedules for the variance-preserving forward SDE.

The forward process is ``dx = -beta(t) x dt + sqrt(2 beta(t)) dw`` on
``[0, T]``. Every covariance formula in the package depends on time only
through ``beta(t)`` and its integral ``B(t)``, so a schedule is just those
two functions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

KINDS = ("constant", "linear")


@dataclass(frozen=True)
class NoiseSchedule:
    """Weight function ``beta`` on ``[0, T]``.

    For ``kind="constant"`` only ``beta_min`` is used. For ``kind="linear"``
    beta interpolates from ``beta_min`` at ``t=0`` to ``beta_max`` at ``t=T``.
    """

    kind: str = "linear"
    beta_min: float = 0.05
    beta_max: float = 10.0
    T: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown schedule kind {self.kind!r}; expected one of {KINDS}")
        if not self.beta_min > 0:
            raise DomainError(f"beta_min must be positive, got {self.beta_min}")
        if self.kind == "linear" and self.beta_max < self.beta_min:
            raise DomainError(f"beta_max ({self.beta_max}) < beta_min ({self.beta_min})")
        if not self.T > 0:
            raise DomainError(f"T must be positive, got {self.T}")

    @classmethod
    def constant(cls, beta: float = 1.0, T: float = 1.0) -> "NoiseSchedule":
        return cls("constant", beta, beta, T)

    @classmethod
    def linear(cls, beta_min: float = 0.05, beta_max: float = 10.0, T: float = 1.0) -> "NoiseSchedule":
        return cls("linear", beta_min, beta_max, T)

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.T) or np.any(np.isnan(t)):
            raise DomainError(f"time outside [0, {self.T}]: {t}")
        return t

    def beta(self, t):
        """``beta(t)``; accepts scalars or arrays."""
        t = self._check(t)
        if self.kind == "constant":
            out = np.full_like(t, self.beta_min)
        else:
            out = self.beta_min + (self.beta_max - self.beta_min) * t / self.T
        return out if out.ndim else float(out)

    def B(self, t):
        """Closed-form integral of beta from 0 to ``t``."""
        t = self._check(t)
        if self.kind == "constant":
            out = self.beta_min * t
        else:
            out = self.beta_min * t + (self.beta_max - self.beta_min) * t**2 / (2 * self.T)
        return out if out.ndim else float(out)


def beta_at(sched: NoiseSchedule, t):
    return sched.beta(t)


def B_at(sched: NoiseSchedule, t):
    return sched.B(t)
