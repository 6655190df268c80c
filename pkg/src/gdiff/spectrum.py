"""Data covariance represented by its eigenvalues.

Every covariance met along the forward process, the exact backward
processes and the discretized samplers shares the eigenvectors of the data
covariance, so after ingestion only the eigenvalues are kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, IngestError, NumericError
from .schedule import NoiseSchedule

CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CovarianceSpectrum:
    """Non-negative eigenvalues of a covariance matrix.

    Ingestion paths return eigenvalues sorted in descending order. Spectra
    derived from another one (forward marginals, sampler outputs) keep the
    index alignment of their source, which is what pairs eigenvalues
    sharing an eigenvector in the Wasserstein formula.
    """

    eigenvalues: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float).reshape(-1)
        if np.any(np.isnan(lam)):
            raise DomainError("eigenvalues contain NaN")
        if np.any(lam < 0):
            raise DomainError(f"negative eigenvalue {lam.min()}")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @classmethod
    def sorted(cls, values) -> "CovarianceSpectrum":
        lam = np.sort(np.asarray(values, dtype=float).reshape(-1))[::-1]
        return cls(lam)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def __len__(self):
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.eigenvalues, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, CovarianceSpectrum):
            return NotImplemented
        return np.array_equal(self.eigenvalues, other.eigenvalues)

    def __repr__(self):
        return f"CovarianceSpectrum(dim={self.dim}, eigenvalues={self.eigenvalues!r})"


def as_eigenvalues(spec) -> np.ndarray:
    """Eigenvalue array of a spectrum or of any array-like."""
    if isinstance(spec, CovarianceSpectrum):
        return spec.eigenvalues
    return np.asarray(spec, dtype=float)


def load_spectrum_csv(path) -> CovarianceSpectrum:
    """Read one non-negative eigenvalue per line.

    Blank lines are ignored. Raises IngestError naming the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            continue
        try:
            value = float(token)
        except ValueError:
            raise IngestError(f"{path}:{lineno}: cannot parse {token!r} as a number") from None
        if math.isnan(value) or value < 0:
            raise IngestError(f"{path}:{lineno}: eigenvalue must be non-negative, got {token!r}")
        values.append(value)
    if not values:
        raise IngestError(f"{path}: empty spectrum file")
    return CovarianceSpectrum.sorted(values)


def save_spectrum_csv(spec, path) -> None:
    lam = as_eigenvalues(spec)
    Path(path).write_text("".join(f"{v!r}\n" for v in map(float, lam)))


def load_samples_csv(path) -> np.ndarray:
    """Sample matrix, one comma-separated sample per row, no header."""
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (OSError, ValueError) as exc:
        raise IngestError(f"{path}: {exc}") from exc
    if data.size == 0:
        raise IngestError(f"{path}: no samples")
    return data


def empirical_spectrum(data) -> CovarianceSpectrum:
    """Eigenvalues of the centered empirical covariance ``(1/n) sum (x - xbar)(x - xbar)^T``.

    The per-coordinate empirical mean is subtracted. Eigenvalues within
    roundoff of zero are clamped to exactly zero.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise DomainError(f"sample matrix must be 2-D, got shape {data.shape}")
    if not np.all(np.isfinite(data)):
        raise DomainError("samples contain NaN or infinite values")
    n = data.shape[0]
    if n < 2:
        raise DomainError(f"need at least 2 samples, got {n}")
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / n
    cov = 0.5 * (cov + cov.T)
    try:
        lam = np.linalg.eigvalsh(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver did not converge: {exc}") from exc
    tol = CLAMP_TOL * max(1.0, float(np.abs(lam).max(initial=0.0)))
    if np.any(lam < -tol):
        raise NumericError(f"covariance has a negative eigenvalue {lam.min()} beyond roundoff")
    lam[lam < 0] = 0.0
    return CovarianceSpectrum.sorted(lam)


def synthetic_spectrum(kind: str, d: int, lam_min: float, lam_max: float, seed: int = 0) -> CovarianceSpectrum:
    """Synthetic spectra for sweeps.

    kinds:
        ``loguniform``: log-eigenvalues uniform on ``[log lam_min, log lam_max]``.
        ``geometric``: ``d`` log-spaced values from ``lam_max`` down to ``lam_min``.
        ``powerlaw``: ``lam_max * i**-alpha`` for ``i = 1..d`` with ``alpha``
            chosen so that the last value is ``lam_min``; mimics the decay of
            natural-image covariances.
        ``single``: ``d`` copies of ``lam_max``.
    """
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if not 0 <= lam_min <= lam_max:
        raise DomainError(f"need 0 <= lam_min <= lam_max, got {lam_min}, {lam_max}")
    if kind == "single":
        return CovarianceSpectrum(np.full(d, float(lam_max)))
    if lam_min <= 0:
        raise DomainError(f"{kind} spectrum needs lam_min > 0")
    if kind == "loguniform":
        rng = np.random.default_rng(seed)
        lam = np.exp(rng.uniform(math.log(lam_min), math.log(lam_max), size=d))
        return CovarianceSpectrum.sorted(lam)
    if kind == "geometric":
        if d == 1:
            return CovarianceSpectrum(np.array([float(lam_max)]))
        return CovarianceSpectrum(np.geomspace(lam_max, lam_min, d))
    if kind == "powerlaw":
        if d == 1:
            return CovarianceSpectrum(np.array([float(lam_max)]))
        alpha = math.log(lam_max / lam_min) / math.log(d)
        lam = lam_max * np.arange(1, d + 1, dtype=float) ** -alpha
        lam[-1] = lam_min
        return CovarianceSpectrum(lam)
    raise DomainError(f"unknown synthetic spectrum kind {kind!r}")


def forward_eigen(lam, sched: NoiseSchedule, t):
    """Eigenvalue of the forward covariance at time ``t``:
    ``exp(-2B(t)) lam + 1 - exp(-2B(t))``.
    """
    decay = np.exp(-2.0 * np.asarray(sched.B(t)))
    return decay * np.asarray(lam, dtype=float) + (1.0 - decay)


def forward_spectrum(spec, sched: NoiseSchedule, t: float) -> CovarianceSpectrum:
    """Spectrum of the forward marginal ``p_t``; ordering is preserved."""
    return CovarianceSpectrum(forward_eigen(as_eigenvalues(spec), sched, t))
