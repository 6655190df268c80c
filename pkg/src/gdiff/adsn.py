"""ADSN Gaussian microtexture model.

An RGB exemplar ``u`` of size ``M x N`` defines the texton
``t_c = (u_c - m_c) / sqrt(MN)``. ADSN samples are ``X_c = t_c * w`` (periodic
convolution) with a single scalar white noise ``w`` shared by the three
channels. The covariance acts frequency by frequency as the rank-one
Hermitian matrix ``t(xi) t(xi)^H`` on ``C^3``, where ``t(xi)`` is the
unnormalized DFT ``sum_x v(x) exp(-2i pi (x1 xi1 / M + x2 xi2 / N))``.
That gives one eigenvalue ``|t(xi)|^2`` per frequency plus ``2MN`` zeros.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import streams
from .errors import DomainError, IngestError

GS_TOL = 1e-10
ZERO_FREQ_TOL = 1e-12


def dft2(v):
    """Unnormalized 2-D DFT over the last two axes."""
    return np.fft.fft2(v, axes=(-2, -1))


def idft2(v):
    """Inverse of ``dft2`` (carries the ``1/(MN)`` factor)."""
    return np.fft.ifft2(v, axes=(-2, -1))


@dataclass(frozen=True, eq=False)
class Texton:
    channels: np.ndarray
    means: np.ndarray

    @property
    def M(self) -> int:
        return self.channels.shape[1]

    @property
    def N(self) -> int:
        return self.channels.shape[2]

    def add_mean(self, samples):
        """Shift zero-mean samples of shape ``(..., 3, M, N)`` back to the exemplar's color mean."""
        return np.asarray(samples) + self.means[:, None, None]


@dataclass(frozen=True, eq=False)
class AdsnSpectrum:
    lambda1: np.ndarray
    zero_multiplicity: int

    @property
    def shape(self):
        return self.lambda1.shape


@dataclass(frozen=True, eq=False)
class FrequencyBasis:
    """Orthonormal triple per frequency; ``vectors[r, c, j]`` is the j-th unit vector in ``C^3``."""

    vectors: np.ndarray

    @property
    def shape(self):
        return self.vectors.shape[:2]


def texton_from_image(u) -> Texton:
    u = np.asarray(u, dtype=float)
    if u.ndim != 3 or u.shape[0] != 3:
        raise DomainError(f"expected a 3 x M x N image, got shape {u.shape}")
    M, N = u.shape[1:]
    if M < 1 or N < 1:
        raise DomainError("image must be non-empty")
    means = u.mean(axis=(1, 2))
    t = (u - means[:, None, None]) / np.sqrt(M * N)
    return Texton(t, means)


def adsn_spectrum(t: Texton) -> AdsnSpectrum:
    lam = np.sum(np.abs(dft2(t.channels)) ** 2, axis=0)
    lam[0, 0] = 0.0  # zero-mean texton
    return AdsnSpectrum(lam, 2 * t.M * t.N)


def adsn_sample(t: Texton, seed: int, n: int, add_mean: bool = False, workers: int | None = None) -> np.ndarray:
    """``n`` ADSN samples, shape ``(n, 3, M, N)``; deterministic in ``(seed, n)``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    M, N = t.M, t.N
    t_hat = dft2(t.channels)

    def run_block(block, start, stop):
        rng = streams.block_rng(seed, block)
        w = rng.standard_normal((streams.BLOCK, M, N))[: stop - start]
        return idft2(t_hat[None] * dft2(w)[:, None]).real

    parts = streams.map_blocks(run_block, n, workers)
    out = np.concatenate(parts) if parts else np.empty((0, 3, M, N))
    return t.add_mean(out) if add_mean else out


def _hdot(a, b):
    """Hermitian inner product ``a^H b`` over the last axis."""
    return np.sum(np.conj(a) * b, axis=-1)


def frequency_basis(t: Texton) -> FrequencyBasis:
    """Per-frequency Gram-Schmidt of ``(t, (-conj t3, 0, conj t1), (0, -conj t3, conj t2))``.

    Candidates that are zero or dependent are skipped and the triple is
    completed with the canonical vectors, so frequencies where the texton's
    transform vanishes get the canonical basis.
    """
    th = np.moveaxis(dft2(t.channels), 0, -1)  # (M, N, 3)
    scale = np.abs(th).max(initial=0.0)
    th = np.where(np.linalg.norm(th, axis=-1, keepdims=True) > ZERO_FREQ_TOL * scale, th, 0)
    t1, t2, t3 = (th[..., c] for c in range(3))
    zero = np.zeros_like(t1)
    candidates = [
        th,
        np.stack([-np.conj(t3), zero, np.conj(t1)], axis=-1),
        np.stack([zero, -np.conj(t3), np.conj(t2)], axis=-1),
    ]
    eye = np.eye(3, dtype=complex)
    candidates += [np.broadcast_to(eye[c], th.shape) for c in range(3)]

    shape = th.shape[:2]
    basis = np.zeros(shape + (3, 3), dtype=complex)  # [..., slot, component]
    count = np.zeros(shape, dtype=int)
    for cand in candidates:
        norm0 = np.linalg.norm(cand, axis=-1)
        vec = cand.copy()
        for slot in range(3):
            q = basis[..., slot, :]
            vec = vec - _hdot(q, vec)[..., None] * q
        norm = np.linalg.norm(vec, axis=-1)
        take = (count < 3) & (norm0 > 0) & (norm > GS_TOL * np.maximum(norm0, 1e-300))
        if not np.any(take):
            continue
        unit = vec / np.where(norm > 0, norm, 1.0)[..., None]
        rows, cols = np.nonzero(take)
        basis[rows, cols, count[rows, cols]] = unit[rows, cols]
        count += take
    return FrequencyBasis(np.swapaxes(basis, -1, -2))


def empirical_eigenvalues(samples, basis: FrequencyBasis, channel_averaged: bool = False,
                          chunk: int = 4096) -> np.ndarray:
    """Per-frequency eigenvalue estimates, shape ``(M, N, 3)``.

    ``lam_j(xi) = c * mean_k |<v_j(xi), Y_k(xi)>|^2`` with ``c = 1/(MN)``,
    which is unbiased for samples of a Gaussian whose covariance has the
    basis as eigenvectors. ``channel_averaged=True`` uses ``1/(3MN)``,
    which underestimates by a factor 3.
    """
    samples = np.asarray(samples)
    if samples.ndim == 3:
        samples = samples[None]
    if samples.ndim != 4 or samples.shape[1] != 3:
        raise DomainError(f"samples must have shape (n, 3, M, N), got {samples.shape}")
    n, _, M, N = samples.shape
    if n < 1:
        raise DomainError("need at least one sample")
    if basis.shape != (M, N):
        raise DomainError(f"basis is {basis.shape}, samples are {(M, N)}")
    v_conj = np.conj(basis.vectors)  # (M, N, comp, j)
    acc = np.zeros((M, N, 3))
    for start in range(0, n, chunk):
        y_hat = np.moveaxis(dft2(samples[start:start + chunk]), 1, -1)  # (b, M, N, 3)
        proj = (y_hat[..., None, :] @ v_conj)[..., 0, :]  # (b, M, N, j)
        acc += np.sum(np.abs(proj) ** 2, axis=0)
    norm = (3 if channel_averaged else 1) * M * N * n
    return acc / norm


def empirical_w2_adsn(est, ref: AdsnSpectrum) -> float:
    """``sqrt(sum_xi (sqrt(l1) - sqrt(lam))**2 + l2 + l3)`` for estimates ``est`` of shape ``(M, N, 3)``."""
    est = np.asarray(est, dtype=float)
    if est.shape != ref.shape + (3,):
        raise DomainError(f"estimate shape {est.shape} does not match spectrum {ref.shape}")
    l1, l2, l3 = est[..., 0], est[..., 1], est[..., 2]
    total = np.sum((np.sqrt(l1) - np.sqrt(ref.lambda1)) ** 2 + l2 + l3)
    return float(np.sqrt(total))


def read_image(path) -> np.ndarray:
    """Load an RGB image (any format Pillow reads) as ``(3, M, N)`` floats in [0, 1]."""
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            rgb = np.asarray(im.convert("RGB"), dtype=float) / 255.0
    except (OSError, UnidentifiedImageError) as exc:
        raise IngestError(f"{path}: cannot read image ({exc})") from exc
    return np.moveaxis(rgb, -1, 0)


def write_image(path, image) -> None:
    """Save a ``(3, M, N)`` image with values in [0, 1] (clipped) as 8-bit RGB."""
    from PIL import Image

    img = np.clip(np.asarray(image, dtype=float), 0.0, 1.0)
    if img.ndim != 3 or img.shape[0] != 3:
        raise DomainError(f"expected a 3 x M x N image, got shape {img.shape}")
    raw = np.round(np.moveaxis(img, 0, -1) * 255).astype(np.uint8)
    Image.fromarray(raw).save(path)


def _fmt(x) -> str:
    return repr(float(x))


def spectrum_csv_text(spec: AdsnSpectrum) -> str:
    M, N = spec.shape
    lines = ["xi_row,xi_col,lambda"]
    lines += [f"{r},{c},{_fmt(spec.lambda1[r, c])}" for r in range(M) for c in range(N)]
    return "\n".join(lines) + "\n"


def write_spectrum_csv(spec: AdsnSpectrum, path) -> None:
    Path(path).write_text(spectrum_csv_text(spec))


def estimates_csv_text(est) -> str:
    est = np.asarray(est, dtype=float)
    M, N, _ = est.shape
    lines = ["xi_row,xi_col,l1,l2,l3"]
    for r in range(M):
        for c in range(N):
            lines.append(f"{r},{c}," + ",".join(_fmt(x) for x in est[r, c]))
    return "\n".join(lines) + "\n"


def write_estimates_csv(est, path) -> None:
    Path(path).write_text(estimates_csv_text(est))


def read_estimates_csv(path) -> np.ndarray:
    try:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise IngestError(f"{path}: {exc}") from exc
    M, N = int(rows[:, 0].max()) + 1, int(rows[:, 1].max()) + 1
    est = np.zeros((M, N, 3))
    est[rows[:, 0].astype(int), rows[:, 1].astype(int)] = rows[:, 2:5]
    return est
