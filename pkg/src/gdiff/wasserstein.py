"""Exact 2-Wasserstein errors between commuting centered Gaussians."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateScore, DomainError
from .exact import EXACT_PT, STANDARD_NORMAL, InitLaw, ode_marginal_eigen, sde_marginal_eigen
from .schedule import NoiseSchedule
from .schemes import ALL_SCHEMES, SamplerConfig, SchemeKind, degenerate_mask, recursion_values, time_grid
from .spectrum import CovarianceSpectrum, as_eigenvalues, forward_eigen

CONTINUOUS_SOURCES = ("continuous_sde", "continuous_ode")
_SOURCE_ALIASES = {"sde": "continuous_sde", "ode": "continuous_ode",
                   "continuous_sde": "continuous_sde", "continuous_ode": "continuous_ode"}


def parse_source(source):
    """``"continuous_sde"``, ``"continuous_ode"`` or a ``SchemeKind``."""
    if isinstance(source, SchemeKind):
        return source
    key = str(source).lower()
    if key in _SOURCE_ALIASES:
        return _SOURCE_ALIASES[key]
    return SchemeKind.parse(key)


def continuous_counterpart(kind) -> str:
    return "continuous_sde" if SchemeKind.parse(kind).stochastic else "continuous_ode"


def w2_diag(a, b) -> float:
    """W2 between ``N(0, A)`` and ``N(0, B)`` with ``A, B`` sharing eigenvectors.

    Eigenvalues are paired by index: ``sqrt(sum_i (sqrt(a_i) - sqrt(b_i))**2)``.
    """
    a, b = as_eigenvalues(a), as_eigenvalues(b)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((np.sqrt(a) - np.sqrt(b)) ** 2)))


def _w2_rows(values, reference):
    """W2 per row of a ``(K, d)`` array against a ``(K, d)`` or ``(d,)`` reference."""
    return np.sqrt(np.sum((np.sqrt(np.maximum(values, 0.0)) - np.sqrt(reference)) ** 2, axis=-1))


@dataclass
class ErrorCurve:
    times: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise DomainError("times and values must have the same length")


@dataclass(frozen=True)
class AblationCell:
    scheme: str
    N: int | str
    eps: float
    init: str
    w2: float | None

    @property
    def defined(self) -> bool:
        return self.w2 is not None


def _source_values(source, lam, cfg: SamplerConfig, tau):
    """Eigenvalues of ``source`` at forward times ``tau``, shape ``(len(tau), d)``."""
    if source in CONTINUOUS_SOURCES:
        c0 = cfg.init.variance(lam, cfg.sched)
        fn = sde_marginal_eigen if source == "continuous_sde" else ode_marginal_eigen
        return np.maximum(fn(lam[None, :], c0[None, :], tau[:, None], cfg.sched), 0.0)
    return recursion_values(source, lam, cfg)


def error_curve(source, spec, cfg: SamplerConfig) -> ErrorCurve:
    """W2 between the source's law and ``p_tau`` at every grid forward time ``tau_k``.

    For continuous sources ``cfg.N`` only sets the plotting grid.
    """
    source = parse_source(source)
    lam = as_eigenvalues(spec)
    _, tau = time_grid(cfg)
    values = _source_values(source, lam, cfg, tau)
    reference = forward_eigen(lam[None, :], cfg.sched, tau[:, None])
    label_src = source.label if isinstance(source, SchemeKind) else source
    label = f"{label_src} N={cfg.N} eps={cfg.eps!r} init={cfg.init.short}"
    return ErrorCurve(tau, _w2_rows(values, reference), label)


def final_error(source, spec, cfg: SamplerConfig) -> float:
    """W2 between the source's output at ``tau_N = eps`` and the data law ``N(0, Sigma)``."""
    source = parse_source(source)
    lam = as_eigenvalues(spec)
    if source in CONTINUOUS_SOURCES:
        values = _source_values(source, lam, cfg, np.array([cfg.eps]))[0]
    else:
        values = recursion_values(source, lam, cfg)[-1]
    return float(_w2_rows(values, lam))


def ablation_table(spec, schemes=ALL_SCHEMES, N_list=(50, 250, 500, 1000), eps_list=(0.0, 1e-5, 1e-4, 1e-3),
                   init_list=(EXACT_PT, STANDARD_NORMAL), sched=None) -> list[AblationCell]:
    """Final-time W2 against the data law for every scheme, step count, eps and init.

    Each scheme also gets a ``N="continuous"`` cell from the continuous
    process it discretizes (SDE for EM/EI, ODE for Euler/Heun). Cells where
    the scheme is undefined carry ``w2=None``.
    """
    sched = NoiseSchedule() if sched is None else sched
    lam = as_eigenvalues(spec)
    if lam.size == 0:
        raise DomainError("empty spectrum")
    cells = []
    for kind in map(SchemeKind.parse, schemes):
        for eps in eps_list:
            for init in init_list:
                init = init if isinstance(init, InitLaw) else InitLaw(init)
                base = SamplerConfig(kind, 1, eps, init, sched)
                cont = final_error(continuous_counterpart(kind), lam, base)
                cells.append(AblationCell(kind.value, "continuous", float(eps), init.short, cont))
                for N in N_list:
                    cfg = SamplerConfig(kind, N, eps, init, sched)
                    try:
                        w2 = final_error(kind, lam, cfg)
                    except DegenerateScore:
                        w2 = None
                    cells.append(AblationCell(kind.value, int(N), float(eps), init.short, w2))
    return cells


def eigen_contribution(source, lam_grid, cfg: SamplerConfig) -> np.ndarray:
    """``|sqrt(lam) - sqrt(lam_source)|`` at the final step for each ``lam``.

    Points where the source is undefined (zero eigenvalue under Heun
    without truncation) are NaN.
    """
    source = parse_source(source)
    lam = np.asarray(lam_grid, dtype=float)
    if np.any(lam < 0):
        raise DomainError("eigenvalues must be non-negative")
    out = np.full(lam.shape, np.nan)
    ok = np.ones(lam.shape, dtype=bool)
    if isinstance(source, SchemeKind):
        ok = ~degenerate_mask(source, lam, cfg)
    if np.any(ok):
        if source in CONTINUOUS_SOURCES:
            final = _source_values(source, lam[ok], cfg, np.array([cfg.eps]))[0]
        else:
            final = recursion_values(source, lam[ok], cfg)[-1]
        out[ok] = np.abs(np.sqrt(lam[ok]) - np.sqrt(np.maximum(final, 0.0)))
    return out


def empirical_spectrum_in_basis(samples) -> CovarianceSpectrum:
    """Per-coordinate second moment of eigenbasis samples (mean taken as zero)."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] < 2:
        raise DomainError(f"need at least 2 samples, got {samples.shape[0]}")
    return CovarianceSpectrum(np.mean(samples * samples, axis=0))


def _fmt(x) -> str:
    return repr(float(x))


def curve_csv_text(curves) -> str:
    """One or more curves as ``tau,w2,label`` rows."""
    if isinstance(curves, ErrorCurve):
        curves = [curves]
    lines = ["tau,w2,label"]
    for curve in curves:
        label = curve.label.replace(",", ";")
        lines += [f"{_fmt(t)},{_fmt(v)},{label}" for t, v in zip(curve.times, curve.values)]
    return "\n".join(lines) + "\n"


def write_curve_csv(curves, path) -> None:
    Path(path).write_text(curve_csv_text(curves))


def read_curve_csv(path) -> list[ErrorCurve]:
    rows = Path(path).read_text().splitlines()[1:]
    grouped: dict[str, list] = {}
    for row in rows:
        tau, w2, label = row.split(",", 2)
        grouped.setdefault(label, []).append((float(tau), float(w2)))
    return [ErrorCurve([p[0] for p in pts], [p[1] for p in pts], label) for label, pts in grouped.items()]


def table_csv_text(cells) -> str:
    lines = ["scheme,N,eps,init,w2"]
    for c in cells:
        w2 = "undefined" if c.w2 is None else _fmt(c.w2)
        lines.append(f"{c.scheme},{c.N},{_fmt(c.eps)},{c.init},{w2}")
    return "\n".join(lines) + "\n"


def write_table_csv(cells, path) -> None:
    Path(path).write_text(table_csv_text(cells))


def plot_curves_svg(curves, path, logy: bool = True) -> None:
    """Render curves as an SVG line plot against forward time (needs matplotlib)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if isinstance(curves, ErrorCurve):
        curves = [curves]
    fig, ax = plt.subplots(figsize=(6, 4))
    for curve in curves:
        ax.plot(curve.times, curve.values, label=curve.label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("forward time")
    ax.set_ylabel("W2 error")
    ax.invert_xaxis()
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
