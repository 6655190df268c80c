"""``gdiff`` command line.

Every command writes a CSV (``--out``, default stdout). When the CSV goes
to a file, a flat ``key=value`` manifest is written next to it as
``<out>.manifest``; ``gdiff rerun <manifest>`` replays it.

Exit codes: 0 success, 1 failed validation, 2 usage, 3 domain or
degeneracy error, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import os
import shlex
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, adsn, montecarlo, spectrum, wasserstein
from .errors import DomainError, GdiffError, IngestError, NumericError
from .exact import InitLaw
from .schedule import NoiseSchedule
from .schemes import ALL_SCHEMES, SamplerConfig, SchemeKind
from .streams import THREADS_ENV

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3, 4
MANIFEST_SUFFIX = ".manifest"


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def _schedule_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("noise schedule")
    g.add_argument("--beta-kind", choices=("linear", "constant"), default="linear")
    g.add_argument("--beta-min", type=float, default=0.05, help="beta at t=0 (the constant for --beta-kind constant)")
    g.add_argument("--beta-max", type=float, default=10.0)
    g.add_argument("--T", type=float, default=1.0, dest="T")
    return p


def _output_parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="output CSV path (default: stdout, no manifest)")
    return p


def _sampler_parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--N", type=int, default=1000, dest="N", help="number of steps")
    p.add_argument("--eps", type=float, default=1e-3, help="truncation time")
    p.add_argument("--init", default="N0", help="N0 (standard normal) or pT (exact p_T)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gdiff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gdiff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sched, out, sampler = _schedule_parent(), _output_parent(), _sampler_parent()

    sp = sub.add_parser("spectrum", help="load, estimate or synthesize a covariance spectrum")
    spsub = sp.add_subparsers(dest="action", required=True)
    p = spsub.add_parser("load", parents=[out], help="validate and normalize a spectrum CSV")
    p.add_argument("--input", required=True)
    p = spsub.add_parser("empirical", parents=[out], help="spectrum of the empirical covariance of samples")
    p.add_argument("--data", required=True, help="CSV with one sample per row")
    p = spsub.add_parser("synth", parents=[out], help="synthetic spectrum")
    p.add_argument("--kind", choices=("loguniform", "geometric", "powerlaw", "single"), default="powerlaw")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda-min", type=float, default=1e-6)
    p.add_argument("--lambda-max", type=float, default=1e3)
    p.add_argument("--append-zero", action="store_true", help="append a zero eigenvalue")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("curve", parents=[sched, sampler, out], help="W2 error along the sampling trajectory")
    p.add_argument("--source", required=True, help="em, ei, euler, heun, continuous_sde or continuous_ode")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--svg", help="also render the curve as SVG")
    p.add_argument("--linear-y", action="store_true", help="linear instead of log y axis in the SVG")

    p = sub.add_parser("ablation", parents=[sched, out], help="final W2 over schemes, N, eps and init")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--schemes", type=_str_list, default=[k.value for k in ALL_SCHEMES])
    p.add_argument("--N-list", type=_int_list, default=[50, 250, 500, 1000], dest="N_list")
    p.add_argument("--eps-list", type=_float_list, default=[0.0, 1e-5, 1e-4, 1e-3])
    p.add_argument("--init-list", type=_str_list, default=["pT", "N0"])

    p = sub.add_parser("contrib", parents=[sched, sampler, out], help="per-eigenvalue final error contribution")
    p.add_argument("--source", default="heun")
    p.add_argument("--lambda-min", type=float, default=1e-6)
    p.add_argument("--lambda-max", type=float, default=1e3)
    p.add_argument("--points", type=int, default=200)

    p = sub.add_parser("validate", parents=[sched, sampler, out], help="Monte-Carlo check of a variance formula")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--scheme", help="em, ei, euler or heun: check the eigenvalue recursion")
    what.add_argument("--continuous", choices=("sde", "ode"), help="check the closed-form marginal")
    p.add_argument("--lambda", type=float, required=True, dest="lam")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z-max", type=float, default=montecarlo.DEFAULT_Z_MAX)
    p.add_argument("--heun-unsquared", action="store_true", help="use the unsquared Heun factor")
    p.add_argument("--c0", type=float, help="initial variance for --continuous (default from --init)")
    p.add_argument("--s-grid", type=_float_list, help="forward times for --continuous (default 0..T, 11 points)")

    ap = sub.add_parser("adsn", help="ADSN texture model")
    asub = ap.add_subparsers(dest="action", required=True)
    p = asub.add_parser("spectrum", parents=[out], help="per-frequency eigenvalue of the exemplar's ADSN model")
    p.add_argument("--image", required=True)
    p = asub.add_parser("sample", help="draw ADSN samples as images")
    p.add_argument("--image", required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output image path; with --n > 1 an index is appended")
    p = asub.add_parser("estimate", parents=[out], help="eigenvalue estimates from exact ADSN samples")
    p.add_argument("--image", required=True)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--channel-averaged", action="store_true", help="divide by 3MN instead of MN (biased low)")
    p = asub.add_parser("emp-w2", parents=[out], help="empirical W2 of exact samples for several sample sizes")
    p.add_argument("--image", required=True)
    p.add_argument("--n-list", type=_int_list, default=[12_500, 25_000, 50_000])
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("rerun", help="replay a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to this path instead of the recorded one")
    return parser


def _schedule(args) -> NoiseSchedule:
    if args.beta_kind == "constant":
        return NoiseSchedule.constant(args.beta_min, args.T)
    return NoiseSchedule.linear(args.beta_min, args.beta_max, args.T)


def _config(args, kind=SchemeKind.HEUN) -> SamplerConfig:
    return SamplerConfig(kind, args.N, args.eps, InitLaw(args.init), _schedule(args))


def _emit(args, text: str, stdout) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)


def _spectrum_text(spec) -> str:
    return "".join(f"{float(x)!r}\n" for x in spectrum.as_eigenvalues(spec))


def cmd_spectrum(args, stdout):
    if args.action == "load":
        spec = spectrum.load_spectrum_csv(args.input)
    elif args.action == "empirical":
        spec = spectrum.empirical_spectrum(spectrum.load_samples_csv(args.data))
    else:
        spec = spectrum.synthetic_spectrum(args.kind, args.d, args.lambda_min, args.lambda_max, args.seed)
        if args.append_zero:
            spec = spectrum.CovarianceSpectrum(np.append(spectrum.as_eigenvalues(spec), 0.0))
    _emit(args, _spectrum_text(spec), stdout)
    return EXIT_OK


def cmd_curve(args, stdout):
    spec = spectrum.load_spectrum_csv(args.spectrum)
    curve = wasserstein.error_curve(args.source, spec, _config(args))
    _emit(args, wasserstein.curve_csv_text(curve), stdout)
    if args.svg:
        wasserstein.plot_curves_svg(curve, args.svg, logy=not args.linear_y)
    return EXIT_OK


def cmd_ablation(args, stdout):
    spec = spectrum.load_spectrum_csv(args.spectrum)
    cells = wasserstein.ablation_table(spec, [SchemeKind.parse(s) for s in args.schemes], args.N_list,
                                       args.eps_list, [InitLaw(i) for i in args.init_list], _schedule(args))
    _emit(args, wasserstein.table_csv_text(cells), stdout)
    return EXIT_OK


def cmd_contrib(args, stdout):
    if not 0 < args.lambda_min <= args.lambda_max:
        raise DomainError("need 0 < lambda-min <= lambda-max")
    if args.points < 1:
        raise DomainError("--points must be positive")
    lam = np.geomspace(args.lambda_min, args.lambda_max, args.points)
    contrib = wasserstein.eigen_contribution(args.source, lam, _config(args))
    lines = ["lambda,contribution"] + [f"{x!r},{y!r}" for x, y in zip(lam.tolist(), contrib.tolist())]
    _emit(args, "\n".join(lines) + "\n", stdout)
    return EXIT_OK


def cmd_validate(args, stdout):
    if args.scheme:
        kind = SchemeKind.parse(args.scheme)
        report = montecarlo.validate_scheme(kind, args.lam, _config(args, kind), args.samples, args.seed,
                                            args.z_max, heun_squared=not args.heun_unsquared)
    else:
        sched = _schedule(args)
        c0 = args.c0 if args.c0 is not None else float(InitLaw(args.init).variance(args.lam, sched))
        s_grid = args.s_grid if args.s_grid is not None else np.linspace(0.0, sched.T, 11)
        report = montecarlo.validate_continuous(args.continuous, args.lam, c0, sched, s_grid, args.samples,
                                                args.seed, args.z_max)
    _emit(args, report.to_csv(), stdout)
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_adsn(args, stdout):
    texton = adsn.texton_from_image(adsn.read_image(args.image))
    if args.action == "spectrum":
        _emit(args, adsn.spectrum_csv_text(adsn.adsn_spectrum(texton)), stdout)
    elif args.action == "sample":
        samples = adsn.adsn_sample(texton, args.seed, args.n, add_mean=True)
        if args.n == 1:
            adsn.write_image(args.out, samples[0])
        else:
            stem, suffix = os.path.splitext(args.out)
            for i, img in enumerate(samples):
                adsn.write_image(f"{stem}_{i:04d}{suffix or '.png'}", img)
    elif args.action == "estimate":
        basis = adsn.frequency_basis(texton)
        est = adsn.empirical_eigenvalues(adsn.adsn_sample(texton, args.seed, args.n), basis,
                                         channel_averaged=args.channel_averaged)
        _emit(args, adsn.estimates_csv_text(est), stdout)
    else:
        ref = adsn.adsn_spectrum(texton)
        basis = adsn.frequency_basis(texton)
        lines = ["n,replicate,w2"]
        for n in args.n_list:
            for r in range(args.replicates):
                samples = adsn.adsn_sample(texton, args.seed + 1_000_003 * r + n, n)
                w2 = adsn.empirical_w2_adsn(adsn.empirical_eigenvalues(samples, basis), ref)
                lines.append(f"{n},{r},{w2!r}")
        _emit(args, "\n".join(lines) + "\n", stdout)
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "curve": cmd_curve, "ablation": cmd_ablation, "contrib": cmd_contrib,
            "validate": cmd_validate, "adsn": cmd_adsn}


def write_manifest(path, argv, args) -> None:
    entries = {
        "command": args.command + (f" {args.action}" if getattr(args, "action", None) else ""),
        "argv": shlex.join(argv),
        "version": __version__,
        "seed": getattr(args, "seed", ""),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "threads": os.environ.get(THREADS_ENV, ""),
    }
    for key, value in sorted(vars(args).items()):
        if key not in ("command", "action"):
            entries[f"arg.{key}"] = value
    lines = [f"{k}={_manifest_value(v)}" for k, v in entries.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def _manifest_value(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def read_manifest(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if "=" not in line:
            raise IngestError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        entries[key] = value
    if "argv" not in entries:
        raise IngestError(f"{path}: manifest has no argv entry")
    return entries


def _replace_out(argv, out):
    argv = list(argv)
    for i, tok in enumerate(argv):
        if tok == "--out" and i + 1 < len(argv):
            argv[i + 1] = out
            return argv
        if tok.startswith("--out="):
            argv[i] = f"--out={out}"
            return argv
    return argv + ["--out", out]


def _output_path(args):
    if args.command == "adsn" and args.action == "sample":
        return None
    return getattr(args, "out", None)


def _run(argv, stdout):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rerun":
        recorded = shlex.split(read_manifest(args.manifest)["argv"])
        if args.out:
            recorded = _replace_out(recorded, args.out)
        return _run(recorded, stdout)
    code = COMMANDS[args.command](args, stdout)
    out = _output_path(args)
    if out:
        write_manifest(out + MANIFEST_SUFFIX, argv, args)
    return code


def main(argv=None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = sys.stdout if stdout is None else stdout
    try:
        code = _run(argv, stdout)
    except SystemExit as exc:  # argparse usage errors and --help
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except NumericError as exc:
        print(f"gdiff: numeric failure: {exc}", file=sys.stderr)
        code = EXIT_NUMERIC
    except (GdiffError, FileNotFoundError) as exc:
        print(f"gdiff: error: {exc}", file=sys.stderr)
        code = EXIT_DOMAIN
    return code


if __name__ == "__main__":
    sys.exit(main())
