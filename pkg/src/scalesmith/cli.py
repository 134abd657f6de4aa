"""Command-line entry point: ``scalesmith {kernel,spread,scalesel,render}``."""
from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .bench import BenchConfig, cmd_render, cmd_scalesel, cmd_spread
from .diffops import central_difference
from .grid2d import Detector
from .kernels1d import (
    MethodId,
    SmoothingKernel,
    derivative_kernel,
    integrated_gaussian,
    integrated_gaussian_derivative,
    norm_sampled_gaussian,
    sampled_gaussian,
    sampled_gaussian_derivative,
    smoothing_kernel,
)
from .scalesel import NoExtremumError
from .signals import ModelKind

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(parse):
    def convert(text):
        try:
            return tuple(parse(x.strip()) for x in text.split(",") if x.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return convert


_RADIUS_BUILDERS = {
    SmoothingKernel.SAMPLED: sampled_gaussian,
    SmoothingKernel.NORM_SAMPLED: norm_sampled_gaussian,
    SmoothingKernel.INTEGRATED: integrated_gaussian,
}


def _resolve_kernel(name: str, order: int, sigma: float, radius: int | None):
    s = sigma * sigma
    try:
        kind = SmoothingKernel(name)
    except ValueError:
        kind = None
    if kind is not None:
        if order != 0:
            raise UsageError(f"{name} is a smoothing kernel; use --order 0")
        if radius is None:
            return smoothing_kernel(kind, s).coeffs
        if kind not in _RADIUS_BUILDERS:
            raise UsageError(f"{name} has no adjustable radius")
        return _RADIUS_BUILDERS[kind](s, radius).coeffs
    method = MethodId.parse(name)
    if radius is None:
        return derivative_kernel(method, s, order).coeffs
    if order == 0 and method.smoothing in _RADIUS_BUILDERS and not method.central_differences:
        return _RADIUS_BUILDERS[method.smoothing](s, radius).coeffs
    if method is MethodId.SAMPLED_DER:
        return sampled_gaussian_derivative(s, order, radius).coeffs
    if method is MethodId.INTEGRATED_DER:
        return integrated_gaussian_derivative(s, order, radius).coeffs
    raise UsageError(f"{name} has no adjustable radius")


def run_kernel(args) -> int:
    if not 0 <= args.order <= 4:
        raise UsageError(f"order must be in [0, 4], got {args.order}")
    if args.method is None:
        # stencil mode: weights on f(x + n)
        coeffs = central_difference(args.order).taps
    else:
        if args.sigma is None:
            raise UsageError("--sigma is required with --method")
        if not (math.isfinite(args.sigma) and args.sigma >= 0):
            raise UsageError("--sigma must be finite and non-negative")
        if args.radius is not None and args.radius < 1:
            raise UsageError("--radius must be at least 1")
        coeffs = _resolve_kernel(args.method, args.order, args.sigma, args.radius)
    r = (len(coeffs) - 1) // 2
    out = ["n,coeff"] + [f"{n},{c:.17g}" for n, c in zip(range(-r, r + 1), coeffs)]
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def _config(args) -> BenchConfig:
    config = BenchConfig.load(args.config) if args.config else BenchConfig()
    for key in ("sigma0_min", "sigma0_max", "sigma0_steps", "grid_min", "grid_max",
                "grid_levels", "methods", "detectors", "out", "workers",
                "spread_min", "spread_max", "spread_steps", "orders"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    if config.workers < 1:
        raise UsageError("--workers must be at least 1")
    if config.sigma0_steps < 1 or config.spread_steps < 1:
        raise UsageError("step counts must be at least 1")
    if not 0 < config.sigma0_min <= config.sigma0_max:
        raise UsageError("need 0 < sigma0-min <= sigma0-max")
    if not 0 < config.spread_min <= config.spread_max:
        raise UsageError("need 0 < spread-min <= spread-max")
    if any(not 0 <= o <= 4 for o in config.orders):
        raise UsageError("orders must be in [0, 4]")
    return config


def run_spread(args) -> int:
    path = cmd_spread(_config(args))
    print(path)
    return EXIT_OK


def run_scalesel(args) -> int:
    path, records = cmd_scalesel(_config(args))
    print(path)
    if records and all(math.isnan(r.sigma_hat) for r in records):
        print("no scale extremum found in any cell", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def run_render(args) -> int:
    config = _config(args)
    detector = args.detector or {
        ModelKind.BLOB: Detector.LAPLACIAN, ModelKind.EDGE: Detector.GRADMAG,
        ModelKind.RIDGE: Detector.RIDGE}[args.kind]
    sigma = args.sigma if args.sigma is not None else args.sigma0
    for path in cmd_render(args.kind, args.method, args.sigma0, detector, sigma, config):
        print(path)
    return EXIT_OK


def _add_bench_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--methods", type=_csv_list(MethodId.parse), help="comma-separated method names")
    p.add_argument("--out", help="output directory (default: $SCALESMITH_OUT or ./scalesmith-out)")
    p.add_argument("--workers", type=int, help="worker processes (default: available cores)")
    p.add_argument("--config", help="load a config.json sidecar; explicit flags override it")
    p.add_argument("--grid-min", dest="grid_min", type=float)
    p.add_argument("--grid-max", dest="grid_max", type=float)
    p.add_argument("--grid-levels", dest="grid_levels", type=int)


def _add_sigma0_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--detectors", type=_csv_list(Detector.parse), help="comma-separated detector names")
    p.add_argument("--sigma0-min", dest="sigma0_min", type=float)
    p.add_argument("--sigma0-max", dest="sigma0_max", type=float)
    p.add_argument("--sigma0-steps", dest="sigma0_steps", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scalesmith", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="print a 1-D kernel or difference stencil as CSV")
    p.add_argument("--method", help="method or smoothing-kernel name; omit for the bare stencil")
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--sigma", type=float)
    p.add_argument("--radius", type=int)
    p.set_defaults(func=run_kernel)

    p = sub.add_parser("spread", help="write spread.csv")
    _add_bench_flags(p)
    p.add_argument("--orders", type=_csv_list(int))
    p.add_argument("--spread-min", dest="spread_min", type=float)
    p.add_argument("--spread-max", dest="spread_max", type=float)
    p.add_argument("--spread-steps", dest="spread_steps", type=int)
    p.set_defaults(func=run_spread)

    p = sub.add_parser("scalesel", help="write scalesel.csv")
    _add_bench_flags(p)
    _add_sigma0_flags(p)
    p.set_defaults(func=run_scalesel)

    p = sub.add_parser("render", help="write model and response PGMs plus a signature CSV")
    _add_bench_flags(p)
    p.add_argument("--kind", type=ModelKind.parse, required=True)
    p.add_argument("--method", type=MethodId.parse, required=True)
    p.add_argument("--sigma0", type=float, required=True)
    p.add_argument("--detector", type=Detector.parse)
    p.add_argument("--sigma", type=float, help="scale of the response image (default: sigma0)")
    p.set_defaults(func=run_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, NoExtremumError) as exc:
        code = EXIT_NUMERIC if isinstance(exc, NoExtremumError) else EXIT_USAGE
        print(f"scalesmith: error: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"scalesmith: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
