"""
Command-line interface for the Cauchy-Szegő toolkit.

Subcommands:
    lambda    Λ(γ, z) at one point
    scan      Λ over a box, a wedge ray sweep or an ellipse r-sweep, as CSV/JSON
    verify    the invariant suite (quick or full)
    spectrum  Kerzman-Stein spectrum and small-eccentricity comparison
    bounds    lower / upper bounds for the Cauchy transform norm

Exit codes: 0 success, 1 failed verification or bound ordering, 2 parse
errors, 3 domain errors, 4 unwritable output.
"""

import argparse
import logging
import math
import sys
from typing import List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from cauchy_szego.boundary_operator import (
    discretize_cauchy,
    dump_matrix,
    kerzman_stein,
    operator_norm,
    spectrum_A,
)
from cauchy_szego.errors import CauchySzegoError, DomainError, SpecParseError
from cauchy_szego.geometry import Ellipse, Sampled, WedgeBoundary, distance_to_curve
from cauchy_szego.kernels import DomainSide
from cauchy_szego.lambda_function import (
    cauchy_norm_bounds,
    ellipse_family_sweep,
    kerzman_stein_lower_bound,
    lambda_grid,
    lambda_value,
    lambda_wedge,
)
from config.settings import NumericSettings, get_settings
from utils.formatters import emit, format_number, format_point, render_rows, to_json
from utils.parsers import build_curve, parse_complex, parse_curve_spec, parse_float_list

logger = logging.getLogger("cauchy_szego.cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_UNWRITABLE = 4

MAX_RESOLUTION = 512
SCAN_COLLAR = 1e-6
SANDWICH_SLACK = 1e-6

# options whose values may legitimately start with '-'
VALUE_OPTIONS = ("--box", "--ray", "--z", "--r-range")


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; route that through SpecParseError."""

    def error(self, message):
        raise SpecParseError(message)


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def _curve_from_args(args, settings: NumericSettings):
    parsed = parse_curve_spec(args.curve)
    return parsed, build_curve(parsed, settings.nodes)


def cmd_lambda(args, settings: NumericSettings) -> int:
    _, curve = _curve_from_args(args, settings)
    z = parse_complex(args.z)
    result = lambda_value(curve, z, settings=settings)
    data = {"z": format_point(z), **result.to_dict()}
    if args.format == "json":
        emit(to_json(data) + "\n", args.out)
    else:
        emit("".join(f"{k}: {format_number(v) if isinstance(v, float) else v}\n" for k, v in data.items()), args.out)
    return EXIT_OK


def _wedge_rows(curve: WedgeBoundary, samples: int):
    theta = curve.theta
    rows = []
    for k in range(samples):
        phi = -theta + 2.0 * math.pi * (k + 0.5) / samples
        rows.append({"phi": phi, "lambda": lambda_wedge(theta, phi)})
    return rows


def _ray_rows(curve: WedgeBoundary, ray: List[float], samples: int, settings: NumericSettings):
    """Λ on the arc r·e^{iφ}, phi0 < φ < phi1, at midpoint samples."""
    r, phi0, phi1 = ray
    if not r > 0.0:
        raise DomainError(f"--ray radius must be positive, got {r}.")
    if not phi0 < phi1:
        raise SpecParseError(f"--ray needs phi0 < phi1, got {phi0}, {phi1}.")
    phis = [phi0 + (phi1 - phi0) * (k + 0.5) / samples for k in range(samples)]
    values = lambda_grid(curve, [r * complex(math.cos(p), math.sin(p)) for p in phis], settings=settings)
    return [{"r": r, "phi": p, "lambda": v.value} for p, v in zip(phis, values)]


def _box_rows(curve, box: List[float], res: List[int], settings: NumericSettings):
    xmin, xmax, ymin, ymax = box
    nx, ny = res
    if not (1 <= nx <= MAX_RESOLUTION and 1 <= ny <= MAX_RESOLUTION):
        raise SpecParseError(f"Resolution {nx}x{ny} must be between 1 and {MAX_RESOLUTION} per axis.")
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    points = []
    for y in ys:
        for x in xs:
            z = complex(x, y)
            if distance_to_curve(curve, z) > SCAN_COLLAR:
                points.append(z)
    values = lambda_grid(curve, points, settings=settings)
    return [
        {"x": z.real, "y": z.imag, "lambda": v.value, "regime": v.regime.value}
        for z, v in zip(points, values)
    ]


def cmd_scan(args, settings: NumericSettings) -> int:
    if args.r_range:
        r0, r1 = parse_float_list(args.r_range, 2, "--r-range")
        rows = ellipse_family_sweep(np.linspace(r0, r1, args.samples))
        fields = ["r", "lambda0", "lambdainf"]
    else:
        _, curve = _curve_from_args(args, settings)
        if args.ray is not None and not isinstance(curve, WedgeBoundary):
            raise SpecParseError("--ray applies to wedge curves only; use --box for bounded curves.")
        if args.ray is not None:
            ray = parse_float_list(args.ray, 3, "--ray")
            rows = _ray_rows(curve, ray, args.samples, settings)
            fields = ["r", "phi", "lambda"]
        elif isinstance(curve, WedgeBoundary):
            rows = _wedge_rows(curve, args.samples)
            fields = ["phi", "lambda"]
        else:
            if args.box is None:
                raise SpecParseError("scan over a bounded curve needs --box xmin,xmax,ymin,ymax.")
            box = parse_float_list(args.box, 4, "--box")
            res = [int(v) for v in parse_float_list(args.res, 2, "--res")]
            rows = _box_rows(curve, box, res, settings)
            fields = ["x", "y", "lambda", "regime"]
    emit(render_rows(rows, fields, args.format), args.out)
    return EXIT_OK


def cmd_verify(args, settings: NumericSettings) -> int:
    from verification.workflow import run_verification, summary

    state = run_verification(args.level)
    emit(to_json(summary(state)) + "\n", args.out)
    return EXIT_OK if state["all_passed"] else EXIT_FAILED


def cmd_spectrum(args, settings: NumericSettings) -> int:
    parsed, curve = _curve_from_args(args, settings)
    Cmat = discretize_cauchy(curve, DomainSide.INTERIOR, settings=settings)
    Amat = kerzman_stein(Cmat)
    lam = spectrum_A(Amat)
    shown = lam[: args.count]
    norm = operator_norm(Cmat, settings=settings)

    lines = [f"lambda_{i + 1}: {format_number(v)}" for i, v in enumerate(shown)]
    pairs = [abs(lam[i] - lam[i + 1]) for i in range(0, min(len(lam) - 1, args.count), 2)]
    lines.append(f"pairing_residual: {format_number(max(pairs) if pairs else 0.0)}")
    lines.append(f"norm_C: {format_number(norm)}")
    lines.append(f"sqrt_normC2_minus_1: {format_number(math.sqrt(max(norm ** 2 - 1.0, 0.0)))}")
    if isinstance(parsed["curve"], Ellipse) and parsed["mobius"] is None and parsed["curve"].r > 1.0:
        r = parsed["curve"].r
        lines.append(f"bolt_ratio: {format_number(lam[0] * 2.0 * (r + 1.0) / (r - 1.0))}")

    if args.dump:
        dump_matrix(Amat, args.dump)
    emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_bounds(args, settings: NumericSettings) -> int:
    _, curve = _curve_from_args(args, settings)
    report = cauchy_norm_bounds(curve, settings=settings)
    lower, upper = report["lower"], report["upper"]

    norm: Optional[float] = None
    if not isinstance(curve, WedgeBoundary):
        Cmat = discretize_cauchy(curve, DomainSide.INTERIOR, settings=settings)
        norm = operator_norm(Cmat, settings=settings)

    lines = [
        f"lower: {format_number(lower)}",
        f"argmax: {format_point(report['argmax'])}",
        f"upper: {'n/a' if upper is None else format_number(upper)}",
        f"operator_norm: {'n/a' if norm is None else format_number(norm)}",
    ]
    if not isinstance(curve, Sampled):
        lines.append(f"kerzman_stein_lower: {format_number(kerzman_stein_lower_bound(curve))}")
    emit("\n".join(lines) + "\n", args.out)

    ordered = True
    if norm is not None:
        ordered = lower <= norm + SANDWICH_SLACK and (upper is None or norm <= upper + SANDWICH_SLACK)
    elif upper is not None:
        ordered = lower <= upper + SANDWICH_SLACK
    if not ordered:
        logger.error("Bound ordering violated: lower=%.17g norm=%s upper=%s", lower, norm, upper)
        return EXIT_FAILED
    return EXIT_OK


# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--nodes", type=int, default=None, help="quadrature / Nyström node count (default 512)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = _ArgumentParser(prog="cauchy-szego", description="Cauchy-Szegő Λ-function toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("lambda", parents=[common], help="Λ(γ, z) at one point")
    p.add_argument("--curve", required=True)
    p.add_argument("--z", required=True, help="complex literal a+bi, or inf")
    p.set_defaults(handler=cmd_lambda)

    p = sub.add_parser("scan", parents=[common], help="Λ over a region, as CSV or JSON rows")
    p.add_argument("--curve", default="ellipse:r=2")
    p.add_argument("--box", default=None, help="xmin,xmax,ymin,ymax, e.g. --box -3,3,-2,2")
    p.add_argument("--res", default="101,101", help="nx,ny (at most 512 each)")
    p.add_argument("--samples", type=int, default=500, help="wedge, ray or r-sweep sample count")
    p.add_argument("--r-range", dest="r_range", default=None, help="r0,r1 for the ellipse family sweep")
    p.add_argument("--ray", default=None, help="r,phi0,phi1: wedge scan on the arc r·e^{iφ}, phi0 < φ < phi1")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("level", nargs="?", choices=["quick", "full"], default="quick")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("spectrum", parents=[common], help="Kerzman-Stein spectrum")
    p.add_argument("--curve", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--dump", default=None, help="write A as a KSTMAT file")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("bounds", parents=[common], help="Cauchy transform norm bounds")
    p.add_argument("--curve", required=True)
    p.set_defaults(handler=cmd_bounds)
    return parser


def _attach_option_values(argv: Sequence[str]) -> List[str]:
    """
    Join VALUE_OPTIONS with a following value that starts with '-'.

    argparse reads "--box -3,3,-2,2" as two options; "--box=-3,3,-2,2" is
    unambiguous.
    """
    joined: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            joined.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        joined.append(token)
        i += 1
    return joined


def _settings_from_args(args) -> NumericSettings:
    """Environment defaults with the command-line overrides applied."""
    settings = get_settings()
    if args.nodes is None:
        return settings
    return NumericSettings(**{**settings.model_dump(), "nodes": args.nodes})


def _configure_logging(verbose: int, settings: NumericSettings) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        Process exit code
    """
    load_dotenv()
    try:
        argv = sys.argv[1:] if argv is None else argv
        args = build_parser().parse_args(_attach_option_values(argv))
        settings = _settings_from_args(args)
        _configure_logging(args.verbose, settings)
        return args.handler(args, settings)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CauchySzegoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    except ValueError as exc:
        # malformed CSZ_* variables or an out-of-range --nodes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
