"""
Command-line front end: `densitylab <command> [options]`.

Commands:

- density: upper and lower asymptotic density of a set.
- alpha: alpha-densities at given exponents, or their limit d_infinity.
- polya: window functional t(x) of a sequence (Pólya densities for a set).
- extremal: extremal density-measure values of a set.
- surrogate: best single-atom surrogate, or a given surrogate evaluated.
- verify: property suites.

Exit codes: 0 success, 1 failed verification, 2 expression or usage
error, 3 estimator error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

import pandas as pd
from pydantic import (
    BaseModel,
    StrictBool,
    StrictFloat,
    StrictInt,
    StrictStr,
    ValidationError,
)

from . import __version__, tools
from .densities import (
    EXTRAPOLATIONS,
    DensityReport,
    EstimatorConfig,
    alpha_density,
    d_infinity,
    lower_density,
    upper_density,
)
from .dsl import DslError, parse_seq_expr, parse_set_expr
from .extremal import (
    Surrogate,
    eval_surrogate,
    lower_extreme,
    per_theta_maximizers,
    surrogate_sup,
    upper_extreme,
)
from .natset import NatSet
from .polya import t_estimate, theta
from .seqcore import BoundedSeq, Indicator
from .verify import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_ESTIMATOR_ERROR = 3

FORMATS = ("json", "csv", "plot", "table")
VERIFY_FORMATS = ("text", "json")
SEQ_HEADS = ("ind", "const", "periodic", "affine", "rand01", "prefix", "round", "sum")


### Report schema ###
Number = Union[StrictInt, StrictFloat]


class EstimateModel(BaseModel):
    param: Number
    value: Number


class DiagnosticsModel(BaseModel):
    monotone: StrictBool
    cross_route_gap: Optional[Number]


class AtomModel(BaseModel):
    theta_k: StrictInt
    n: StrictInt
    w: Number


class ReportModel(BaseModel):
    """Serialized DensityReport, as printed by `--format json`."""

    quantity: StrictStr
    input: StrictStr
    estimates: list[EstimateModel]
    extrapolated: Number
    error_indicator: Number
    diagnostics: DiagnosticsModel
    label: StrictStr = "finite surrogate"
    aliases: Optional[list[StrictStr]] = None
    surrogate: Optional[list[AtomModel]] = None


REPORT_SCHEMA: dict[str, Any] = ReportModel.model_json_schema()


def _describe(error: Any) -> str:
    loc = [str(part) for part in error["loc"]]
    if error["type"] == "missing":
        return f"{'.'.join(['report', *loc[:-1]])}: missing key {loc[-1]!r}"
    return f"{'.'.join(['report', *loc])}: {error['msg']}"


def validate_report(report: dict[str, Any]) -> None:
    """Check a serialized report against REPORT_SCHEMA.

    Args:
        report (dict): Output of DensityReport.to_dict().

    Raises:
        ValueError: Listing every schema violation found.
    """
    try:
        ReportModel.model_validate(report)
    except ValidationError as e:
        errors = [_describe(err) for err in e.errors()]
        raise ValueError(
            "Report does not match the schema: " + "; ".join(errors)
        ) from None


### Output ###
def render(expr: str, reports: Sequence[DensityReport], fmt: str) -> str:
    """Render reports in one of FORMATS.

    Args:
        expr (str): Canonical input expression.
        reports (Sequence[DensityReport]): Reports, in output order.
        fmt (str): "json", "csv" or "plot". "table" is printed directly
            by the reports and renders to an empty string here.

    Returns:
        str: Text for standard output.
    """
    if fmt == "json":
        payload = {"input": expr, "reports": [r.to_dict() for r in reports]}
        for report in payload["reports"]:
            validate_report(report)
        return json.dumps(payload, sort_keys=True, indent=2)
    if fmt == "csv":
        rows = [(r.quantity, p, v) for r in reports for p, v in r.estimates]
        frame = pd.DataFrame(rows, columns=["quantity", "param", "value"])
        return frame.to_csv(index=False, float_format="%.17g").rstrip("\n")
    if fmt == "plot":
        blocks = []
        for r in reports:
            lines = [f"# {r.quantity}"]
            lines += [f"{float(p)!r} {float(v)!r}" for p, v in r.estimates]
            blocks.append("\n".join(lines))
        # Blank lines separate data blocks, as gnuplot's `index` expects
        return "\n\n".join(blocks)
    for r in reports:
        r.display()
    return ""


### Input ###
def _read_expression(args: argparse.Namespace) -> str:
    if args.set is not None:
        return args.set
    if args.seq is not None:
        return args.seq
    if args.file is not None:
        return Path(args.file).read_text()
    raise DslError("No expression given (use --set, --seq or a file)", 1, 1, "")


def _is_sequence(text: str) -> bool:
    stripped = re.sub(r"#.*", "", text).lstrip()
    head = re.match(r"[A-Za-z_]\w*", stripped)
    return head is not None and head.group(0) in SEQ_HEADS


def _parse_set(args: argparse.Namespace) -> NatSet:
    if args.seq is not None:
        raise DslError(f"The {args.command} command takes a set", 1, 1, args.seq)
    return parse_set_expr(_read_expression(args), cap=args.cap)


def _parse_seq(args: argparse.Namespace) -> BoundedSeq:
    text = _read_expression(args)
    if args.set is not None or not _is_sequence(text):
        return Indicator(parse_set_expr(text, cap=args.cap))
    return parse_seq_expr(text, cap=args.cap)


def _sides(args: argparse.Namespace) -> tuple[str, ...]:
    return ("upper", "lower") if args.side == "both" else (args.side,)


def _config(args: argparse.Namespace) -> EstimatorConfig:
    overrides: dict[str, Any] = {"threads": args.threads, "cap": args.cap}
    for name in ("theta_k", "alpha_grid", "tail_window", "extrapolation"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.horizon is not None:
        return EstimatorConfig.from_horizon(args.horizon, **overrides)
    return EstimatorConfig(**overrides)


### Commands ###
def cmd_density(args: argparse.Namespace, cfg: EstimatorConfig) -> tuple[str, list]:
    A = _parse_set(args)
    estimators = {"upper": upper_density, "lower": lower_density}
    return A.to_expr(), [estimators[side](A, cfg) for side in _sides(args)]


def cmd_alpha(args: argparse.Namespace, cfg: EstimatorConfig) -> tuple[str, list]:
    A = _parse_set(args)
    if args.alpha is None:
        return A.to_expr(), [d_infinity(A, cfg, side) for side in _sides(args)]
    reports = [
        alpha_density(A, alpha, cfg, side)
        for alpha in args.alpha
        for side in _sides(args)
    ]
    return A.to_expr(), reports


def cmd_polya(args: argparse.Namespace, cfg: EstimatorConfig) -> tuple[str, list]:
    x = _parse_seq(args)
    return x.to_expr(), [t_estimate(x, cfg, side) for side in _sides(args)]


def cmd_extremal(args: argparse.Namespace, cfg: EstimatorConfig) -> tuple[str, list]:
    A = _parse_set(args)
    return A.to_expr(), [upper_extreme(A, cfg), lower_extreme(A, cfg)]


def cmd_surrogate(args: argparse.Namespace, cfg: EstimatorConfig) -> tuple[str, list]:
    x = _parse_seq(args)
    if args.surrogate is not None:
        f = Surrogate.from_json(Path(args.surrogate).read_text(), cfg)
        atoms = [(a.n, theta(x, f.theta_grid[a.theta_k - 1], a.n)) for a in f.atoms]
        report = DensityReport(
            quantity="surrogate_value",
            input=x.to_expr(),
            estimates=atoms,
            extrapolated=eval_surrogate(f, x),
            error_indicator=0.0,
            surrogate=f.to_json(),
        )
        return x.to_expr(), [report]

    best, value = surrogate_sup(x, cfg)
    per_theta = [v for _, v in per_theta_maximizers(x, cfg)]
    tail = per_theta[cfg.tail_start(len(per_theta)) :]
    report = DensityReport(
        quantity="surrogate_sup",
        input=x.to_expr(),
        estimates=list(zip(cfg.theta_grid, per_theta)),
        extrapolated=value,
        error_indicator=max(tail) - min(tail),
        surrogate=best.to_json(),
    )
    return x.to_expr(), [report]


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.suite, args.seed, args.threads)
    failed = [r.name for r in results if not r.passed]
    if args.format == "json":
        payload = {
            "suite": args.suite,
            "seed": args.seed,
            "results": [
                {"name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
            "failed": failed,
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        if failed:
            print(f"failed: {', '.join(failed)}")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


Command = Callable[[argparse.Namespace, EstimatorConfig], tuple[str, list]]

COMMANDS: dict[str, Command] = {
    "density": cmd_density,
    "alpha": cmd_alpha,
    "polya": cmd_polya,
    "extremal": cmd_extremal,
    "surrogate": cmd_surrogate,
}


### Argument parsing ###
def _number_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _default_threads() -> int:
    env = os.environ.get("DENSITYLAB_THREADS")
    if not env:
        return 1
    try:
        return _positive_int(env)
    except argparse.ArgumentTypeError:
        logger.warning("Ignoring DENSITYLAB_THREADS=%r; using 1 thread", env)
        return 1


def _add_common(
    parser: argparse.ArgumentParser,
    formats: Sequence[str] = FORMATS,
    default: str = "json",
) -> None:
    parser.add_argument(
        "--format",
        choices=formats,
        default=default,
        help=f"Output format (default: {default})",
    )
    parser.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="Worker threads for grid sweeps (default: $DENSITYLAB_THREADS or 1)",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log progress to stderr"
    )


def _add_estimator(parser: argparse.ArgumentParser, sequences: bool) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--set", help="Set expression")
    if sequences:
        source.add_argument("--seq", help="Sequence expression")
    parser.add_argument(
        "file", nargs="?", default=None, help="File holding the expression"
    )
    parser.add_argument(
        "--horizon",
        type=_positive_int,
        default=None,
        help="Largest horizon; the grid is the powers of two up to it",
    )
    parser.add_argument("--theta-k", type=_positive_int, default=None, help="K")
    parser.add_argument(
        "--alpha-grid", type=_number_list, default=None, help="e.g. 1,2,4,8"
    )
    parser.add_argument(
        "--tail-window", type=float, default=None, help="Tail fraction in (0, 1]"
    )
    parser.add_argument(
        "--extrapolation",
        choices=sorted(set(EXTRAPOLATIONS.values())),
        default=None,
        help="Extrapolation policy",
    )
    parser.add_argument(
        "--cap",
        type=_positive_int,
        default=tools.ENUMERATION_CAP,
        help="Enumeration cap",
    )
    _add_common(parser)
    parser.set_defaults(seq=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densitylab",
        description="Density measures on the natural numbers",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("density", help="Upper and lower asymptotic density")
    _add_estimator(sub, sequences=False)
    sub.add_argument("--side", choices=("upper", "lower", "both"), default="both")

    sub = subparsers.add_parser("alpha", help="Alpha-densities and d_infinity")
    _add_estimator(sub, sequences=False)
    sub.add_argument(
        "--alpha",
        type=_number_list,
        default=None,
        help="Exponents; without it the limit over --alpha-grid is reported",
    )
    sub.add_argument("--side", choices=("upper", "lower", "both"), default="both")

    sub = subparsers.add_parser("polya", help="Window functional t(x)")
    _add_estimator(sub, sequences=True)
    sub.add_argument("--side", choices=("upper", "lower", "both"), default="both")

    sub = subparsers.add_parser("extremal", help="Extremal density-measure values")
    _add_estimator(sub, sequences=False)

    sub = subparsers.add_parser("surrogate", help="Finite surrogate functionals")
    _add_estimator(sub, sequences=True)
    sub.add_argument(
        "--surrogate",
        default=None,
        help="JSON file with {theta_k, n, w} atoms to evaluate",
    )

    sub = subparsers.add_parser("verify", help="Run a property suite")
    sub.add_argument("--suite", choices=sorted(SUITES.keys()), default="core")
    sub.add_argument("--seed", type=int, default=42, help="Input generator seed")
    _add_common(sub, VERIFY_FORMATS, "text")
    return parser


### Entry point ###
def main(argv: Sequence[str] | None = None) -> int:
    """Run one command.

    Args:
        argv (Sequence[str] | None): Arguments without the program name;
            defaults to sys.argv[1:].

    Returns:
        int: Exit code.
    """
    args = build_parser().parse_args(argv)
    if args.threads is None:
        args.threads = _default_threads()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)
    start = time.perf_counter()
    try:
        logger.debug("Running %s with %s", args.command, vars(args))
        if args.command == "verify":
            return cmd_verify(args)

        cfg = _config(args)
        logger.debug("Resolved configuration: %s", cfg)
        expr, reports = COMMANDS[args.command](args, cfg)
        text = render(expr, reports, args.format)
        if text:
            print(text)
        return EXIT_OK
    except DslError as e:
        logger.error("%s", e)
        return EXIT_PARSE_ERROR
    except OSError as e:
        logger.error("Cannot read input: %s", e)
        return EXIT_PARSE_ERROR
    except (ValueError, ArithmeticError, RuntimeError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ESTIMATOR_ERROR
    finally:
        logger.debug("%s finished in %.3f s", args.command, time.perf_counter() - start)
        logging.captureWarnings(False)


if __name__ == "__main__":
    sys.exit(main())
