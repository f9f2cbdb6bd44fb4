"""Command-line interface: estimate | bounds | simulate | reproduce.

Exit codes: 0 when every requested quantity was estimated, 1 when any
estimation or input error occurred, 2 for invalid flags.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import List, Optional, Sequence

from .bootstrap import RESAMPLE_MODES, BootstrapConfig
from .conditional import StratumRequest, conditional_estimate
from .data import DomainBounds, ingest_csv
from .errors import CausalMomentsError
from .identify import ArmPair
from .quadrature import MODES, IntegrationConfig
from .quantities import QuantitySpec, run_quantity
from .report import EstimateReport, dumps, emit_json, format_table
from .reproduce import DEFAULT_REPLICATIONS, DEFAULT_SIZES, format_study, run_study, to_json
from .synthetic import PRESETS, preset, simulate

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


# -- argument types (raise ArgumentTypeError so argparse exits with code 2) ------------

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {value}")
    return value


def _replicates(text: str) -> int:
    value = _positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("bootstrap needs at least 2 replicates")
    return value


def _level(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"level must be a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {value}")
    return value


def _arm_pair(text: str) -> ArmPair:
    try:
        return ArmPair.parse(text)
    except CausalMomentsError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _domain(text: str) -> DomainBounds:
    parts = text.split(",")
    try:
        a, b = (float(p) for p in parts)
        return DomainBounds(a, b)
    except (ValueError, CausalMomentsError):
        raise argparse.ArgumentTypeError(f"bounds must look like 'a,b' with finite a <= b, got {text!r}") from None


def _condition(text: str) -> int:
    name, sep, level = text.partition("=")
    if name.strip() != "w" or not sep:
        raise argparse.ArgumentTypeError(f"condition must look like 'w=INT', got {text!r}")
    try:
        return int(level)
    except ValueError:
        raise argparse.ArgumentTypeError(f"covariate level must be an integer, got {level!r}") from None


def _sizes(text: str) -> List[int]:
    return [_positive_int(p) for p in text.split(",")]


# -- parser ----------------------------------------------------------------------------

def _shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", help="write output here instead of stdout")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--seed", type=_seed, default=0, help="Monte Carlo / bootstrap seed")
    parser.add_argument("--mc-points", type=_positive_int,
                        help="joint mode: total points; tensor mode: points per axis")
    parser.add_argument("--mc-mode", choices=MODES, default="joint")


def _estimation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="CSV with columns x, y and optional w ('-' = stdin)")
    parser.add_argument("--bootstrap", type=_replicates, metavar="B", help="bootstrap replicates")
    parser.add_argument("--level", type=_level, default=0.95)
    parser.add_argument("--resample", choices=RESAMPLE_MODES, default="pooled")
    parser.add_argument("--condition-on", type=_condition, metavar="w=INT")
    parser.add_argument("--bounds-override", type=_domain, metavar="a,b", help="integration domain [a, b]")
    parser.add_argument("--moment", type=_positive_int, action="append", metavar="M", default=[],
                        help="moment order (repeatable)")
    parser.add_argument("--central", action="store_true", help="center moments / products on the ACE")
    parser.add_argument("--product", action="store_true", help="product moment of two contrasts")
    parser.add_argument("--correlation", action="store_true")
    parser.add_argument("--arms", type=_arm_pair, metavar="i,j")
    parser.add_argument("--arms-left", type=_arm_pair, metavar="i,j")
    parser.add_argument("--arms-right", type=_arm_pair, metavar="k,h")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causal-moments",
                                     description="Moments of causal effects and their bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="point-identified quantities (assumes monotonicity)")
    _shared(est)
    _estimation_flags(est)
    est.add_argument("--derived-stats", action="store_true", help="variance, std dev, skewness, kurtosis")
    est.add_argument("--ate", action="store_true")

    bnd = sub.add_parser("bounds", help="bounds that need exogeneity only")
    _shared(bnd)
    _estimation_flags(bnd)
    bnd.add_argument("--skewness", action="store_true")
    bnd.add_argument("--kurtosis", action="store_true")

    sim = sub.add_parser("simulate", help="draw a CSV from a preset SCM")
    sim.add_argument("--preset", required=True, choices=sorted(PRESETS))
    sim.add_argument("--n", type=_positive_int, required=True)
    sim.add_argument("--seed", type=_seed, default=0)
    sim.add_argument("--output", help="CSV path; a <path>.manifest.json sidecar records the settings")

    rep = sub.add_parser("reproduce", help="replicated simulation study on SCM A and SCM B")
    _shared(rep)
    rep.add_argument("--replications", type=_positive_int, default=DEFAULT_REPLICATIONS)
    rep.add_argument("--sizes", type=_sizes, default=list(DEFAULT_SIZES), metavar="N1,N2,...")
    rep.add_argument("--json-out", help="also write the JSON artifact here")
    return parser


# -- quantity assembly -----------------------------------------------------------------

def _need(parser, value, flag, what):
    if value is None:
        parser.error(f"{what} requires {flag}")
    return value


def quantity_specs(args, parser) -> List[QuantitySpec]:
    specs: List[QuantitySpec] = []
    bounds = args.command == "bounds"
    suffix = "_bounds" if bounds else ""
    for m in args.moment:
        kind = ("central_moment" if args.central else "moment") + suffix
        specs.append(QuantitySpec(kind, _need(parser, args.arms, "--arms", "--moment"), order=m))
    if args.product:
        kind = ("covariance" if args.central else "product") + suffix
        specs.append(QuantitySpec(kind, _need(parser, args.arms_left, "--arms-left", "--product"),
                                  _need(parser, args.arms_right, "--arms-right", "--product")))
    if args.correlation:
        specs.append(QuantitySpec("correlation" + suffix,
                                  _need(parser, args.arms_left, "--arms-left", "--correlation"),
                                  _need(parser, args.arms_right, "--arms-right", "--correlation")))
    if bounds:
        for flag in ("skewness", "kurtosis"):
            if getattr(args, flag):
                specs.append(QuantitySpec(f"{flag}_bounds", _need(parser, args.arms, "--arms", f"--{flag}")))
    else:
        if args.derived_stats:
            arms = _need(parser, args.arms, "--arms", "--derived-stats")
            specs.extend(QuantitySpec(k, arms) for k in ("variance", "std_dev", "skewness", "kurtosis"))
        if args.ate:
            specs.append(QuantitySpec("ate", _need(parser, args.arms, "--arms", "--ate")))
    if not specs:
        parser.error("no quantity requested")
    return specs


def integration_config(args) -> IntegrationConfig:
    if args.mc_mode == "tensor":
        return IntegrationConfig(mode="tensor", points_per_axis=args.mc_points, seed=args.seed,
                                 bounds=args.bounds_override)
    return IntegrationConfig(mode="joint", n_joint=args.mc_points, seed=args.seed, bounds=args.bounds_override)


def _write(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _error_reports(specs, exc, record) -> List[EstimateReport]:
    message = f"{type(exc).__name__}: {exc}"
    return [EstimateReport(s.kind, s.arms_field(), s.order, None, None, (), record, message) for s in specs]


def cmd_estimate(args, parser, argv) -> int:
    specs = quantity_specs(args, parser)
    config = integration_config(args)
    boot = None
    if args.bootstrap is not None:
        boot = BootstrapConfig(args.bootstrap, args.level, args.seed, args.resample)
    manifest = {
        "subcommand": args.command, "argv": list(argv), "input": args.input,
        "quantities": [{"kind": s.kind, "arms": s.arms_field(), "order": s.order} for s in specs],
        "integration": config.to_dict(), "bootstrap": None if boot is None else boot.to_dict(),
        "condition_on": None if args.condition_on is None else {"w": args.condition_on}, "format": args.format,
    }
    try:
        table = ingest_csv(args.input)
    except (CausalMomentsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    reports: List[EstimateReport] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # guard and quality events are recorded as report flags
        for spec in specs:
            if args.condition_on is None:
                reports.append(run_quantity(table, spec, config, boot))
                continue
            try:
                reports.append(conditional_estimate(table, StratumRequest(args.condition_on, spec), config, boot))
            except CausalMomentsError as exc:
                reports.extend(_error_reports([spec], exc, {"condition_on": {"w": args.condition_on}}))
    text = emit_json(reports, manifest) if args.format == "json" else format_table(reports)
    _write(text, args.output)
    for r in reports:
        if not r.ok:
            print(f"error: {r.quantity}: {r.error}", file=sys.stderr)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAILED


def cmd_simulate(args) -> int:
    spec = preset(args.preset)
    table = simulate(spec, args.n, args.seed)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            table.to_csv(fh)
        sidecar = {"preset": args.preset, "n": args.n, "seed": args.seed, "scm": spec.describe()}
        Path(args.output + ".manifest.json").write_text(dumps(sidecar))
    else:
        table.to_csv(sys.stdout)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.mc_mode != "joint":
        print("error: reproduce supports joint Monte Carlo only", file=sys.stderr)
        return EXIT_USAGE
    document = run_study(args.replications, args.sizes, args.seed, args.mc_points)
    if args.json_out:
        Path(args.json_out).write_text(to_json(document))
    _write(to_json(document) if args.format == "json" else format_study(document), args.output)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("estimate", "bounds"):
        return cmd_estimate(args, parser, argv)
    if args.command == "simulate":
        return cmd_simulate(args)
    return cmd_reproduce(args)


if __name__ == "__main__":
    sys.exit(main())
