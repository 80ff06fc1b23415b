"""
Command-line entry point.

    secrecy-regions region gaussian --power 20 --sigmas 0.9,1.5,4 --points 101 --out g.csv
    secrecy-regions region degraded --channel bce.json --out d.csv
    secrecy-regions region inner --channel bce.json --samples 5000 --out i.csv
    secrecy-regions fading closed-form --s-prime 0.5 --power 1 --out f.csv
    secrecy-regions fading optimize --s-prime 0.5 --power 1 --layers 400 --out f.csv
    secrecy-regions simulate --channel bce.json --dist dec.json --n 6 --rates 0,0,0.2,0,0
    secrecy-regions check degraded --channel bce.json

Exit codes: 0 on success, 1 for invalid input or usage, 2 when a budget or a
numerical tolerance refuses the run.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

from pydantic import ValidationError as PydanticValidationError

from secrecy_regions import __version__
from secrecy_regions.channel import check_bce_degraded
from secrecy_regions.coding import RateTargets, generate_codebook, plan_binning, simulate
from secrecy_regions.config import Config, load_config
from secrecy_regions.degraded import SearchConfig, search_degraded_region
from secrecy_regions.fading import (
    FadingSpec,
    PowerProfile,
    average_rate,
    closed_form_profile,
    optimize_profile_numerical,
    rayleigh_endpoints,
    support_window,
)
from secrecy_regions.files import (
    AuxiliaryFile,
    CertificateEntry,
    DegradednessReport,
    DegradedReport,
    ProfileFile,
    RunMetadata,
    SimulationReport,
    SimulationRun,
    TableReport,
    load_bce,
    load_decomposition,
    to_units,
    write_csv,
    write_json,
)
from secrecy_regions.gaussian import GaussianBceParams, sweep_table
from secrecy_regions.inner import sample_inner_region
from secrecy_regions.types import (
    EXIT_CODES,
    Err,
    Error,
    Ok,
    Result,
    SecrecyError,
    UsageError,
    ValidationError,
    format_error_message,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


# =============================================================================
# Argument Parsing
# =============================================================================


class _Parser(argparse.ArgumentParser):
    """Parser whose errors become usage errors instead of exiting with 2."""

    def error(self, message: str) -> NoReturn:
        raise SecrecyError(UsageError(message=f"{self.prog}: {message}"))


def _floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        message = f"expected comma-separated numbers, got {text!r}"
        raise argparse.ArgumentTypeError(message) from None


def _seeds(text: str) -> list[int]:
    """``0..19`` (inclusive) or ``1,4,9``."""
    try:
        if ".." in text:
            first, last = text.split("..", 1)
            return list(range(int(first), int(last) + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        message = f"expected seeds like 0..19 or 1,2,3, got {text!r}"
        raise argparse.ArgumentTypeError(message) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML configuration file")
    common.add_argument("--units", choices=("bits", "nats"), help="Rate units on output")
    common.add_argument("--log-level", choices=("debug", "info", "warning", "error"))
    common.add_argument("--seed", type=int, help="Base random seed")
    common.add_argument("--out", type=Path, help="Output path")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(
        prog="secrecy-regions", description="Secrecy rate regions and wiretap code simulation"
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    region = commands.add_parser("region", help="Secrecy rate regions")
    regions = region.add_subparsers(dest="target", required=True, parser_class=_Parser)
    gaussian = regions.add_parser("gaussian", parents=[common])
    gaussian.add_argument("--power", type=float, required=True)
    gaussian.add_argument("--sigmas", type=_floats, required=True, help="s1,s2,s3 variances")
    gaussian.add_argument("--points", type=int, default=101)
    degraded = regions.add_parser("degraded", parents=[common])
    degraded.add_argument("--channel", type=Path, required=True)
    degraded.add_argument("--u-cardinality", type=int)
    degraded.add_argument("--mu-grid", type=_floats, help="Weights mu for the support sweep")
    degraded.add_argument("--grid", type=int, dest="grid_resolution", help="Simplex grid size")
    degraded.add_argument("--samples", type=int, dest="random_samples", help="Dirichlet samples")
    inner = regions.add_parser("inner", parents=[common])
    inner.add_argument("--channel", type=Path, required=True)
    inner.add_argument("--caps", type=_floats, default=[2, 2, 2], help="|U|,|V1|,|V2|")
    inner.add_argument("--samples", type=int, default=5000)
    inner.add_argument("--superposition", action="store_true", help="Restrict to V2 = U")

    fading = commands.add_parser("fading", help="Fading broadcast power allocation")
    modes = fading.add_subparsers(dest="target", required=True, parser_class=_Parser)
    for name in ("closed-form", "optimize"):
        mode = modes.add_parser(name, parents=[common])
        mode.add_argument("--family", choices=("rayleigh", "nakagami"), default="rayleigh")
        mode.add_argument("--m", type=float, default=1.0, help="Nakagami shape")
        mode.add_argument("--s-prime", type=float, required=True)
        mode.add_argument("--power", type=float, required=True)
        if name == "closed-form":
            mode.add_argument("--grid", type=int, default=201)
        else:
            mode.add_argument("--layers", type=int, default=400)

    sim = commands.add_parser("simulate", parents=[common], help="Exact small-n code simulation")
    sim.add_argument("--channel", type=Path, required=True)
    sim.add_argument("--dist", type=Path, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--rates", type=_floats, required=True, help="R0,R10,R11,R20,R22")
    sim.add_argument("--seeds", type=_seeds, default=[0])
    sim.add_argument("--workers", type=int, help="Worker threads for enumeration")

    check = commands.add_parser("check", help="Channel checks")
    checks = check.add_subparsers(dest="target", required=True, parser_class=_Parser)
    checks.add_parser("degraded", parents=[common]).add_argument(
        "--channel", type=Path, required=True
    )
    return parser


# =============================================================================
# Command Runners
# =============================================================================


def _metadata(
    args: argparse.Namespace, config: Config, started: float, seeds: Sequence[int] = ()
) -> RunMetadata:
    return RunMetadata(
        version=__version__,
        subcommand=f"{args.command} {getattr(args, 'target', '')}".strip(),
        config=config.model_dump(mode="json"),
        seeds=list(seeds),
        wall_clock_seconds=time.perf_counter() - started,
        tolerances={
            "probability": config.probability_tolerance,
            "degradation": config.degradation_tolerance,
            "quadrature": config.quadrature_tolerance,
        },
        units=config.units,
    )


def _require_out(args: argparse.Namespace) -> Path:
    if args.out is None:
        raise SecrecyError(UsageError(message="--out is required for this command"))
    path: Path = args.out
    return path


def _emit_table(
    args: argparse.Namespace,
    metadata: RunMetadata,
    config: Config,
    header: list[str],
    rows: list[list[Any]],
    summary: dict[str, Any] | None = None,
) -> None:
    out = _require_out(args)
    if args.format == "json":
        report = TableReport(metadata=metadata, columns=header, rows=rows, summary=summary or {})
        write_json(out, report)
    else:
        write_csv(out, header, rows, config.csv_digits)


def _region_gaussian(args: argparse.Namespace, config: Config, started: float) -> None:
    if len(args.sigmas) != 3:
        raise SecrecyError(ValidationError(field="sigmas", message="need three variances"))
    params = GaussianBceParams(args.power, *args.sigmas)
    units = config.units
    rows = [
        [
            alpha,
            to_units(secret.r1, units),
            to_units(secret.r2, units),
            to_units(open_.r1, units),
            to_units(open_.r2, units),
        ]
        for alpha, secret, open_ in sweep_table(params, args.points)
    ]
    header = ["alpha", "R1_secret", "R2_secret", "R1_nonsecret", "R2_nonsecret"]
    _emit_table(args, _metadata(args, config, started), config, header, rows)


def _region_degraded(args: argparse.Namespace, config: Config, started: float) -> None:
    bce = load_bce(args.channel).unwrap()
    result = search_degraded_region(
        bce,
        SearchConfig(
            grid_resolution=config.grid_resolution,
            random_samples=config.random_samples,
            refine_iters=config.refine_iters,
            mu_grid=tuple(config.mu_grid),
            seed=config.seed,
            u_cardinality=args.u_cardinality,
        ),
    )
    units = config.units
    rows = [
        [s.mu, to_units(s.point.r1, units), to_units(s.point.r2, units), s.certificate_id]
        for s in result.supporting
    ]
    metadata = _metadata(args, config, started, [config.seed])
    _emit_table(args, metadata, config, ["mu", "R1", "R2", "certificate_id"], rows)
    report = DegradedReport(
        metadata=metadata,
        degraded=result.degradedness.degraded,
        legitimate_only=result.degradedness.legitimate_only,
        evaluated=result.evaluated,
        supporting=[
            {"mu": s.mu, "r1": s.point.r1, "r2": s.point.r2, "certificate_id": s.certificate_id}
            for s in result.supporting
        ],
        certificates=[
            CertificateEntry(
                certificate_id=aux.certificate_id,
                r1=point.r1,
                r2=point.r2,
                decomposition=AuxiliaryFile.from_decomposition(aux),
            )
            for point, aux in zip(result.region.points, result.certificates)
        ],
    )
    write_json(_require_out(args).with_suffix(".certificates.json"), report)


def _region_inner(args: argparse.Namespace, config: Config, started: float) -> None:
    caps = tuple(int(c) for c in args.caps)
    if len(caps) != 3:
        raise SecrecyError(ValidationError(field="caps", message="need |U|,|V1|,|V2|"))
    bce = load_bce(args.channel).unwrap()
    triples = sample_inner_region(
        bce, (caps[0], caps[1], caps[2]), args.samples, config.seed, args.superposition
    )
    units = config.units
    rows = [[to_units(t.r0, units), to_units(t.r1, units), to_units(t.r2, units)] for t in triples]
    metadata = _metadata(args, config, started, [config.seed])
    _emit_table(args, metadata, config, ["R0", "R1", "R2"], rows)


def _fading_spec(args: argparse.Namespace) -> FadingSpec:
    if args.family == "nakagami":
        return FadingSpec.nakagami(args.m, args.s_prime, args.power)
    return FadingSpec.rayleigh(args.s_prime, args.power)


def _emit_profile(
    args: argparse.Namespace,
    config: Config,
    started: float,
    spec: FadingSpec,
    profile: PowerProfile,
    summary: dict[str, Any],
) -> None:
    out = _require_out(args)
    summary = {**summary, "average_rate": to_units(summary["average_rate"], config.units)}
    document = ProfileFile(
        metadata=_metadata(args, config, started),
        fading=spec.describe(),
        grid=profile.grid.tolist(),
        interference=profile.interference.tolist(),
        density=profile.density.tolist(),
        summary=summary,
    )
    if args.format == "json":
        write_json(out, document)
        return
    rows = [
        [float(s), float(i), float(r)]
        for s, i, r in zip(profile.grid, profile.interference, profile.density)
    ]
    write_csv(out, ["s", "I", "rho"], rows, config.csv_digits)
    write_json(out.with_suffix(".json"), document)


def _fading_closed_form(args: argparse.Namespace, config: Config, started: float) -> None:
    spec = _fading_spec(args)
    profile = closed_form_profile(spec, args.grid, config.tail_mass)
    window = support_window(spec, config.tail_mass)
    summary: dict[str, Any] = {
        "x0": window.x0,
        "x1": window.x1,
        "average_rate": average_rate(spec, profile, config.quadrature_tolerance),
    }
    if spec.is_rayleigh:
        summary["s0"], summary["s1"] = rayleigh_endpoints(spec)
    _emit_profile(args, config, started, spec, profile, summary)


def _fading_optimize(args: argparse.Namespace, config: Config, started: float) -> None:
    spec = _fading_spec(args)
    result = optimize_profile_numerical(
        spec, args.layers, tail_mass=config.tail_mass, max_iter=config.optimizer_max_iter
    )
    closed = result.profile.metadata["closed_form_rate"]
    gap = result.profile.metadata["closed_form_gap"]
    summary = {
        "average_rate": result.objective,
        "closed_form_rate": None if closed is None else to_units(closed, config.units),
        "closed_form_gap": None if gap is None else to_units(gap, config.units),
        "iterations": result.iterations,
        "converged": result.converged,
        "message": result.message,
    }
    _emit_profile(args, config, started, spec, result.profile, summary)


def _simulate(args: argparse.Namespace, config: Config, started: float) -> None:
    if len(args.rates) != 5:
        raise SecrecyError(ValidationError(field="rates", message="need R0,R10,R11,R20,R22"))
    bce = load_bce(args.channel).unwrap()
    dists = load_decomposition(args.dist).unwrap()
    plan = plan_binning(bce, dists, args.n, RateTargets(*args.rates))
    codes = [generate_codebook(plan, dists, seed, config.max_codewords) for seed in args.seeds]
    reports = [
        simulate(
            code,
            bce,
            workers=config.workers,
            max_output_bits=config.max_output_bits,
        )
        for code in codes
    ]
    units = config.units
    runs = [
        SimulationRun(
            seed=r.seed,
            re1=to_units(r.equivocation.re1, units),
            re2=to_units(r.equivocation.re2, units),
            re12=to_units(r.equivocation.re12, units),
            h_w2_given_w1=to_units(r.equivocation.h_w2_given_w1, units),
            gap=to_units(r.gap, units),
            pe1=r.error.pe1,
            pe2=r.error.pe2,
            pe=r.error.pe,
            valid=r.valid,
        )
        for r in reports
    ]
    first = reports[0]
    report = SimulationReport(
        metadata=_metadata(args, config, started, args.seeds),
        n=plan.n,
        plan={**dataclasses.asdict(plan), "valid": plan.valid},
        realized_rates=[to_units(rate, units) for rate in first.realized],
        pair_selection=codes[0].pair_selection,
        enumeration={
            "sequences": float(first.equivocation.enumerated + first.error.enumerated),
            "max_output_bits": config.max_output_bits,
            "max_codewords": float(config.max_codewords),
        },
        runs=runs,
        mean_gap=math.fsum(run.gap for run in runs) / len(runs),
        mean_pe=math.fsum(run.pe for run in runs) / len(runs),
    )
    if args.out is None:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        write_json(args.out, report)


def _check_degraded(args: argparse.Namespace, config: Config, started: float) -> None:
    bce = load_bce(args.channel).unwrap()
    verdict = check_bce_degraded(bce, config.degradation_tolerance)
    report = DegradednessReport(
        metadata=_metadata(args, config, started),
        degraded=verdict.degraded,
        legitimate_only=verdict.legitimate_only,
        verdicts={
            name: {
                "feasible": v.feasible,
                "residual": v.residual,
                "max_entry_error": v.max_entry_error,
                "kernel": v.kernel.tolist(),
            }
            for name, v in (("y1_to_y2", verdict.legitimate), ("y2_to_z", verdict.eavesdropper))
        },
    )
    if args.out is None:
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        write_json(args.out, report)


Runner = Callable[[argparse.Namespace, Config, float], None]

RUNNERS: dict[tuple[str, str | None], Runner] = {
    ("region", "gaussian"): _region_gaussian,
    ("region", "degraded"): _region_degraded,
    ("region", "inner"): _region_inner,
    ("fading", "closed-form"): _fading_closed_form,
    ("fading", "optimize"): _fading_optimize,
    ("simulate", None): _simulate,
    ("check", "degraded"): _check_degraded,
}


# =============================================================================
# Entry Points
# =============================================================================


def _config_from(args: argparse.Namespace) -> Result[Config, Error]:
    try:
        return Ok(
            load_config(
                args.config,
                units=args.units,
                log_level=args.log_level,
                seed=args.seed,
                workers=getattr(args, "workers", None),
                mu_grid=getattr(args, "mu_grid", None),
                grid_resolution=getattr(args, "grid_resolution", None),
                random_samples=getattr(args, "random_samples", None),
            )
        )
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "config"
        return Err(ValidationError(field=location, message=first["msg"]))
    except (OSError, ValueError) as e:
        return Err(UsageError(message=f"cannot load configuration: {e}"))


def execute(argv: Sequence[str] | None = None) -> Result[None, Error]:
    """Parse ``argv`` and run the selected command."""
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except SecrecyError as e:
        return Err(e.error)

    loaded = _config_from(args)
    if isinstance(loaded, Err):
        return loaded
    config = loaded.value
    logging.getLogger().setLevel(config.log_level.upper())

    runner = RUNNERS[(args.command, getattr(args, "target", None))]
    try:
        runner(args, config, started)
    except SecrecyError as e:
        return Err(e.error)
    return Ok(None)


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return the process exit code."""
    match execute(argv):
        case Ok():
            return 0
        case Err(error=error):
            sys.stderr.write(f"secrecy-regions: {format_error_message(error)}\n")
            return EXIT_CODES[error.kind]
    return 1


def main() -> None:
    """Entry point for the secrecy-regions command."""
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=sys.stderr)
    sys.exit(run())


if __name__ == "__main__":
    main()
