"""
Command-line entry point for the Whittle estimation toolkit
"""
import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional
from pydantic import ValidationError
from config.config import McConfig, PRESET_DIR, config, run_file_workers
from longmemory.errors import EXIT_CODES, DomainError, InputFormatError, LongMemoryError
from longmemory.estimators import WhittleOptions, estimate
from longmemory.experiments import kde_silverman, render_table_text, run_monte_carlo, summarize_report
from longmemory.periodogram import periodogram_grid
from longmemory.report_generator import report_generator
from longmemory.simulate import SeedSpec, simulate_farima, simulate_process
from longmemory.spectral import limit_constants, spectral_table
from utils.logger import estimation_logger, framework_logger
from utils.series_io import atomic_write, read_series, write_frame, write_series

SUBCOMMANDS = ("simulate", "periodogram", "estimate", "mc", "kde", "spectral-table", "constants")

@dataclass
class CommandSpec:
    """A parsed invocation: subcommand, its resolved flags and the files it touches"""
    subcommand: str
    flags: Dict[str, Any]
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)

    def resolved(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "flags": self.flags,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "config": config.to_dict(),
        }

class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass

def _exit_code_table() -> str:
    lines = ["exit codes:"]
    lines += [f"  {code}  {meaning}" for code, meaning in EXIT_CODES.items()]
    return "\n".join(lines)

def build_parser() -> argparse.ArgumentParser:
    """Parser for every subcommand"""
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Whittle estimation of H and C for Rosenblatt and fractional Gaussian increments",
        epilog=_exit_code_table(),
        formatter_class=_HelpFormatter,
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='DEBUG logging on stderr')
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, description=help_text, epilog=_exit_code_table(),
                              formatter_class=_HelpFormatter)

    simulate = add("simulate", "Simulate increments and write them as single-column CSV with a JSON sidecar")
    simulate.add_argument('--process', choices=['rosenblatt', 'fgn', 'farima'], default='rosenblatt', help='Process kind')
    simulate.add_argument('--h', type=float, default=0.7, help='Self-similarity index H')
    simulate.add_argument('--d', type=float, default=None, help='FARIMA memory parameter (farima only; defaults to H/2)')
    simulate.add_argument('--n', type=int, default=1000, help='Number of increments N')
    simulate.add_argument('--c', type=float, default=1.0, help='Scale C')
    simulate.add_argument('--n-inner', type=int, default=config.simulation.n_inner, help='Inner block length (rosenblatt)')
    simulate.add_argument('--farima-method', choices=['ma', 'circulant'], default=config.simulation.farima_method,
                          help='FARIMA generator')
    simulate.add_argument('--seed', type=int, default=config.simulation.master_seed, help='Master seed')
    simulate.add_argument('--stream', type=int, default=0, help='Stream index')
    simulate.add_argument('--output', type=str, default=None, help='CSV path (stdout when omitted, no sidecar)')

    periodogram = add("periodogram", "Periodogram on the grid pi k / N as CSV (k, lambda, ordinate)")
    periodogram.add_argument('--input', type=str, required=True, help='Series CSV')
    periodogram.add_argument('--no-mean-correct', action='store_true', help='Skip demeaning')
    periodogram.add_argument('--output', type=str, default=None, help='CSV path (stdout when omitted)')

    estimate_parser = add("estimate", "Fit H (and C) and emit a JSON fit record")
    estimate_parser.add_argument('--input', type=str, required=True, help='Series CSV')
    estimate_parser.add_argument('--estimator', choices=['whittle', 'lw'], default='whittle', help='Estimator')
    estimate_parser.add_argument('--grid-step', type=float, default=config.estimation.grid_step, help='Coarse grid step')
    estimate_parser.add_argument('--eps', type=float, default=config.estimation.eps, help='Interior clamp')
    estimate_parser.add_argument('--tol', type=float, default=config.estimation.tol, help='Golden-section tolerance')
    estimate_parser.add_argument('--lw-m', type=int, default=None, help='Local-Whittle trimming (floor(N^0.65) when omitted)')
    estimate_parser.add_argument('--output', type=str, default=None, help='JSON path (stdout when omitted)')

    mc = add("mc", "Monte Carlo study: report.json, table.csv, rates.csv, kde_<H>_<N>.csv, report.html, table.xlsx")
    source = mc.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', type=str, help='Run file (key=value), or the name of a shipped preset')
    source.add_argument('--preset', choices=sorted(p.stem for p in PRESET_DIR.glob('*.cfg')), help='Shipped preset')
    mc.add_argument('--reps', type=int, default=None, help='Override the replication count')
    mc.add_argument('--workers', type=int, default=None,
                    help='Worker processes (flag > run file > WHITTLE_MC_WORKERS > 1)')
    mc.add_argument('--output-dir', type=str, default=config.paths.output_dir, help='Artifact directory')
    mc.add_argument('--formats', type=str, default='json,csv,kde,html,xlsx', help='Comma-separated artifact kinds')

    kde = add("kde", "Silverman-bandwidth Gaussian KDE of a sample (one value per line)")
    kde.add_argument('--input', type=str, required=True, help='Sample CSV')
    kde.add_argument('--grid-size', type=int, default=config.monte_carlo.kde_grid_size, help='Grid points')
    kde.add_argument('--output', type=str, default=None, help='CSV path (stdout when omitted)')

    table = add("spectral-table", "Spectral density f and normalized density g on lambda = pi k / points")
    table.add_argument('--h', type=float, required=True, help='Self-similarity index H')
    table.add_argument('--c', type=float, default=1.0, help='Scale C')
    table.add_argument('--points', type=int, default=256, help='Number of frequencies')
    table.add_argument('--output', type=str, default=None, help='CSV path (stdout when omitted)')

    constants = add("constants", "Limit-theorem constants gamma, beta, mu, rho as JSON")
    constants.add_argument('--h', type=float, required=True, help='Self-similarity index H')
    constants.add_argument('--output', type=str, default=None, help='JSON path (stdout when omitted)')
    return parser

def _emit(text: str, output: Optional[str]):
    if output:
        atomic_write(output, text)
        framework_logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)

def _command_spec(args: argparse.Namespace) -> CommandSpec:
    flags = {key: value for key, value in vars(args).items() if key not in ("subcommand", "verbose")}
    inputs = [flags[key] for key in ("input", "config") if flags.get(key)]
    outputs = [flags[key] for key in ("output", "output_dir") if flags.get(key)]
    return CommandSpec(subcommand=args.subcommand, flags=flags, inputs=inputs, outputs=outputs)

# ---------------------------------------------------------------------------
# Subcommands

def _simulate(args: argparse.Namespace):
    seed = SeedSpec(args.seed, args.stream)
    if args.process == "farima":
        d = args.h / 2.0 if args.d is None else args.d
        series = simulate_farima(d, args.n, seed, method=args.farima_method)
    else:
        series = simulate_process(args.process, args.h, args.n, seed, C=args.c, n_inner=args.n_inner)
    if args.output:
        write_series(series, args.output)
    else:
        sys.stdout.write("".join(f"{value!r}\n" for value in series.values.tolist()))

def _periodogram(args: argparse.Namespace):
    grid = periodogram_grid(read_series(args.input), mean_correct=not args.no_mean_correct)
    frame = grid.to_frame()
    if args.output:
        write_frame(frame, args.output, {"N": grid.N, "mean_corrected": grid.mean_corrected})
    else:
        sys.stdout.write(frame.to_csv(index=False))

def _estimate(args: argparse.Namespace):
    series = read_series(args.input)
    options = WhittleOptions(grid_step=args.grid_step, eps=args.eps, tol=args.tol, keep_profile=False)
    fit = estimate(series, args.estimator, options, m=args.lw_m)
    record = fit.to_record()
    record["N"] = len(series)
    _emit(json.dumps(record, indent=2) + "\n", args.output)

def _load_run(args: argparse.Namespace) -> McConfig:
    try:
        if args.preset:
            return McConfig.preset(args.preset)
        path = Path(args.config)
        if not path.exists() and (PRESET_DIR / f"{path.stem}.cfg").exists():
            return McConfig.preset(path.stem)
        if not path.exists():
            raise InputFormatError(f"run file not found: {path}")
        return McConfig.from_file(str(path))
    except ValidationError as e:
        raise DomainError(f"invalid run configuration: {e.errors()[0]['msg']}") from e
    except ValueError as e:
        raise InputFormatError(f"malformed run file: {e}") from e

def _mc(args: argparse.Namespace):
    run = _load_run(args)
    if args.reps is not None:
        try:
            run = McConfig(**{**run.model_dump(), "replications": args.reps})
        except ValidationError as e:
            raise DomainError(f"invalid replication count: {e.errors()[0]['msg']}") from e
    workers = args.workers
    if workers is None and args.config and Path(args.config).exists():
        workers = run_file_workers(args.config)
    report = run_monte_carlo(run, workers=workers)
    formats = [item.strip() for item in args.formats.split(",") if item.strip()]
    paths = report_generator.generate_comprehensive_report(report, args.output_dir, formats)
    sys.stdout.write(render_table_text(summarize_report(report)) + "\n")
    for name, path in paths.items():
        framework_logger.info(f"  {name}: {path}")

def _kde(args: argparse.Namespace):
    samples = read_series(args.input).values
    estimate_ = kde_silverman(samples, args.grid_size)
    frame = estimate_.to_frame()
    if args.output:
        write_frame(frame, args.output, {"bandwidth": repr(estimate_.bandwidth), "n": samples.size})
    else:
        sys.stdout.write(frame.to_csv(index=False))

def _spectral_table(args: argparse.Namespace):
    frame = spectral_table(args.h, args.c, args.points)
    if args.output:
        write_frame(frame, args.output, {"H": args.h, "C": args.c})
    else:
        sys.stdout.write(frame.to_csv(index=False))

def _constants(args: argparse.Namespace):
    _emit(json.dumps(limit_constants(args.h).to_dict(), indent=2) + "\n", args.output)

HANDLERS = {
    "simulate": _simulate,
    "periodogram": _periodogram,
    "estimate": _estimate,
    "mc": _mc,
    "kde": _kde,
    "spectral-table": _spectral_table,
    "constants": _constants,
}

def run_command(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, print the resolved configuration on stderr, run the subcommand

    Returns:
        Process exit status (see EXIT_CODES); argparse exits with 2 on usage errors
    """
    args = build_parser().parse_args(argv)
    if args.verbose:
        estimation_logger.set_level("DEBUG")
    spec = _command_spec(args)
    sys.stderr.write("resolved configuration: " + json.dumps(spec.resolved(), default=str, sort_keys=True) + "\n")

    try:
        HANDLERS[spec.subcommand](args)
        return 0
    except LongMemoryError as e:
        sys.stderr.write(f"error code={e.exit_code} type={type(e).__name__} message={json.dumps(str(e))}\n")
        return e.exit_code
    except Exception as e:
        framework_logger.error(f"Unexpected failure in {spec.subcommand}: {str(e)}")
        sys.stderr.write(f"error code=1 type={type(e).__name__} message={json.dumps(str(e))}\n")
        return 1

if __name__ == "__main__":
    sys.exit(run_command())
