#!/usr/bin/env python3
"""
Command-line front end.

    python -m cfrelay rate --h -1.274,0.602 --snr-db 40
    python -m cfrelay likelihood --h -1.274,0.602 --snr-db 40 --sm 5 --x1 -2 --x2 3 --seed 7
    python -m cfrelay simulate --sm 5 --decoder ida --trials 20000 --out results/ida_sm5.csv
    python -m cfrelay census --sm 10 --decoder ida --near-tie-sigmas 1 --snr-db-start 40 --snr-db-stop 40

CSV goes to files or stdout; status, tables and errors go to stderr.
"""

import argparse
import logging
import math
import sys
import traceback
from pathlib import Path

import numpy as np
from rich.panel import Panel
from rich.table import Table

from cfrelay import __version__, config
from cfrelay.console import configure_logging, console
from cfrelay.decoder import decode_ida, decode_ml, ida_profile, likelihood_profile, setup_for_channel
from cfrelay.diophantine import Constellation
from cfrelay.errors import CFRelayError, ExitCode, OutputError
from cfrelay.lattice_core import ChannelState, best_coefficients, clamped_rate
from cfrelay.report import (
    build_manifest,
    format_real,
    write_census_csv,
    write_manifest,
    write_manifest_text,
    write_rows,
    write_sweep_csv,
    write_trials_csv,
)
from cfrelay.simulator import DecoderKind, SimConfig, ambiguity_census, run_sweep, snr_grid

logger = logging.getLogger(__name__)

# Flags whose values may start with a minus sign
SIGNED_FLAGS = {"--h", "--y", "--snr-db", "--snr-db-start", "--snr-db-stop", "--x1", "--x2"}


# ============================================================================
# Argument types
# ============================================================================

def channel_vector(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of reals: {text!r}")
    if len(values) < 2:
        raise argparse.ArgumentTypeError("need at least 2 channel gains")
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("channel gains must be finite")
    return values


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def seed_value(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def finite_real(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def join_signed_values(argv):
    """Rewrite `--h -1,2` as `--h=-1,2` so argparse does not read the value as a flag."""
    out, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token in SIGNED_FLAGS and i + 1 < len(argv):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


# ============================================================================
# Commands
# ============================================================================

def cmd_rate(args):
    """Best coefficient vector and its computation rate."""
    ch = ChannelState.from_db(args.h, args.snr_db)
    choice = best_coefficients(ch)
    clamped = clamped_rate(choice.rate_bits)

    if args.csv:
        row = [" ".join(str(v) for v in choice.a), format_real(choice.quadratic_form),
               format_real(choice.rate_bits), format_real(clamped)]
        write_rows(sys.stdout, ["a", "quadratic_form", "rate_bits", "rate_clamped"], [row])
        manifest = build_manifest("rate", _echo(args))
        manifest.result = {"a": list(choice.a), "rate_bits": choice.rate_bits}
        write_manifest_text(sys.stderr, manifest)
        return ExitCode.OK

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("a", style="cyan")
    table.add_column("aᵀGa", justify="right")
    table.add_column("Rate (bits)", justify="right")
    table.add_column("Achievable", justify="right", style="green")
    table.add_row(str(list(choice.a)), f"{choice.quadratic_form:.6g}", f"{choice.rate_bits:.6f}", f"{clamped:.6f}")

    console.print(Panel(
        f"[bold cyan]h:[/bold cyan] {list(args.h)}\n"
        f"[bold cyan]SNR:[/bold cyan] {args.snr_db} dB",
        title="Coefficient Selection",
    ))
    console.print(table)
    return ExitCode.OK


def cmd_likelihood(args):
    """Dump p(y | lambda) and the IDA metric for every lambda."""
    cons = Constellation(args.sm)
    if len(args.h) != 2:
        raise argparse.ArgumentTypeError("likelihood profiles need exactly 2 channel gains")
    ch = ChannelState.at_snr(args.h, 10.0 ** (args.snr_db / 10.0))

    if args.y is not None:
        y = args.y
    else:
        if args.x1 is None or args.x2 is None:
            raise argparse.ArgumentTypeError("give --y, or --x1 and --x2")
        for name, x in (("--x1", args.x1), ("--x2", args.x2)):
            if x not in cons:
                raise argparse.ArgumentTypeError(f"{name}={x} is outside S = [-{cons.s_m}, {cons.s_m}]")
        z = 0.0
        if args.seed is not None:
            z = float(np.random.default_rng(args.seed).normal(0.0, math.sqrt(ch.noise_variance)))
        else:
            logger.info("no --seed given, using the noiseless observation")
        y = args.h[0] * args.x1 + args.h[1] * args.x2 + z

    setup = setup_for_channel(ch, cons)
    scores = likelihood_profile(setup, y)
    metrics = dict(ida_profile(setup, y))
    rows = [[str(lam), format_real(score), format_real(metrics[lam])] for lam, score in scores]

    manifest = build_manifest("likelihood", _echo(args), seed=args.seed)
    manifest.result = {"y": y, "a": [setup.coeffs.a1, setup.coeffs.a2]}
    if args.out:
        write_rows(args.out, ["lambda", "score_ml", "metric_ida"], rows)
        write_manifest(args.out, manifest)
    else:
        write_rows(sys.stdout, ["lambda", "score_ml", "metric_ida"], rows)
        write_manifest_text(sys.stderr, manifest)

    ml, ida = decode_ml(setup, y), decode_ida(setup, y)
    console.print(
        f"[dim]a={[setup.coeffs.a1, setup.coeffs.a2]} y={y:.6g} "
        f"ML λ̂={ml.lambda_hat}{' (ambiguous)' if ml.ambiguous else ''} "
        f"IDA λ̂={ida.lambda_hat}{' (ambiguous)' if ida.ambiguous else ''}[/dim]"
    )
    return ExitCode.OK


def _sweep_config(args) -> SimConfig:
    return SimConfig(
        s_m=args.sm,
        snr_db_points=snr_grid(args.snr_db_start, args.snr_db_stop, args.snr_db_step),
        trials_per_point=args.trials,
        seed=args.seed,
        decoder_kind=args.decoder,
        max_error_events=args.max_errors,
        near_tie_sigmas=args.near_tie_sigmas,
        workers=args.workers,
    )


def cmd_simulate(args):
    """Monte Carlo sweep over SNR with a CSV of error counts."""
    cfg = _sweep_config(args)
    for target in (args.out, args.trials_out):
        if target and not Path(target).resolve().parent.is_dir():
            raise OutputError(f"output directory for {target} does not exist")

    console.print(f"\n[bold]Simulating s_m={cfg.s_m}, decoder={cfg.decoder_kind.value}, "
                  f"{len(cfg.snr_db_points)} SNR points × {cfg.trials_per_point} trials[/bold]\n")

    result = run_sweep(cfg, keep_trials=args.trials_out is not None, progress=args.progress)

    write_sweep_csv(args.out, result)
    manifest = build_manifest("simulate", _echo(args), seed=cfg.seed)
    manifest.result = {"fitted_diversity": result.fitted_diversity, "seed": result.seed}
    write_manifest(args.out, manifest)
    if args.trials_out:
        write_trials_csv(args.trials_out, result.trials)
        write_manifest(args.trials_out, manifest)

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("SNR (dB)", justify="right")
    table.add_column("Trials", justify="right")
    table.add_column("Errors", justify="right")
    table.add_column("Error rate", justify="right", style="yellow")
    table.add_column("Ambiguous", justify="right")
    for p in result.points:
        table.add_row(f"{p.snr_db:g}", str(p.trials), str(p.errors), f"{p.error_rate:.3e}", str(p.ambiguous_count))
    console.print(table)

    console.print(f"[green]✓ Wrote {args.out}[/green]")
    if result.fitted_diversity is None:
        print("fitted_diversity=absent")
    else:
        print(f"fitted_diversity={format_real(result.fitted_diversity)}")
    return ExitCode.OK


def cmd_census(args):
    """Ambiguous-decision fraction per SNR point."""
    cfg = _sweep_config(args)
    census = ambiguity_census(cfg, progress=args.progress)

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("SNR (dB)", justify="right")
    table.add_column("Trials", justify="right")
    table.add_column("Ambiguous", justify="right")
    table.add_column("Fraction", justify="right", style="yellow")
    for c in census:
        table.add_row(f"{c.snr_db:g}", str(c.trials), str(c.ambiguous), f"{c.fraction:.4f}")
    console.print(table)

    if args.out:
        write_census_csv(args.out, census)
        write_manifest(args.out, build_manifest("census", _echo(args), seed=cfg.seed))
        console.print(f"[green]✓ Wrote {args.out}[/green]")
    return ExitCode.OK


def _echo(args) -> dict:
    """Every resolved flag, for the manifest."""
    return {k: v for k, v in sorted(vars(args).items()) if k != "handler"}


# ============================================================================
# Parser
# ============================================================================

def _add_sweep_flags(parser, decoders):
    parser.add_argument("--sm", type=positive_int, default=config.DEFAULT_SM, help="constellation half-width s_m")
    parser.add_argument("--snr-db-start", type=finite_real, default=config.DEFAULT_SNR_DB_START)
    parser.add_argument("--snr-db-stop", type=finite_real, default=config.DEFAULT_SNR_DB_STOP)
    parser.add_argument("--snr-db-step", type=finite_real, default=config.DEFAULT_SNR_DB_STEP)
    parser.add_argument("--trials", type=positive_int, default=config.DEFAULT_TRIALS, help="trials per SNR point")
    parser.add_argument("--decoder", choices=decoders, default=config.DEFAULT_DECODER)
    parser.add_argument("--seed", type=seed_value, default=config.DEFAULT_SEED)
    parser.add_argument("--workers", type=positive_int, default=config.WORKERS)
    parser.add_argument("--max-errors", type=positive_int, default=None, help="stop a point after this many errors")
    parser.add_argument("--near-tie-sigmas", type=finite_real, default=None,
                        help="also count decisions with a rival this many noise deviations away as ambiguous")
    parser.add_argument("--no-progress", dest="progress", action="store_false", default=config.SHOW_PROGRESS)


def build_parser():
    parser = argparse.ArgumentParser(prog="cfrelay", description="Compute-and-forward relay simulator")
    parser.add_argument("--version", action="version", version=f"cfrelay {__version__}")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    rate = sub.add_parser("rate", help="best coefficients and computation rate")
    rate.add_argument("--h", type=channel_vector, required=True, help="channel gains, e.g. -1.274,0.602")
    rate.add_argument("--snr-db", type=finite_real, required=True)
    rate.add_argument("--csv", action="store_true", help="print CSV instead of a table")
    rate.set_defaults(handler=cmd_rate)

    lik = sub.add_parser("likelihood", help="likelihood profile over lambda as CSV")
    lik.add_argument("--h", type=channel_vector, required=True)
    lik.add_argument("--snr-db", type=finite_real, required=True)
    lik.add_argument("--sm", type=positive_int, default=config.DEFAULT_SM)
    lik.add_argument("--x1", type=int)
    lik.add_argument("--x2", type=int)
    lik.add_argument("--seed", type=seed_value, help="draw the noise from this seed")
    lik.add_argument("--y", type=finite_real, help="use this observation instead of sampling one")
    lik.add_argument("--out", help="CSV path (default: stdout)")
    lik.set_defaults(handler=cmd_likelihood)

    sim = sub.add_parser("simulate", help="Monte Carlo error-rate sweep")
    _add_sweep_flags(sim, [k.value for k in DecoderKind])
    sim.add_argument("--out", required=True, help="CSV path for the per-point results")
    sim.add_argument("--trials-out", help="also write every trial record to this CSV")
    sim.set_defaults(handler=cmd_simulate)

    census = sub.add_parser("census", help="ambiguous-decision fraction per SNR point")
    _add_sweep_flags(census, [DecoderKind.EXACT_ML.value, DecoderKind.IDA.value])
    census.add_argument("--out", help="CSV path for the census")
    census.set_defaults(handler=cmd_census)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(join_signed_values(sys.argv[1:] if argv is None else list(argv)))
    configure_logging(args.log_level)

    try:
        return int(args.handler(args))
    except argparse.ArgumentTypeError as e:
        console.print(f"[red]ERROR: {e}[/red]")
        return int(ExitCode.USAGE)
    except CFRelayError as e:
        console.print(f"[red]ERROR: {e}[/red]")
        return int(e.exit_code)
    except KeyboardInterrupt:
        console.print("\n\n[yellow]Interrupted[/yellow]")
        return int(ExitCode.FAILURE)
    except Exception as e:
        console.print(f"\n[red]ERROR: {str(e)}[/red]")
        traceback.print_exc()
        return int(ExitCode.FAILURE)


if __name__ == "__main__":
    sys.exit(main())
