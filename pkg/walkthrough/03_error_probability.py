#!/usr/bin/env python3
"""
Step 3: Error Probability and Diversity Order

Compares the IDA equation decoder with decoding both symbols for
s_m = 5, 7 and 10 over 20-40 dB, writing one CSV (plus manifest) per curve
into the results directory and printing the fitted diversity orders.

Expected: IDA has diversity about 1 for s_m = 5 and about 1/2 for s_m = 10;
decoding both symbols gives about 1/2 for every s_m.

Usage:
    python walkthrough/03_error_probability.py            # 20000 trials per point
    python walkthrough/03_error_probability.py 2000       # quicker, noisier
"""

import sys
import os

# Add parent directory to path for the cfrelay import
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from rich.console import Console
from rich.table import Table

from cfrelay import config
from cfrelay.errors import CFRelayError
from cfrelay.report import build_manifest, write_manifest, write_sweep_csv
from cfrelay.simulator import DecoderKind, SimConfig, run_sweep, snr_grid

console = Console()

CONSTELLATIONS = (5, 7, 10)
DECODERS = (DecoderKind.IDA, DecoderKind.JOINT)


def run_curve(s_m, kind, trials):
    """One error-probability curve, saved under RESULTS_DIR."""
    cfg = SimConfig(
        s_m=s_m,
        snr_db_points=snr_grid(config.DEFAULT_SNR_DB_START, config.DEFAULT_SNR_DB_STOP, config.DEFAULT_SNR_DB_STEP),
        trials_per_point=trials,
        seed=config.DEFAULT_SEED,
        decoder_kind=kind,
        workers=config.WORKERS,
    )
    result = run_sweep(cfg, progress=config.SHOW_PROGRESS)

    path = os.path.join(config.RESULTS_DIR, f"{kind.value}_sm{s_m}.csv")
    write_sweep_csv(path, result)
    manifest = build_manifest("03_error_probability", {
        "s_m": s_m, "decoder": kind, "trials": trials, "snr_db_points": list(cfg.snr_db_points),
    }, seed=cfg.seed)
    manifest.result = {"fitted_diversity": result.fitted_diversity, "seed": result.seed}
    write_manifest(path, manifest)
    return result, path


def main():
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else config.DEFAULT_TRIALS

    console.print("=" * 70)
    console.print("Step 3: Error Probability, IDA vs Decoding Both Symbols")
    console.print("=" * 70)
    console.print()

    try:
        os.makedirs(config.RESULTS_DIR, exist_ok=True)

        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Decoder", style="cyan")
        table.add_column("s_m", justify="right")
        table.add_column("Diversity", justify="right", style="green")
        table.add_column("CSV")

        for kind in DECODERS:
            for s_m in CONSTELLATIONS:
                result, path = run_curve(s_m, kind, trials)
                diversity = result.fitted_diversity
                table.add_row(kind.value, str(s_m), "n/a" if diversity is None else f"{diversity:.2f}", path)

        console.print()
        console.print(table)
        console.print("\n[dim]💡 Plot the CSVs (error_rate vs snr_db, log scale) to see the curves[/dim]\n")

    except KeyboardInterrupt:
        console.print("\n\nInterrupted")
        sys.exit(1)
    except CFRelayError as e:
        console.print(f"\n[red]ERROR: {e}[/red]")
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()
