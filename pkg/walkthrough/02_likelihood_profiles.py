#!/usr/bin/env python3
"""
Step 2: Likelihood Profiles p(y|λ)

Shows two profiles at 40 dB:
- the golden instance, where p(y|λ) has a single sharp peak at λ = -7
- a random channel with a large constellation where the top of the profile
  is flat: several λ are almost equally likely, so the relay cannot decide

Flat profiles are what make the diversity order collapse for large s_m.
Use `python -m cfrelay likelihood ... --out profile.csv` to export a profile
for plotting.
"""

import sys
import os

# Add parent directory to path for the cfrelay import
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import math

import numpy as np
from rich.console import Console
from rich.table import Table

from cfrelay.decoder import decode_ml, likelihood_profile, setup_for_channel
from cfrelay.diophantine import Constellation
from cfrelay.lattice_core import ChannelState

console = Console()

SNR_DB = 40.0
GOLDEN_CHANNEL = [-1.274, 0.602]
GOLDEN_SYMBOLS = (-2, 3)

# Log-likelihood ratio below which the top two λ count as a flat profile
FLAT_LLR = 0.5
MAX_DRAWS = 5000


def show_profile(title, setup, y, top=8):
    """Print the strongest λ with a bar proportional to p(y|λ)."""
    profile = sorted(likelihood_profile(setup, y), key=lambda p: -p[1])[:top]
    peak = profile[0][1] or 1.0

    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("λ", justify="right", style="cyan")
    table.add_column("p(y|λ) / max", justify="right")
    table.add_column("", width=40)
    for lam, score in profile:
        ratio = score / peak
        table.add_row(str(lam), f"{ratio:.4f}", "█" * int(round(40 * ratio)))
    console.print(table)


def golden_profile():
    cons = Constellation(5)
    snr = 10 ** (SNR_DB / 10)
    setup = setup_for_channel(ChannelState.at_snr(GOLDEN_CHANNEL, snr), cons)
    x1, x2 = GOLDEN_SYMBOLS
    y = GOLDEN_CHANNEL[0] * x1 + GOLDEN_CHANNEL[1] * x2 + 0.01
    show_profile(f"h = {GOLDEN_CHANNEL}, a = [{setup.coeffs.a1}, {setup.coeffs.a2}]", setup, y)


def find_flat_profile(s_m=10, seed=0):
    """Draw channels and noise until the top two λ are nearly tied."""
    cons = Constellation(s_m)
    snr = 10 ** (SNR_DB / 10)
    rng = np.random.default_rng(seed)

    for draw in range(MAX_DRAWS):
        h = rng.standard_normal(2)
        x = rng.integers(-s_m, s_m + 1, size=2)
        ch = ChannelState.at_snr(h, snr)
        y = float(h @ x + rng.normal(0.0, math.sqrt(ch.noise_variance)))
        setup = setup_for_channel(ch, cons)
        result = decode_ml(setup, y)
        if result.runner_up_gap < FLAT_LLR:
            return draw, h, setup, y
    return None


def main():
    console.print("=" * 70)
    console.print("Step 2: Likelihood Profiles")
    console.print("=" * 70)
    console.print()

    try:
        golden_profile()
        console.print("[green]✓ Single peak: the relay decodes λ reliably[/green]\n")

        console.print(f"Searching random channels (s_m = 10) for a flat profile...")
        found = find_flat_profile()
        if found is None:
            console.print(f"[yellow]No flat profile in {MAX_DRAWS} draws[/yellow]")
        else:
            draw, h, setup, y = found
            console.print(f"[green]✓ Found one after {draw + 1} draws[/green]\n")
            show_profile(
                f"h = [{h[0]:.3f}, {h[1]:.3f}], a = [{setup.coeffs.a1}, {setup.coeffs.a2}]",
                setup, y,
            )
            console.print("[dim]Several λ share the top of the profile: an ambiguous decision[/dim]")

        console.print("\nNext step: Run 03_error_probability.py for the error-rate curves\n")

    except KeyboardInterrupt:
        console.print("\n\nInterrupted")
        sys.exit(1)


if __name__ == "__main__":
    main()
