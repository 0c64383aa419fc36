#!/usr/bin/env python3
"""
Step 1: Choose the Integer Coefficients and Decode One Equation

This script walks through the relay procedure for one channel:
1. Builds the Gram matrix G for h = [-1.274, 0.602] at 40 dB
2. Finds the best coefficient vector a as the shortest lattice vector
3. Solves a1 x1 + a2 x2 = lambda with the extended Euclid algorithm
4. Decodes lambda from y = h1 x1 + h2 x2 + z with both decoders

The expected answer is a = [2, -1] and lambda = -7 for x = (-2, 3).
"""

import sys
import os

# Add parent directory to path for the cfrelay import
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from cfrelay.decoder import DecoderSetup, decode_ida, decode_ml
from cfrelay.diophantine import Constellation, extended_gcd, solution_family
from cfrelay.errors import CFRelayError
from cfrelay.lattice_core import ChannelState, best_coefficients, build_gram

console = Console()

CHANNEL = [-1.274, 0.602]
SNR_DB = 40.0
S_M = 5
SYMBOLS = (-2, 3)
SEED = 7


def show_gram(ch):
    """Print G and its eigenvalues."""
    lat = build_gram(ch)
    table = Table(show_header=False)
    for row in lat.g_matrix:
        table.add_row(*(f"{v: .6f}" for v in row))
    console.print(Panel(table, title="Gram matrix G"))
    console.print(f"Eigenvalues: {np.linalg.eigvalsh(lat.g_matrix)}\n")


def main():
    """Walk through the golden instance."""
    console.print("=" * 70)
    console.print("Step 1: Coefficient Selection and Equation Decoding")
    console.print("=" * 70)
    console.print()

    try:
        cons = Constellation(S_M)
        ch = ChannelState.at_snr(CHANNEL, 10 ** (SNR_DB / 10))
        show_gram(ch)

        choice = best_coefficients(ch)
        console.print(f"[green]✓ Best coefficients a = {list(choice.a)}[/green]")
        console.print(f"  aᵀGa = {choice.quadratic_form:.6g}, rate = {choice.rate_bits:.3f} bits\n")

        coeffs = extended_gcd(*choice.a)
        console.print(f"[green]✓ gcd = {coeffs.g}, Bezout pair (u1, u2) = ({coeffs.u1}, {coeffs.u2})[/green]")

        x1, x2 = SYMBOLS
        lam = choice.a[0] * x1 + choice.a[1] * x2
        console.print(f"  Transmitted x = {SYMBOLS}, equation value λ = {lam}\n")

        setup = DecoderSetup.create(ch, coeffs, cons)
        console.print(f"α = {setup.alpha:.6f}, β = {setup.beta:.6f}, ξ = ({setup.xi[0]:.3f}, {setup.xi[1]:.3f})")

        z = np.random.default_rng(SEED).normal(0.0, np.sqrt(ch.noise_variance))
        y = CHANNEL[0] * x1 + CHANNEL[1] * x2 + z
        console.print(f"Received y = {y:.6f} (noise {z:+.2e})\n")

        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Decoder", style="cyan")
        table.add_column("λ̂", justify="right")
        table.add_column("k̂", justify="right")
        table.add_column("(x1, x2) from k̂", justify="right")
        table.add_column("Metric", justify="right")
        table.add_column("Ambiguous")
        for name, result in (("Exact ML", decode_ml(setup, y)), ("IDA", decode_ida(setup, y))):
            pair = solution_family(coeffs, result.lambda_hat, result.k_hat)
            table.add_row(name, str(result.lambda_hat), str(result.k_hat), str(pair),
                          f"{result.metric:.3e}", "yes" if result.ambiguous else "no")
        console.print(table)

        console.print("\n" + "=" * 70)
        console.print("✓ Step 1 Complete!")
        console.print("=" * 70)
        console.print("\nNext step: Run 02_likelihood_profiles.py to see p(y|λ)\n")

    except KeyboardInterrupt:
        console.print("\n\nInterrupted")
        sys.exit(1)
    except CFRelayError as e:
        console.print(f"\n[red]ERROR: {e}[/red]")
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()
