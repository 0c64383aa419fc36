"""
Configuration for the compute-and-forward relay simulator.

Every value here is a default: CLI flags override the simulation settings,
and an optional .env file (see .env.example) overrides the runtime settings.
Nothing needs to be configured to run the tools.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# ============================================================================
# Numerical Tolerances
# ============================================================================

# Quadratic forms within this relative distance are tied in the
# shortest-vector search
SVP_TIE_RTOL = 1e-12

# Gram matrices must be symmetric to within this relative tolerance
GRAM_SYMMETRY_RTOL = 1e-12

# Likelihood scores within this relative distance flag an ambiguous decision
ML_TIE_RTOL = 1e-9

# IDA metrics within this absolute distance flag an ambiguous decision
IDA_TIE_ATOL = 1e-9

# ============================================================================
# Simulation Defaults
# ============================================================================

# Constellation half-width: S = {-s_m, ..., s_m}
DEFAULT_SM = 5

# SNR grid in dB (inclusive of the stop value)
DEFAULT_SNR_DB_START = 20.0
DEFAULT_SNR_DB_STOP = 40.0
DEFAULT_SNR_DB_STEP = 2.5

# Monte Carlo trials per SNR point
DEFAULT_TRIALS = 20000

# Master seed for the per-trial substreams
DEFAULT_SEED = 2012

# Decoder used by sweeps
# Options:
# - "ida"      - inhomogeneous Diophantine approximation (fast decoder)
# - "exact_ml" - exact maximum likelihood over the equation value
# - "joint"    - decode both symbols (baseline)
DEFAULT_DECODER = "ida"

# Share of the SNR range, counted down from the top, used by the diversity fit
# (20-40 dB in 2.5 dB steps -> 35, 37.5 and 40 dB)
FIT_WINDOW = 1.0 / 3.0

# Minimum error events for a point to enter the diversity fit
MIN_FIT_ERRORS = 10

# Trials handed to a worker at a time
CHUNK_SIZE = 500

# ============================================================================
# Output Settings
# ============================================================================

# Suffix of the JSON sidecar written next to every CSV
MANIFEST_SUFFIX = ".manifest.json"

# ============================================================================
# Runtime Settings (overridable from .env)
# ============================================================================

# Worker processes for sweeps (1 = run serially)
WORKERS = int(os.getenv("CFRELAY_WORKERS", "1"))

# Log level for the cfrelay logger
LOG_LEVEL = os.getenv("CFRELAY_LOG_LEVEL", "WARNING")

# Where the walkthrough scripts write their CSV files
RESULTS_DIR = os.getenv("CFRELAY_RESULTS_DIR", "results")

# Show tqdm progress bars during sweeps
SHOW_PROGRESS = os.getenv("CFRELAY_PROGRESS", "true").lower() in ("1", "true", "yes")
