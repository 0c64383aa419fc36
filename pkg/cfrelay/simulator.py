"""
Monte Carlo harness for the two-source relay.

Each trial draws h ~ N(0, I), x uniform on S x S and z ~ N(0, sigma^2) with
sigma^2 = 1 / SNR (see ChannelState.at_snr), lets the relay choose its
coefficients and decode, and records whether the decision was wrong. Trial t of SNR point p always uses
the random substream SeedSequence(seed, spawn_key=(p, t)), so outcomes do not
depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np
from tqdm import tqdm

from cfrelay import config
from cfrelay.decoder import DecoderSetup, decode_ida, decode_joint, decode_ml
from cfrelay.diophantine import Constellation, extended_gcd
from cfrelay.errors import InvalidInputError
from cfrelay.lattice_core import ChannelState, best_coefficients

logger = logging.getLogger(__name__)


class DecoderKind(str, Enum):
    EXACT_ML = "exact_ml"
    IDA = "ida"
    JOINT = "joint"


@dataclass(frozen=True)
class SimConfig:
    s_m: int
    snr_db_points: tuple[float, ...]
    trials_per_point: int
    seed: int
    decoder_kind: DecoderKind = DecoderKind.IDA
    max_error_events: Optional[int] = None
    near_tie_sigmas: Optional[float] = None
    workers: int = 1

    def __post_init__(self):
        points = tuple(float(p) for p in self.snr_db_points)
        object.__setattr__(self, "snr_db_points", points)
        try:
            object.__setattr__(self, "decoder_kind", DecoderKind(self.decoder_kind))
        except ValueError as exc:
            raise InvalidInputError(f"unknown decoder {self.decoder_kind!r}") from exc

        Constellation(self.s_m)
        if any(not math.isfinite(p) for p in points):
            raise InvalidInputError("SNR points must be finite")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise InvalidInputError(f"SNR points must be strictly increasing: {points}")
        if self.trials_per_point < 1:
            raise InvalidInputError(f"trials per point must be at least 1, got {self.trials_per_point}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.max_error_events is not None and self.max_error_events < 1:
            raise InvalidInputError("max_error_events must be positive when set")
        if self.near_tie_sigmas is not None and self.near_tie_sigmas < 0:
            raise InvalidInputError("near_tie_sigmas must be non-negative")
        if self.workers < 1:
            raise InvalidInputError(f"workers must be at least 1, got {self.workers}")


@dataclass(frozen=True)
class TrialRecord:
    point_index: int
    trial_index: int
    snr_db: float
    x1: int
    x2: int
    a: tuple[int, int]
    rate_bits: float
    lambda_true: int
    lambda_hat: Optional[int]
    x_hat: Optional[tuple[int, int]]
    error: bool
    ambiguous: bool
    runner_up_gap: float
    noise_std: float


@dataclass(frozen=True)
class PointRecord:
    snr_db: float
    trials: int
    errors: int
    ambiguous_count: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials if self.trials else 0.0


@dataclass(frozen=True)
class SimResult:
    points: tuple[PointRecord, ...]
    fitted_diversity: Optional[float]
    seed: int
    trials: tuple[TrialRecord, ...] = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class CensusPoint:
    snr_db: float
    trials: int
    ambiguous: int

    @property
    def fraction(self) -> float:
        return self.ambiguous / self.trials if self.trials else 0.0


def snr_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive SNR grid in dB without float drift in the point count."""
    if not step > 0:
        raise InvalidInputError(f"SNR step must be positive, got {step}")
    if stop < start:
        raise InvalidInputError(f"SNR stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def trial_rng(seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point_index, trial_index)))


def near_tie(kind: DecoderKind, gap: float, noise_std: float, sigmas: Optional[float]) -> bool:
    """Whether a decision had a competitor within `sigmas` noise deviations."""
    if sigmas is None or kind is DecoderKind.JOINT:
        return False
    if kind is DecoderKind.IDA:
        return gap < sigmas * noise_std
    # log-likelihood ratio of two Gaussian terms `sigmas` deviations apart, seen from the midpoint
    return gap < sigmas ** 2 / 2.0


def run_trial(
    rng: np.random.Generator,
    s_m: int,
    snr_linear: float,
    decoder_kind,
    *,
    snr_db: Optional[float] = None,
    point_index: int = 0,
    trial_index: int = 0,
    near_tie_sigmas: Optional[float] = None,
) -> TrialRecord:
    """One channel use: sample, choose coefficients, decode, score."""
    if not snr_linear > 0:
        raise InvalidInputError(f"snr must be positive, got {snr_linear}")
    kind = DecoderKind(decoder_kind)
    cons = Constellation(s_m)

    h = rng.standard_normal(2)
    ch = ChannelState.at_snr(h, snr_linear)
    noise_std = math.sqrt(ch.noise_variance)
    x1, x2 = (int(v) for v in rng.integers(-s_m, s_m + 1, size=2))
    z = rng.normal(0.0, noise_std)
    y = float(h[0] * x1 + h[1] * x2 + z)

    choice = best_coefficients(ch)
    a1, a2 = choice.a
    setup = DecoderSetup.create(ch, extended_gcd(a1, a2), cons)
    lambda_true = a1 * x1 + a2 * x2

    lambda_hat, x_hat = None, None
    ambiguous, gap = False, math.inf
    if kind is DecoderKind.JOINT:
        x_hat = decode_joint(setup, y)
        error = x_hat != (x1, x2)
    else:
        result = decode_ml(setup, y) if kind is DecoderKind.EXACT_ML else decode_ida(setup, y)
        lambda_hat = result.lambda_hat
        error = lambda_hat != lambda_true
        gap = result.runner_up_gap
        ambiguous = result.ambiguous or near_tie(kind, gap, noise_std, near_tie_sigmas)

    return TrialRecord(
        point_index=point_index,
        trial_index=trial_index,
        snr_db=10.0 * math.log10(snr_linear) if snr_db is None else snr_db,
        x1=x1,
        x2=x2,
        a=(a1, a2),
        rate_bits=choice.rate_bits,
        lambda_true=lambda_true,
        lambda_hat=lambda_hat,
        x_hat=x_hat,
        error=bool(error),
        ambiguous=bool(ambiguous),
        runner_up_gap=gap,
        noise_std=noise_std,
    )


def _run_chunk(cfg: SimConfig, point_index: int, start: int, stop: int) -> list[TrialRecord]:
    snr_db = cfg.snr_db_points[point_index]
    snr_linear = 10.0 ** (snr_db / 10.0)
    return [
        run_trial(
            trial_rng(cfg.seed, point_index, t),
            cfg.s_m,
            snr_linear,
            cfg.decoder_kind,
            snr_db=snr_db,
            point_index=point_index,
            trial_index=t,
            near_tie_sigmas=cfg.near_tie_sigmas,
        )
        for t in range(start, stop)
    ]


def _truncate_at_cap(records: list[TrialRecord], cap: Optional[int]) -> tuple[list[TrialRecord], bool]:
    """Cut the ordered records right after the cap-th error."""
    if cap is None:
        return records, False
    errors = 0
    for i, rec in enumerate(records):
        errors += rec.error
        if errors >= cap:
            return records[: i + 1], True
    return records, False


def _run_point(cfg: SimConfig, point_index: int, pool, progress) -> list[TrialRecord]:
    chunk = config.CHUNK_SIZE
    bounds = [(s, min(s + chunk, cfg.trials_per_point)) for s in range(0, cfg.trials_per_point, chunk)]
    wave = max(cfg.workers, 1)
    records: list[TrialRecord] = []

    for w in range(0, len(bounds), wave):
        batch = bounds[w:w + wave]
        if pool is None:
            parts = [_run_chunk(cfg, point_index, s, e) for s, e in batch]
        else:
            futures = [pool.submit(_run_chunk, cfg, point_index, s, e) for s, e in batch]
            parts = [f.result() for f in futures]
        for part in parts:
            records.extend(part)
            if progress is not None:
                progress.update(len(part))

        records, capped = _truncate_at_cap(records, cfg.max_error_events)
        if capped:
            logger.info(
                "point %.2f dB stopped after %d trials (error cap %d)",
                cfg.snr_db_points[point_index], len(records), cfg.max_error_events,
            )
            break
    return records


def summarize_point(snr_db: float, records: Sequence[TrialRecord]) -> PointRecord:
    return PointRecord(
        snr_db=snr_db,
        trials=len(records),
        errors=sum(r.error for r in records),
        ambiguous_count=sum(r.ambiguous for r in records),
    )


def fit_diversity(points: Sequence[PointRecord]) -> Optional[float]:
    """
    Negated slope of log10(error rate) against log10(SNR) over the top
    FIT_WINDOW fraction of the SNR range, using points with at least
    MIN_FIT_ERRORS errors. None when fewer than two points qualify.
    """
    if not points:
        return None
    low, high = points[0].snr_db, points[-1].snr_db
    start = high - config.FIT_WINDOW * (high - low) - 1e-9
    usable = [p for p in points if p.snr_db >= start and p.errors >= config.MIN_FIT_ERRORS]
    if len(usable) < 2:
        return None
    x = np.array([p.snr_db / 10.0 for p in usable])
    y = np.log10([p.error_rate for p in usable])
    slope, _ = np.polyfit(x, y, 1)
    return float(-slope)


def run_sweep(cfg: SimConfig, *, keep_trials: bool = False, progress: bool = False) -> SimResult:
    """Run every SNR point and fit the diversity order."""
    total = cfg.trials_per_point * len(cfg.snr_db_points)
    bar = tqdm(total=total, desc=f"s_m={cfg.s_m} {cfg.decoder_kind.value}", unit="trial") if progress else None
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None

    points, kept = [], []
    try:
        for index, snr_db in enumerate(cfg.snr_db_points):
            records = _run_point(cfg, index, pool, bar)
            point = summarize_point(snr_db, records)
            logger.info(
                "%.2f dB: %d/%d errors, %d ambiguous",
                snr_db, point.errors, point.trials, point.ambiguous_count,
            )
            points.append(point)
            if keep_trials:
                kept.extend(records)
    finally:
        if pool is not None:
            pool.shutdown()
        if bar is not None:
            bar.close()

    diversity = fit_diversity(points)
    if diversity is None:
        logger.warning("diversity fit skipped: fewer than 2 high-SNR points with %d+ errors", config.MIN_FIT_ERRORS)
    return SimResult(points=tuple(points), fitted_diversity=diversity, seed=cfg.seed, trials=tuple(kept))


def census_from_records(records: Iterable[TrialRecord]) -> list[CensusPoint]:
    """Per-SNR ambiguous-trial counts from trial records, in SNR order."""
    grouped: dict[int, list[TrialRecord]] = {}
    for rec in records:
        grouped.setdefault(rec.point_index, []).append(rec)
    return [
        CensusPoint(
            snr_db=group[0].snr_db,
            trials=len(group),
            ambiguous=sum(r.ambiguous for r in group),
        )
        for _, group in sorted(grouped.items())
    ]


def ambiguity_census(cfg: SimConfig, *, progress: bool = False) -> list[CensusPoint]:
    """Fraction of trials whose decision was ambiguous, per SNR point."""
    if cfg.decoder_kind is DecoderKind.JOINT:
        raise InvalidInputError("the ambiguity census needs the exact_ml or ida decoder")
    result = run_sweep(cfg, progress=progress)
    return [CensusPoint(p.snr_db, p.trials, p.ambiguous_count) for p in result.points]
