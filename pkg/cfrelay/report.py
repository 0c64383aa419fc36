"""
CSV and manifest files written by the CLI.

Reals are printed with repr(), the shortest text that parses back to the
same float, so every file round-trips exactly. Timestamps live only in the
JSON manifest next to each CSV; the CSV itself is byte-identical across
identical runs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from cfrelay import __version__, config
from cfrelay.errors import OutputError
from cfrelay.simulator import CensusPoint, PointRecord, SimResult, TrialRecord

SWEEP_COLUMNS = ["snr_db", "trials", "errors", "error_rate", "ambiguous_count"]
CENSUS_COLUMNS = ["snr_db", "trials", "ambiguous", "ambiguous_fraction"]
TRIAL_COLUMNS = [
    "point_index", "trial_index", "snr_db", "x1", "x2", "a1", "a2", "rate_bits",
    "lambda_true", "lambda_hat", "x1_hat", "x2_hat", "error", "ambiguous",
    "runner_up_gap", "noise_std",
]


def format_real(value: float) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _optional(value) -> str:
    return "" if value is None else str(value)


@dataclass
class RunManifest:
    command: str
    parameters: dict[str, Any]
    seed: Optional[int]
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    result: dict[str, Any] = field(default_factory=dict)


def manifest_path(csv_path) -> Path:
    path = Path(csv_path)
    return path.with_name(path.name + config.MANIFEST_SUFFIX)


def build_manifest(command: str, parameters: dict[str, Any], seed: Optional[int] = None) -> RunManifest:
    clean = {k: (v.value if hasattr(v, "value") else v) for k, v in parameters.items()}
    return RunManifest(command=command, parameters=clean, seed=seed)


def write_manifest(csv_path, manifest: RunManifest) -> Path:
    path = manifest_path(csv_path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(asdict(manifest), f, indent=2, sort_keys=True, default=str)
            f.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write manifest {path}: {exc}") from exc
    return path


def read_manifest(csv_path) -> Optional[dict[str, Any]]:
    path = manifest_path(csv_path)
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, ValueError) as exc:
        raise OutputError(f"cannot read manifest {path}: {exc}") from exc


def manifest_lines(manifest: RunManifest) -> list[str]:
    """The manifest as sorted key=value lines, nested keys joined with dots."""
    def flatten(prefix: str, value) -> Iterable[tuple[str, Any]]:
        if isinstance(value, dict):
            for k, v in value.items():
                yield from flatten(f"{prefix}.{k}" if prefix else str(k), v)
        else:
            yield prefix, value

    def text(value) -> str:
        if isinstance(value, str):
            return value
        if isinstance(value, float):
            return format_real(value)
        return json.dumps(value, default=str)

    return sorted(f"{key}={text(value)}" for key, value in flatten("", asdict(manifest)))


def write_manifest_text(stream, manifest: RunManifest):
    """Manifest for CSV sent to a stream: key=value lines, one per field."""
    for line in manifest_lines(manifest):
        stream.write(line + "\n")


def write_rows(target, header: Sequence[str], rows: Iterable[Sequence[str]]):
    """Write CSV to a path or an open text stream."""
    def emit(stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    if hasattr(target, "write"):
        emit(target)
        return
    try:
        with open(target, "w", encoding="utf-8", newline="") as f:
            emit(f)
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc}") from exc


def _read_rows(path) -> list[dict[str, str]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc


def write_sweep_csv(path, result: SimResult):
    rows = (
        [format_real(p.snr_db), str(p.trials), str(p.errors), format_real(p.error_rate), str(p.ambiguous_count)]
        for p in result.points
    )
    write_rows(path, SWEEP_COLUMNS, rows)


def read_sweep_csv(path) -> SimResult:
    points = tuple(
        PointRecord(
            snr_db=float(row["snr_db"]),
            trials=int(row["trials"]),
            errors=int(row["errors"]),
            ambiguous_count=int(row["ambiguous_count"]),
        )
        for row in _read_rows(path)
    )
    summary = (read_manifest(path) or {}).get("result", {})
    return SimResult(
        points=points,
        fitted_diversity=summary.get("fitted_diversity"),
        seed=summary.get("seed"),
    )


def write_census_csv(path, census: Sequence[CensusPoint]):
    rows = (
        [format_real(c.snr_db), str(c.trials), str(c.ambiguous), format_real(c.fraction)]
        for c in census
    )
    write_rows(path, CENSUS_COLUMNS, rows)


def write_trials_csv(path, records: Iterable[TrialRecord]):
    def row(r: TrialRecord):
        x1_hat, x2_hat = r.x_hat if r.x_hat is not None else (None, None)
        return [
            str(r.point_index), str(r.trial_index), format_real(r.snr_db), str(r.x1), str(r.x2),
            str(r.a[0]), str(r.a[1]), format_real(r.rate_bits), str(r.lambda_true),
            _optional(r.lambda_hat), _optional(x1_hat), _optional(x2_hat),
            str(int(r.error)), str(int(r.ambiguous)), format_real(r.runner_up_gap),
            format_real(r.noise_std),
        ]

    write_rows(path, TRIAL_COLUMNS, (row(r) for r in records))


def read_trials_csv(path) -> list[TrialRecord]:
    def maybe_int(text: str) -> Optional[int]:
        return None if text == "" else int(text)

    records = []
    for row in _read_rows(path):
        x1_hat, x2_hat = maybe_int(row["x1_hat"]), maybe_int(row["x2_hat"])
        records.append(TrialRecord(
            point_index=int(row["point_index"]),
            trial_index=int(row["trial_index"]),
            snr_db=float(row["snr_db"]),
            x1=int(row["x1"]),
            x2=int(row["x2"]),
            a=(int(row["a1"]), int(row["a2"])),
            rate_bits=float(row["rate_bits"]),
            lambda_true=int(row["lambda_true"]),
            lambda_hat=maybe_int(row["lambda_hat"]),
            x_hat=None if x1_hat is None else (x1_hat, x2_hat),
            error=row["error"] == "1",
            ambiguous=row["ambiguous"] == "1",
            runner_up_gap=float(row["runner_up_gap"]),
            noise_std=float(row["noise_std"]),
        ))
    return records
