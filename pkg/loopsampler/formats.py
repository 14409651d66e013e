"""Exchange formats: schema-validated JSON records and plot-ready CSV tables.

JSON records (matrices, schedules, Gram matrices, experiment configs) are
validated against the Draft 7 schemas in `schemas/` before conversion.
CSV tables use dash-separated occupations, e.g. `1-0-2-0-0-0`. Every
writer goes through a temporary file and an atomic rename.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np
from jsonschema import Draft7Validator

from . import config
from .compiler import LoopConfig, PulseSchedule, Rail, RailModeIndex
from .errors import FormatError
from .linalg import ModeConfiguration, UnitaryMatrix
from .log import get_logger
from .sampling import Distribution, EventLog, as_gram, gram_from_separations
from .validators.base import CounterTrajectory

logger = get_logger(__name__)

SCHEMA_FILES = {
    "matrix": "matrix.schema.json",
    "schedule": "schedule.schema.json",
    "gram": "gram.schema.json",
    "experiment": "experiment.schema.json",
}


class SchemaLoadError(FormatError):
    pass


def format_configuration(configuration: Sequence[int]) -> str:
    return "-".join(str(int(k)) for k in configuration)


def parse_configuration(text: str) -> ModeConfiguration:
    try:
        values = tuple(int(part) for part in text.strip().split("-"))
    except ValueError:
        raise FormatError(f"bad configuration field {text!r}") from None
    if any(v < 0 for v in values):
        raise FormatError(f"negative occupation in {text!r}")
    return values


def atomic_write_text(path: Path | str, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s", path)
    return path


def read_json(path: Path | str) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON in {path}: {e}") from e


def write_json(path: Path | str, record: Dict[str, Any]) -> Path:
    return atomic_write_text(path, json.dumps(record, indent=2, sort_keys=True) + "\n")


class RecordCodec:
    _validators: Dict[str, Draft7Validator] = {}

    def __init__(self, schema_dir: Path | str = config.SCHEMA_DIR):
        self.schema_dir = Path(schema_dir)

    def _load_schema(self, kind: str) -> Dict[str, Any]:
        if kind not in SCHEMA_FILES:
            raise SchemaLoadError(f"no schema registered for {kind!r}")
        path = self.schema_dir / SCHEMA_FILES[kind]
        if not path.exists():
            raise SchemaLoadError(f"schema not found at {path}")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise SchemaLoadError(f"invalid JSON in schema file {path}: {e}") from e

    def _validator(self, kind: str) -> Draft7Validator:
        key = f"{self.schema_dir}:{kind}"
        if key not in RecordCodec._validators:
            RecordCodec._validators[key] = Draft7Validator(self._load_schema(kind))
        return RecordCodec._validators[key]

    # ---------------- Validation -----------------
    def validate_record(self, kind: str, record: Any) -> Tuple[bool, List[Dict[str, Any]]]:
        """Validate a record against the `kind` schema.

        Returns (is_valid, errors). Each error is a dict: {path, message, validator, value}.
        """
        errors: List[Dict[str, Any]] = []
        for err in sorted(self._validator(kind).iter_errors(record), key=lambda e: [str(p) for p in e.path]):
            errors.append({
                "path": list(err.absolute_path),
                "message": err.message,
                "validator": err.validator,
                "value": err.instance,
            })
        return (len(errors) == 0, errors)

    def require_valid(self, kind: str, record: Any, source: str = "record") -> None:
        ok, errors = self.validate_record(kind, record)
        if not ok:
            raise FormatError(f"{source} is not a valid {kind} file", errors)

    # ---------------- Matrices -----------------
    def matrix_to_record(self, matrix, **extra: Any) -> Dict[str, Any]:
        arr = np.asarray(matrix)
        record: Dict[str, Any] = {
            "dim": int(arr.shape[0]),
            "re": arr.real.ravel().tolist(),
            "im": arr.imag.ravel().tolist(),
        }
        record.update(extra)
        return record

    def record_to_matrix(self, record: Dict[str, Any], source: str = "record") -> np.ndarray:
        self.require_valid("matrix", record, source)
        dim = record["dim"]
        if len(record["re"]) != dim * dim or len(record["im"]) != dim * dim:
            raise FormatError(f"{source}: expected {dim * dim} entries in re and im")
        return (np.array(record["re"], dtype=float) + 1j * np.array(record["im"], dtype=float)).reshape(dim, dim)

    def record_to_unitary(self, record: Dict[str, Any], source: str = "record") -> UnitaryMatrix:
        return UnitaryMatrix(self.record_to_matrix(record, source))

    # ---------------- Schedules -----------------
    def schedule_to_record(
        self, loop_config: LoopConfig, schedule: PulseSchedule, mode_subset: Sequence[RailModeIndex]
    ) -> Dict[str, Any]:
        return {
            "slots": loop_config.slots,
            "loops": loop_config.loops,
            "bin_ns": loop_config.bin_ns,
            "angles": schedule.angles.tolist(),
            "phases": schedule.phases.tolist(),
            "injection": [{"slot": p.slot, "rail": p.rail.name} for p in loop_config.injection],
            "mode_subset": [{"slot": p.slot, "rail": p.rail.name} for p in mode_subset],
        }

    def record_to_schedule(
        self, record: Dict[str, Any], source: str = "record"
    ) -> Tuple[LoopConfig, PulseSchedule, Tuple[RailModeIndex, ...]]:
        self.require_valid("schedule", record, source)
        loop_config = LoopConfig(
            slots=record["slots"],
            loops=record["loops"],
            bin_ns=record.get("bin_ns", config.DEFAULT_BIN_NS),
            injection=tuple(_rail_mode(p) for p in record.get("injection", [])),
        )
        schedule = PulseSchedule(record["angles"], record.get("phases"))
        schedule.check_against(loop_config)
        subset = tuple(_rail_mode(p) for p in record["mode_subset"])
        return loop_config, schedule, subset

    # ---------------- Gram matrices -----------------
    def record_to_gram(self, record: Dict[str, Any], n: int, source: str = "record") -> np.ndarray:
        self.require_valid("gram", record, source)
        if "slots" in record:
            overlaps = record.get("overlaps")
            table = {int(k): float(v) for k, v in overlaps.items()} if overlaps else None
            gram = gram_from_separations(record["slots"], table)
        else:
            dim = record["dim"]
            im = record.get("im", [0.0] * (dim * dim))
            if len(record["re"]) != dim * dim or len(im) != dim * dim:
                raise FormatError(f"{source}: expected {dim * dim} Gram entries")
            gram = (np.array(record["re"], dtype=float) + 1j * np.array(im, dtype=float)).reshape(dim, dim)
        return as_gram(gram, n)


def _rail_mode(entry: Dict[str, Any]) -> RailModeIndex:
    return RailModeIndex(int(entry["slot"]), Rail.parse(entry["rail"]))


# ---------------- CSV tables -----------------
def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _read_rows(path: Path | str, header: Sequence[str]) -> List[List[str]]:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"file not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != list(header):
        raise FormatError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def write_distribution_csv(path: Path | str, distribution: Distribution) -> Path:
    rows = (
        (format_configuration(c), repr(float(p)))
        for c, p in zip(distribution.configurations, distribution.probabilities)
    )
    return atomic_write_text(path, _csv_text(("config", "probability"), rows))


def read_distribution_csv(path: Path | str, model: str = "file") -> Distribution:
    rows = _read_rows(path, ("config", "probability"))
    try:
        configurations = tuple(parse_configuration(r[0]) for r in rows)
        probabilities = [float(r[1]) for r in rows]
    except (IndexError, ValueError) as e:
        raise FormatError(f"{path}: malformed distribution row ({e})") from e
    return Distribution(configurations, probabilities, model)


def write_events_csv(path: Path | str, events: EventLog) -> Path:
    rows = ((i, format_configuration(e)) for i, e in enumerate(events.events))
    return atomic_write_text(path, _csv_text(("index", "config"), rows))


def read_events_csv(path: Path | str) -> EventLog:
    rows = _read_rows(path, ("index", "config"))
    try:
        ordered = sorted(((int(r[0]), parse_configuration(r[1])) for r in rows), key=lambda row: row[0])
    except (IndexError, ValueError) as e:
        raise FormatError(f"{path}: malformed event row ({e})") from e
    return EventLog(tuple(event for _, event in ordered))


def write_trajectory_csv(path: Path | str, trajectory: CounterTrajectory) -> Path:
    if trajectory.test == "bayes":
        values = (repr(float(v)) for v in trajectory.values)
    else:
        values = (str(int(v)) for v in trajectory.values)
    rows = ((i, v) for i, v in enumerate(values))
    return atomic_write_text(path, _csv_text(("event_index", "statistic"), rows))


def read_trajectory_csv(path: Path | str, test: str) -> CounterTrajectory:
    rows = _read_rows(path, ("event_index", "statistic"))
    try:
        values = [float(r[1]) for r in sorted(rows, key=lambda r: int(r[0]))]
    except (IndexError, ValueError) as e:
        raise FormatError(f"{path}: malformed trajectory row ({e})") from e
    return CounterTrajectory(np.array(values), test)


def write_table_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return atomic_write_text(path, _csv_text(header, rows))


# Convenience singleton accessor
_codec_instance: RecordCodec | None = None


def get_codec() -> RecordCodec:
    global _codec_instance
    if _codec_instance is None:
        _codec_instance = RecordCodec()
    return _codec_instance


__all__ = [
    "RecordCodec",
    "SchemaLoadError",
    "get_codec",
    "format_configuration",
    "parse_configuration",
    "atomic_write_text",
    "read_json",
    "write_json",
    "write_distribution_csv",
    "read_distribution_csv",
    "write_events_csv",
    "read_events_csv",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_table_csv",
]
