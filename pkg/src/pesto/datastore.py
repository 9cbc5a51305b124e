"""CSV persistence for candidate records.

One RFC-4180 file is both the crawler's output and the server's input,
which keeps the whole pipeline usable offline. Column order is fixed;
missing optional metrics serialize as empty fields; real numbers carry
at most six fractional digits (never exponent notation).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CsvParseError, SchemaMismatchError
from .metrics import CandidateRecord
from .timeutil import format_rfc3339, parse_rfc3339

SCHEMA_VERSION = "v1"

COLUMNS: tuple[str, ...] = (
    "full_name",
    "crawled_at",
    "star_count",
    "watcher_count",
    "age_days",
    "avg_issue_active_time_days",
    "avg_issue_close_time_days",
    "avg_issue_comments",
    "issue_raiser_count",
    "org_issue_raiser_count",
    "pull_request_count",
    "contributor_count",
    "open_issue_count",
    "dependency_count",
    "download_total",
    "issue_sample_size",
)

_INT_COLUMNS = frozenset(
    {
        "star_count",
        "watcher_count",
        "issue_raiser_count",
        "org_issue_raiser_count",
        "pull_request_count",
        "contributor_count",
        "open_issue_count",
        "download_total",
        "issue_sample_size",
    }
)
_REAL_COLUMNS = frozenset(
    {
        "age_days",
        "avg_issue_active_time_days",
        "avg_issue_close_time_days",
        "avg_issue_comments",
    }
)
_OPTIONAL_COLUMNS = frozenset(
    {
        "avg_issue_active_time_days",
        "avg_issue_close_time_days",
        "avg_issue_comments",
        "dependency_count",
    }
)


@dataclass(frozen=True)
class Dataset:
    """Ordered candidate records with unique full names."""

    records: tuple[CandidateRecord, ...] = ()
    schema_version: str = SCHEMA_VERSION
    source_path: Path | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for record in self.records:
            if record.full_name in seen:
                raise ValueError(f"duplicate candidate: {record.full_name}")
            seen.add(record.full_name)

    def __len__(self) -> int:
        return len(self.records)

    def full_names(self) -> list[str]:
        return [record.full_name for record in self.records]


def format_real(value: float) -> str:
    """Format a real with up to six fractional digits, no exponent."""
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    if text in ("", "-"):
        return "0"
    return text


def _serialize_cell(column: str, value: object) -> str:
    if value is None:
        return ""
    if column == "crawled_at":
        return format_rfc3339(value)  # type: ignore[arg-type]
    if column in _REAL_COLUMNS:
        return format_real(float(value))  # type: ignore[arg-type]
    return str(value)


def record_to_row(record: CandidateRecord) -> list[str]:
    return [_serialize_cell(col, getattr(record, col)) for col in COLUMNS]


def record_to_dict(record: CandidateRecord) -> dict:
    """JSON-ready mapping in canonical column order (API mirror of a row)."""
    out: dict[str, object] = {}
    for column in COLUMNS:
        value = getattr(record, column)
        if column == "crawled_at":
            value = format_rfc3339(value)
        out[column] = value
    return out


def write_csv(dataset: Dataset, path: Path | str) -> None:
    """Write the dataset with the canonical header (UTF-8, RFC-4180)."""
    target = Path(path)
    with target.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(COLUMNS)
        for record in dataset.records:
            writer.writerow(record_to_row(record))


def _parse_cell(column: str, text: str, row_number: int) -> object:
    if text == "":
        if column in _OPTIONAL_COLUMNS:
            return None
        raise CsvParseError(
            f"row {row_number}, column {column}: value must not be empty"
        )
    try:
        if column == "full_name":
            return text
        if column == "crawled_at":
            return parse_rfc3339(text)
        if column in _INT_COLUMNS or column == "dependency_count":
            return int(text)
        return float(text)
    except ValueError as exc:
        raise CsvParseError(
            f"row {row_number}, column {column}: {exc}"
        ) from exc


def read_csv(path: Path | str) -> Dataset:
    """Load a dataset back; inverse of :func:`write_csv`."""
    source = Path(path)
    with source.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError("file is empty, expected a header row")
        _check_header(header)
        index = {name: header.index(name) for name in COLUMNS}
        records: list[CandidateRecord] = []
        seen: set[str] = set()
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvParseError(
                    f"row {row_number}: expected {len(header)} fields, got {len(row)}"
                )
            values = {
                column: _parse_cell(column, row[index[column]], row_number)
                for column in COLUMNS
            }
            if values["full_name"] in seen:
                raise CsvParseError(
                    f"row {row_number}: duplicate candidate {values['full_name']}"
                )
            seen.add(values["full_name"])  # type: ignore[arg-type]
            records.append(CandidateRecord(**values))  # type: ignore[arg-type]
    return Dataset(records=tuple(records), source_path=source)


def _check_header(header: Sequence[str]) -> None:
    expected = set(COLUMNS)
    got = set(header)
    unknown = sorted(got - expected)
    missing = sorted(expected - got)
    if unknown or missing:
        parts = []
        if unknown:
            parts.append(f"unknown columns: {', '.join(unknown)}")
        if missing:
            parts.append(f"missing columns: {', '.join(missing)}")
        raise SchemaMismatchError("; ".join(parts))
    if len(header) != len(COLUMNS):
        raise SchemaMismatchError("duplicate columns in header")


def merge(dataset: Dataset, new_records: Iterable[CandidateRecord]) -> Dataset:
    """Replace rows by full name, keeping first-seen order for the rest."""
    order = list(dataset.records)
    position = {record.full_name: i for i, record in enumerate(order)}
    for record in new_records:
        if record.full_name in position:
            order[position[record.full_name]] = record
        else:
            position[record.full_name] = len(order)
            order.append(record)
    return Dataset(
        records=tuple(order),
        schema_version=dataset.schema_version,
        source_path=dataset.source_path,
    )
