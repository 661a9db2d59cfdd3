"""CSV writers for every report kind.

Floats are written with 17 significant digits, so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from levyns.core.constants import FLOAT_FORMAT
from levyns.core.errors import ReportSchemaError
from levyns.core.reports.schemas import HASH_COLUMN, ReportKind, ReportSchema, match_header, schema_for

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return FLOAT_FORMAT.format(value)
    if hasattr(value, "dtype"):
        return format_value(value.item())
    return str(value)


def write_rows(
    path: Union[str, Path],
    kind: ReportKind,
    rows: Iterable[dict],
    config_hash: str = "",
) -> Path:
    """Write ``rows`` under the schema of ``kind``; missing keys become empty cells."""
    schema = schema_for(kind)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(schema.header)
        for row in rows:
            unknown = set(row) - set(schema.columns)
            if unknown:
                raise ValueError(f"Columns {sorted(unknown)} not in the {kind.value} schema")
            cells = [format_value(row.get(column)) for column in schema.columns]
            if schema.hashed:
                cells.append(config_hash)
            writer.writerow(cells)
            count += 1
    logger.info(f"Wrote {count} {kind.value} rows to {path}")
    return path


@dataclass(frozen=True)
class ReportTable:
    """A report read back: its schema and raw string rows with their file line numbers."""
    path: Path
    schema: ReportSchema
    rows: tuple[dict[str, str], ...]
    lines: tuple[int, ...]

    @property
    def kind(self) -> ReportKind:
        return self.schema.kind

    @property
    def config_hash(self) -> str:
        hashes = {row.get(HASH_COLUMN, "") for row in self.rows}
        return hashes.pop() if len(hashes) == 1 else ""


def read_report(path: Union[str, Path]) -> ReportTable:
    """Read a report CSV; a header or row that fits no schema raises ReportSchemaError."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ReportSchemaError(str(path), 1, "empty file, expected a header row") from None
        schema = match_header(header)
        if schema is None:
            raise ReportSchemaError(str(path), 1, f"unknown header {','.join(header)}")
        rows, lines = [], []
        for cells in reader:
            line = reader.line_num
            if not cells:
                continue
            if len(cells) != len(schema.header):
                raise ReportSchemaError(
                    str(path), line, f"expected {len(schema.header)} fields, got {len(cells)}"
                )
            rows.append(dict(zip(schema.header, cells)))
            lines.append(line)
    return ReportTable(path, schema, tuple(rows), tuple(lines))


def ensemble_rows(ensemble) -> list[dict]:
    rows = []
    for summary in ensemble.summaries:
        for k, t in enumerate(summary.horizons):
            rows.append(
                {
                    "trajectory": summary.trajectory,
                    "t": t,
                    "sup_theta": summary.sup_theta[k],
                    "weighted_integral": summary.weighted_integral[k],
                    "gradient_integral": summary.gradient_integral[k],
                    "big_jump_count": summary.big_jump_count,
                    "flagged": summary.flagged,
                }
            )
    return rows


def charfun_rows(report) -> list[dict]:
    """Rows of a CF report and, when present, of its dt/2 repeat."""
    rows = []
    current = report
    while current is not None:
        for p in current.points:
            rows.append(
                {
                    "mode": current.mode,
                    "dt": current.dt,
                    "s": p.s,
                    "t": p.t,
                    "xi": p.point.xi,
                    "empirical_re": p.point.empirical.real,
                    "empirical_im": p.point.empirical.imag,
                    "theoretical_re": p.point.theoretical.real,
                    "theoretical_im": p.point.theoretical.imag,
                    "std_error": p.point.std_error,
                    "z": p.point.z,
                }
            )
        current = current.halved
    return rows


def independence_rows(reports: Sequence) -> list[dict]:
    rows = []
    for report in reports:
        j, k = report.modes
        for p in report.points:
            rows.append(
                {
                    "j": j,
                    "k": k,
                    "s": report.s,
                    "t": report.t,
                    "xi": p.xi,
                    "eta": p.eta,
                    "joint_re": p.joint.real,
                    "joint_im": p.joint.imag,
                    "product_re": p.product.real,
                    "product_im": p.product.imag,
                    "std_error": p.std_error,
                    "z": p.z,
                }
            )
    return rows


def stationarity_rows(reports: Sequence) -> list[dict]:
    return [row for report in reports for row in report.rows()]
