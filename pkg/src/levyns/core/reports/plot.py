"""Long-format plot data from report CSVs."""
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Callable, Iterable, Sequence, Union

from levyns.core.errors import ReportSchemaError
from levyns.core.reports.schemas import ReportKind
from levyns.core.reports.writers import ReportTable, read_report, write_rows

logger = logging.getLogger(__name__)

PlotRow = dict


def _number(table: ReportTable, index: int, column: str) -> float:
    text = table.rows[index][column]
    if text == "":
        return math.nan
    try:
        return float(text)
    except ValueError:
        raise ReportSchemaError(
            str(table.path), table.lines[index], f"column {column}: not a number: {text!r}"
        ) from None


def _series(table: ReportTable, mapping: Sequence[tuple[str, str, str, str]]) -> list[PlotRow]:
    """(series, x column, y column, yerr column or '') for every row."""
    out = []
    for name, x, y, err in mapping:
        for i in range(len(table.rows)):
            out.append(
                {
                    "series": name,
                    "x": _number(table, i, x),
                    "y": _number(table, i, y),
                    "yerr": _number(table, i, err) if err else 0.0,
                }
            )
    return out


def _trajectory(table: ReportTable) -> list[PlotRow]:
    return _series(
        table,
        [("l2_norm", "t", "l2_norm", ""), ("h1_norm", "t", "h1_norm", ""), ("f_theta", "t", "f_theta", "")],
    )


def _moments(table: ReportTable) -> list[PlotRow]:
    return _series(
        table,
        [("sup_term", "t", "sup_term", "sup_se"), ("integral_term", "t", "integral_term", "integral_se")],
    )


def _gradient_moments(table: ReportTable) -> list[PlotRow]:
    return _series(
        table,
        [("gradient_term", "t", "gradient_term", "gradient_se"), ("gradient_bound", "t", "bound", "")],
    )


def _charfun(table: ReportTable) -> list[PlotRow]:
    """Per (mode, dt, xi): real and imaginary parts against the increment length t - s."""
    out = []
    for i, row in enumerate(table.rows):
        gap = _number(table, i, "t") - _number(table, i, "s")
        tag = f"mode={row['mode']},dt={row['dt']},xi={row['xi']}"
        se = _number(table, i, "std_error")
        for part in ("re", "im"):
            out.append({"series": f"empirical_{part}[{tag}]", "x": gap,
                        "y": _number(table, i, f"empirical_{part}"), "yerr": se})
            out.append({"series": f"theoretical_{part}[{tag}]", "x": gap,
                        "y": _number(table, i, f"theoretical_{part}"), "yerr": 0.0})
    return out


def _measure(table: ReportTable) -> list[PlotRow]:
    """Bin midpoints against mass; underflow and overflow bins are left out."""
    out = []
    for i, row in enumerate(table.rows):
        lo, hi = _number(table, i, "bin_lo"), _number(table, i, "bin_hi")
        if math.isinf(lo) or math.isinf(hi):
            continue
        out.append({"series": f"{row['observable']}[{row['window']}]", "x": 0.5 * (lo + hi),
                    "y": _number(table, i, "mass"), "yerr": 0.0})
    return out


PLOTTERS: dict[ReportKind, Callable[[ReportTable], list[PlotRow]]] = {
    ReportKind.TRAJECTORY: _trajectory,
    ReportKind.MOMENTS: _moments,
    ReportKind.GRADIENT_MOMENTS: _gradient_moments,
    ReportKind.CHARFUN: _charfun,
    ReportKind.MEASURE: _measure,
}


def plot_rows(paths: Iterable[Union[str, Path]]) -> list[PlotRow]:
    rows: list[PlotRow] = []
    for path in paths:
        table = read_report(path)
        plotter = PLOTTERS.get(table.kind)
        if plotter is None:
            logger.warning(f"{path}: {table.kind.value} reports have no plot mapping, skipped")
            continue
        rows.extend(plotter(table))
    return rows


def emit_plot_data(paths: Sequence[Union[str, Path]], out: Union[str, Path]) -> Path:
    """Normalise report files into one ``series,x,y,yerr`` CSV, in input order."""
    return write_rows(out, ReportKind.PLOT, plot_rows(paths))
