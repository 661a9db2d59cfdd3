# Reports module for levy-ns
from levyns.core.reports.manifest import MANIFEST_NAME, RunManifest, read_manifest, write_manifest
from levyns.core.reports.plot import emit_plot_data, plot_rows
from levyns.core.reports.schemas import HASH_COLUMN, ReportKind, ReportSchema, match_header, schema_for
from levyns.core.reports.writers import (
    ReportTable,
    charfun_rows,
    ensemble_rows,
    format_value,
    independence_rows,
    read_report,
    stationarity_rows,
    write_rows,
)

__all__ = [
    # Schemas
    "HASH_COLUMN",
    "ReportKind",
    "ReportSchema",
    "match_header",
    "schema_for",
    # CSV
    "ReportTable",
    "charfun_rows",
    "ensemble_rows",
    "format_value",
    "independence_rows",
    "read_report",
    "stationarity_rows",
    "write_rows",
    # Manifest
    "MANIFEST_NAME",
    "RunManifest",
    "read_manifest",
    "write_manifest",
    # Plot data
    "emit_plot_data",
    "plot_rows",
]
