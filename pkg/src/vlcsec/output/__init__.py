"""
CSV and manifest writers.
"""

from .writer import (
    SUMMARY_FILE,
    PER_USER_FILE,
    MANIFEST_FILE,
    SUMMARY_COLUMNS,
    PER_USER_COLUMNS,
    RunManifest,
    fmt,
    summary_rows,
    per_user_rows,
    utc_now,
    write_results,
)

__all__ = [
    "SUMMARY_FILE",
    "PER_USER_FILE",
    "MANIFEST_FILE",
    "SUMMARY_COLUMNS",
    "PER_USER_COLUMNS",
    "RunManifest",
    "fmt",
    "summary_rows",
    "per_user_rows",
    "utc_now",
    "write_results",
]
