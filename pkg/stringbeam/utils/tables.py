"""
CSV table helpers shared by every artifact writer.

Floats are written with 17 significant digits so that files round-trip
exactly and identical runs produce byte-identical output.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from stringbeam.utils.constants import CSV_DIGITS

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """17-significant-digit text for reals; str() for everything else."""
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, int):
        return str(value)
    try:
        return f"{float(value):.{CSV_DIGITS}g}"
    except (TypeError, ValueError):
        return str(value)


def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """
    Write rows to a CSV file with a fixed header.

    Args:
        path: Destination file (parent directories are created)
        fieldnames: Header, in column order
        rows: Mappings from header name to value

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_value(row.get(key)) for key in fieldnames})
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def read_csv(path: Path) -> list[dict[str, float]]:
    """Read a numeric CSV written by write_csv."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(f)]
