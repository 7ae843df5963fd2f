import csv
import io
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12


def format_value(value: Any) -> str:
    """Decimal rendering with 12 significant digits; ints and strings pass through."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def format_header_comment(provenance: Mapping[str, Any]) -> str:
    """One ``# key=value; ...`` line recording how the data was produced."""
    parts = [f"{key}={format_value(val)}" for key, val in provenance.items()]
    return "# " + "; ".join(parts)


def render_csv(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    provenance: Optional[Mapping[str, Any]] = None,
) -> str:
    """Render rows to CSV text with an optional provenance comment line."""
    buffer = io.StringIO()
    if provenance:
        buffer.write(format_header_comment(provenance) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(
    out: Optional[Path],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    provenance: Optional[Mapping[str, Any]] = None,
) -> str:
    """Write CSV to ``out`` (or return it for stdout when ``out`` is None)."""
    text = render_csv(columns, rows, provenance)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)
    return text
