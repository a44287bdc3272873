"""Small helpers for flat key-value reports and CSV documents.

All emitted text uses LF line endings, ``,`` as the CSV delimiter and ``.``
as the decimal mark. Floats are rendered with ``repr`` so output is
byte-reproducible and round-trips exactly.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_kv(items: Sequence[tuple[str, object]]) -> str:
    """Render ``(key, value)`` pairs as a flat ``key: value`` document."""
    return "".join(f"{key}: {format_value(value)}\n" for key, value in items)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    return buf.getvalue()
