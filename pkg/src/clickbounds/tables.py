"""Deterministic CSV/JSON rendering shared by the CLI and the service.

CSV is the primary plot-ready output; JSON mirrors carry a run header with
the tool version, timestamp and the full parameter echo, which is enough to
regenerate the run.
"""

from __future__ import annotations

import json
import math
import os
import sys
from datetime import datetime, timezone

TIMESTAMP_ENV = "CLICKBOUNDS_TIMESTAMP"


def current_timestamp() -> str:
    """UTC timestamp; CLICKBOUNDS_TIMESTAMP pins it for reproducible files."""
    pinned = os.environ.get(TIMESTAMP_ENV)
    if pinned:
        return pinned
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def fmt(value) -> str:
    """12 significant digits; below every tolerance, above float noise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if value == 0.0:
            return "0"
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def render_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_text(path: str | None, text: str) -> None:
    """Write to a file, or stdout when path is None or '-'."""
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n"
