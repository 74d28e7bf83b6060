"""Rendering of reports as text tables, JSON or CSV."""

import csv
import io
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
from pydantic import BaseModel

from arcsin_bounds_shared.types.reports import ChainReport, ChainRow


class OutputFormat(str, Enum):
    TABLE = "table"
    JSON = "json"
    CSV = "csv"


def flatten(data: Any, prefix: str = "") -> Dict[str, str]:
    """Flatten a JSON-mode dump into dotted keys; lists are joined with ';'."""
    out: Dict[str, str] = {}
    if isinstance(data, dict):
        for key, value in data.items():
            out.update(flatten(value, f"{prefix}.{key}" if prefix else str(key)))
    elif isinstance(data, list):
        if all(not isinstance(item, (dict, list)) for item in data):
            out[prefix] = ";".join("" if item is None else str(item) for item in data)
        else:
            for i, item in enumerate(data):
                out.update(flatten(item, f"{prefix}.{i}"))
    else:
        out[prefix] = "" if data is None else str(data)
    return out


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += [
        "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows
    ]
    return "\n".join(lines) + "\n"


def render(models: Sequence[BaseModel], fmt: OutputFormat) -> str:
    """Render one report (key/value) or several of one kind (one row each)."""
    dumps = [model.model_dump(mode="json") for model in models]
    if fmt is OutputFormat.JSON:
        payload: Any = dumps[0] if len(dumps) == 1 else dumps
        return json.dumps(payload, indent=2) + "\n"

    flat = [flatten(d) for d in dumps]
    if len(flat) == 1 and fmt is OutputFormat.TABLE:
        return _table(["field", "value"], list(flat[0].items()))
    header: List[str] = []
    for row in flat:
        header += [key for key in row if key not in header]
    rows = [[row.get(key, "") for key in header] for row in flat]
    if fmt is OutputFormat.CSV:
        return _csv(header, rows)
    return _table(header, rows)


def render_chain_rows(
    report: ChainReport, rows: Sequence[ChainRow], fmt: OutputFormat
) -> str:
    """Per-point values of a chain: x, one column per member, one per adjacent gap."""
    pairs = [gap.pair for gap in report.per_pair_min_gap]
    header = ["x", *report.members, *(f"gap[{pair}]" for pair in pairs)]
    body = [[str(row.x), *map(str, row.values), *map(str, row.gaps)] for row in rows]
    if fmt is OutputFormat.CSV:
        return _csv(header, body)
    return _table(header, body)


def emit(text: str, output: Optional[Path] = None) -> None:
    """Write to ``output`` if given, else to stdout."""
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")
