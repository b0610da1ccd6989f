"""Result tables and their CSV serialization."""

from __future__ import annotations

import csv
import io
import numbers
import sys
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Table:
    """Column names (with units) and rows of floats or strings."""

    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def column(self, name) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def __len__(self):
        return len(self.rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, numbers.Real):
        return "%.17g" % float(value)
    return str(value)


def format_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(table: Table, path=None) -> None:
    """Write ``table`` as CSV to ``path`` (stdout when ``path`` is None or "-")."""
    text = format_csv(table)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_csv(path) -> Table:
    """Read a CSV written by :func:`emit_csv`; numeric cells come back as floats."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = []
        for raw in reader:
            row = []
            for cell in raw:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
            rows.append(row)
    return Table(columns, rows)
