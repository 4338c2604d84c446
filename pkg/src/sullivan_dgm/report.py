"""Command reports with a deterministic JSON rendering and a plain text one."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA = "sullivan-dgm-report/1"
MEM_ENV = "SULLIVAN_DGM_MAX_MEM"


def _plain(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class Table:
    title: str
    columns: list
    rows: list

    def to_dict(self):
        return {"title": self.title, "columns": list(self.columns), "rows": _plain(self.rows)}


@dataclass
class Report:
    command: list
    complete: bool = True
    tables: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    certificate: str | None = None

    def table(self, title, columns, rows):
        self.tables.append(Table(title, columns, rows))

    def flag(self, text):
        if text not in self.flags:
            self.flags.append(text)

    def incomplete(self, why):
        self.complete = False
        self.flag(why)

    @property
    def status(self):
        return "complete" if self.complete else "incomplete"

    @property
    def exit_code(self):
        return 0 if self.complete else 2

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "command": list(self.command),
            "status": self.status,
            "certificate": self.certificate,
            "flags": list(self.flags),
            "tables": [t.to_dict() for t in self.tables],
            "data": _plain(self.data),
            "environment": {MEM_ENV: os.environ.get(MEM_ENV)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = ["$ " + " ".join(self.command), f"status: {self.status}"]
        if self.certificate:
            lines.append(f"certificate: {self.certificate}")
        for f in self.flags:
            lines.append(f"flag: {f}")
        for t in self.tables:
            lines.append("")
            lines.append(t.title)
            cells = [[str(c) for c in t.columns]] + [[str(_plain(c)) for c in row] for row in t.rows]
            widths = [max(len(r[i]) for r in cells) for i in range(len(t.columns))]
            for j, row in enumerate(cells):
                lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip())
                if j == 0:
                    lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def error_report(command, message) -> dict:
    return {"schema": SCHEMA, "command": list(command), "status": "error", "error": message}


__all__ = ["SCHEMA", "MEM_ENV", "Report", "Table", "error_report"]
