"""Check records, report assembly and serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

PASS, FAIL, INDETERMINATE, ERROR = "pass", "fail", "indeterminate", "error"


@dataclass
class CheckRecord:
    check_id: str
    anchor: str
    manifold: str
    points: int
    residual: float
    tolerance: float
    verdict: str = ""
    outcome: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)
        if not self.verdict:
            ok = math.isfinite(self.residual) and self.residual <= self.tolerance
            self.verdict = PASS if ok else FAIL

    @property
    def sort_key(self):
        return (self.check_id, self.manifold)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class Report:
    records: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    def add(self, rec: CheckRecord) -> None:
        self.records.append(rec)

    def sorted_records(self) -> list:
        return sorted(self.records, key=lambda r: r.sort_key)

    @property
    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, INDETERMINATE: 0, ERROR: 0}
        for r in self.records:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        counts["total"] = len(self.records)
        return counts

    @property
    def exit_status(self) -> int:
        return 0 if all(r.verdict == PASS for r in self.records) else 1

    def to_dict(self) -> dict:
        return _clean(
            {
                "records": [asdict(r) for r in self.sorted_records()],
                "summary": self.summary,
                "environment": self.environment,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["check_id", "anchor", "manifold", "points", "residual", "tolerance", "verdict", "outcome"]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in self.sorted_records():
            writer.writerow([r.check_id, r.anchor, r.manifold, r.points, repr(r.residual), repr(r.tolerance), r.verdict, r.outcome])
        return buf.getvalue()

    def to_table(self) -> str:
        rows = [("check", "manifold", "residual", "tol", "verdict")]
        for r in self.sorted_records():
            verdict = r.verdict + (f" ({r.outcome})" if r.outcome else "")
            rows.append((r.check_id, r.manifold, f"{r.residual:.3e}", f"{r.tolerance:.1e}", verdict))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        s = self.summary
        lines.append("")
        lines.append(
            f"{s['total']} checks: {s[PASS]} pass, {s[FAIL]} fail, {s[INDETERMINATE]} indeterminate, {s[ERROR]} error"
        )
        return "\n".join(lines) + "\n"


def environment_block(seed: int, grids: dict, points: int, version: str, timestamp: Optional[str] = None) -> dict:
    return {
        "seed": seed,
        "grids": dict(sorted(grids.items())),
        "points": points,
        "version": version,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
