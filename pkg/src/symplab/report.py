"""Verification reports: a schema-versioned JSON document plus optional CSV rows.

Reports are byte-deterministic for a fixed config and seed: keys are sorted,
floats are written with ``repr`` precision, and wall-clock timings go to a
separate sidecar file rather than into the report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import conventions

SCHEMA_VERSION = "1.0"


@dataclass
class CheckRecord:
    name: str
    metric: str                 # what ``value`` measures, e.g. max_rel, deviation, order
    value: float
    tolerance: float
    passed: bool
    order: float | str | None = None   # fitted convergence order, or "saturated"
    samples: int = 0
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "metric": self.metric, "value": _num(self.value), "tolerance": _num(self.tolerance),
                "passed": bool(self.passed), "order": _num(self.order) if isinstance(self.order, float) else self.order,
                "samples": int(self.samples), "details": _clean(self.details)}


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    try:
        return _num(obj)
    except (TypeError, ValueError):
        return str(obj)


def constants() -> dict:
    return {"c_ym": conventions.C_YM, "c_gr": conventions.C_GR,
            "einstein_current_factor": conventions.E_CURRENT_FACTOR}


@dataclass
class VerificationReport:
    config: dict
    records: list[CheckRecord]
    kind: str = "run"            # run | sweep
    levels: list[int] | None = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def as_dict(self) -> dict:
        d = {"schema_version": SCHEMA_VERSION, "kind": self.kind, "config": _clean(self.config),
             "constants": constants(), "records": [r.as_dict() for r in self.records], "passed": self.passed}
        if self.levels is not None:
            d["levels"] = list(self.levels)
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "metric", "value", "tolerance", "passed", "order", "samples"])
        for r in self.records:
            d = r.as_dict()
            w.writerow([d["name"], d["metric"], repr(d["value"]) if isinstance(d["value"], float) else d["value"],
                        repr(d["tolerance"]) if isinstance(d["tolerance"], float) else d["tolerance"],
                        int(d["passed"]), "" if d["order"] is None else d["order"], d["samples"]])
        return buf.getvalue()

    def write(self, path: str | Path, csv_path: str | Path | None = None) -> list[Path]:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        out = [path]
        timing = path.with_name(path.stem + ".timings.json")
        timing.write_text(json.dumps({k: round(v, 6) for k, v in sorted(self.timings.items())}, indent=2) + "\n")
        out.append(timing)
        if csv_path is not None:
            csv_path = Path(csv_path)
            csv_path.parent.mkdir(parents=True, exist_ok=True)
            csv_path.write_text(self.to_csv())
            out.append(csv_path)
        return out


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
