"""Structured verification records and their JSON/CSV emission."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

CSV_COLUMNS = ("name", "inputs", "measured", "reference", "abs_dev", "rel_dev",
               "tol", "pass", "fd_error", "diagnostic")


def _plain(value):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return repr(value)
        return value
    return value


@dataclass
class CheckRecord:
    name: str
    measured: Any
    reference: Any = None
    abs_dev: float | None = None
    rel_dev: float | None = None
    tol: float | None = None
    passed: bool = True
    inputs: dict = field(default_factory=dict)
    fd_error: float | None = None
    diagnostic: bool = False
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "inputs": _plain(self.inputs),
            "measured": _plain(self.measured),
            "reference": _plain(self.reference),
            "abs_dev": _plain(self.abs_dev),
            "rel_dev": _plain(self.rel_dev),
            "tol": _plain(self.tol),
            "pass": bool(self.passed),
            "fd_error": _plain(self.fd_error),
            "diagnostic": bool(self.diagnostic),
        }
        if self.extra:
            out["extra"] = _plain(self.extra)
        return out


def compare(name, measured, reference, tol, *, scale=None, inputs=None,
            fd_error=None, fd_budget=0.3, **extra) -> CheckRecord:
    """Build a record comparing two reals with a relative tolerance.

    The relative deviation is taken against ``scale`` when given, otherwise
    against ``|reference|``.  When ``fd_error`` is supplied the check also
    requires the oracle's own error estimate to stay below ``fd_budget`` of
    the tolerance budget, so a noisy oracle cannot pass vacuously.
    """
    measured = float(measured)
    reference = float(reference)
    abs_dev = abs(measured - reference)
    denom = abs(reference) if scale is None else float(scale)
    rel_dev = abs_dev / denom if denom > 0 else (0.0 if abs_dev == 0 else math.inf)
    passed = rel_dev <= tol
    if fd_error is not None and denom > 0:
        passed = passed and fd_error <= fd_budget * tol * denom
    return CheckRecord(name=name, measured=measured, reference=reference,
                       abs_dev=abs_dev, rel_dev=rel_dev, tol=tol, passed=passed,
                       inputs=dict(inputs or {}), fd_error=fd_error, extra=extra)


@dataclass
class Report:
    suite: str
    checks: list[CheckRecord] = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.diagnostic)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.diagnostic and not c.passed]

    def __getitem__(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "environment": _plain(self.environment),
            "checks": [c.as_dict() for c in self.checks],
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            tag = "DIAG" if c.diagnostic else ("PASS" if c.passed else "FAIL")
            dev = "" if c.rel_dev is None else f" rel_dev={c.rel_dev:.3e}"
            if c.tol is not None:
                dev += f" tol={c.tol:.1e}"
            lines.append(f"[{tag}] {c.name}{dev}")
        return lines


def report_to_json(report: Report) -> str:
    # repr-based float formatting round-trips every double exactly
    return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"


def write_report(report: Report, fmt: str, fh) -> None:
    """Write ``report`` as JSON or CSV to an open text stream."""
    if fmt == "json":
        fh.write(report_to_json(report))
    elif fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS + ("extra",))
        for c in report.checks:
            d = c.as_dict()
            row = [d["name"], json.dumps(d["inputs"], sort_keys=True)]
            for key in CSV_COLUMNS[2:]:
                v = d[key]
                row.append(json.dumps(v) if isinstance(v, (list, dict)) else
                           ("" if v is None else repr(v) if isinstance(v, float) else v))
            row.append(json.dumps(d.get("extra", {}), sort_keys=True))
            writer.writerow(row)
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report: Report, fmt: str, path) -> None:
    """Write ``report`` to ``path`` as JSON or CSV.  Profile tables travel in ``extra``."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_report(report, fmt, fh)
