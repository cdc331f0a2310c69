"""Flat CSV and raw binary layouts for grid fields.

Both layouts are node-major: nodes are enumerated in C order of the grid
index, and each node stores its components contiguously.  Symmetric
2-tensors store only the upper triangle (i <= j, row by row).  The binary
layout is little-endian float64 with no header; the reader needs the chart
and the field kind to reshape it.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..errors import DomainError
from .chart import Chart
from .fields import MetricField, OneForm, ScalarField, Sym2Field

_KINDS = {"scalar": ScalarField, "oneform": OneForm, "sym2": Sym2Field, "metric": MetricField}


def _kind(field) -> str:
    for name, cls in reversed(list(_KINDS.items())):
        if type(field) is cls:
            return name
    raise DomainError(f"unsupported field type {type(field).__name__}")


def field_components(field) -> np.ndarray:
    """Node-major component table of shape (nodes, components)."""
    chart = field.chart
    kind = _kind(field)
    if kind == "scalar":
        return field.values.reshape(chart.size, 1)
    if kind == "oneform":
        return field.values.reshape(chart.size, chart.n)
    return field.upper()


def field_from_components(chart: Chart, kind: str, table: np.ndarray):
    if kind not in _KINDS:
        raise DomainError(f"unknown field kind {kind!r}")
    n = chart.n
    table = np.asarray(table, dtype=float)
    if kind == "scalar":
        return ScalarField(chart, table.reshape(chart.shape))
    if kind == "oneform":
        return OneForm(chart, table.reshape(chart.shape + (n,)))
    iu = np.triu_indices(n)
    full = np.zeros((chart.size, n, n))
    full[:, iu[0], iu[1]] = table
    full[:, iu[1], iu[0]] = table
    return _KINDS[kind](chart, full.reshape(chart.shape + (n, n)))


def _component_names(chart: Chart, kind: str) -> list[str]:
    if kind == "scalar":
        return ["value"]
    if kind == "oneform":
        return [f"c{i}" for i in range(chart.n)]
    return [f"c{i}{j}" for i, j in zip(*np.triu_indices(chart.n))]


def write_field_csv(field, path) -> None:
    chart = field.chart
    kind = _kind(field)
    table = field_components(field)
    index = np.indices(chart.shape).reshape(chart.n, -1).T
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"i{a}" for a in range(chart.n)] + _component_names(chart, kind))
        for idx, row in zip(index, table):
            w.writerow([int(i) for i in idx] + [repr(float(v)) for v in row])


def read_field_csv(chart: Chart, kind: str, path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    names = _component_names(chart, kind)
    if header[chart.n:] != names or len(body) != chart.size:
        raise DomainError(f"{path} does not hold a {kind} field on this chart")
    table = np.array([[float(v) for v in r[chart.n:]] for r in body])
    return field_from_components(chart, kind, table)


def write_field_binary(field, path) -> None:
    field_components(field).astype("<f8").tofile(Path(path))


def read_field_binary(chart: Chart, kind: str, path):
    width = len(_component_names(chart, kind))
    data = np.fromfile(Path(path), dtype="<f8")
    if data.size != chart.size * width:
        raise DomainError(f"{path} holds {data.size} values, expected {chart.size * width}")
    return field_from_components(chart, kind, data.reshape(chart.size, width))
