"""Grid-sampled scalar, one-form and symmetric 2-tensor fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AmplitudeError, DomainError
from .chart import Chart
from .jacobi import jacobi_eigenvalues


def same_chart(*fields) -> Chart:
    chart = fields[0].chart
    for f in fields[1:]:
        if f.chart != chart:
            raise DomainError("fields live on different charts")
    return chart


def _check_values(chart: Chart, values: np.ndarray, tail: tuple[int, ...], kind: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != chart.shape + tail:
        raise DomainError(f"{kind} values have shape {values.shape}, expected {chart.shape + tail}")
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{kind} values contain non-finite entries")
    return values


@dataclass(frozen=True, eq=False)
class ScalarField:
    chart: Chart
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.chart, self.values, (), "scalar"))

    @classmethod
    def constant(cls, chart: Chart, c: float) -> "ScalarField":
        return cls(chart, np.full(chart.shape, float(c)))

    def __add__(self, other):
        if isinstance(other, ScalarField):
            same_chart(self, other)
            return ScalarField(self.chart, self.values + other.values)
        return ScalarField(self.chart, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ScalarField(self.chart, -self.values)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            same_chart(self, other)
            return ScalarField(self.chart, self.values * other.values)
        if isinstance(other, Sym2Field):
            return other * self
        return ScalarField(self.chart, self.values * other)

    __rmul__ = __mul__

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class OneForm:
    """Covector field with coordinate components (grid..., n)."""

    chart: Chart
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.chart, self.values, (self.chart.n,), "one-form"))


@dataclass(frozen=True, eq=False)
class Sym2Field:
    """Symmetric 2-tensor field; components are symmetrised exactly on construction."""

    chart: Chart
    values: np.ndarray

    def __post_init__(self):
        n = self.chart.n
        v = _check_values(self.chart, self.values, (n, n), "sym2")
        # (a + b) / 2 is commutative in IEEE arithmetic, so the result is exactly symmetric
        v = 0.5 * (v + np.swapaxes(v, -1, -2))
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, chart: Chart) -> "Sym2Field":
        return cls(chart, np.zeros(chart.shape + (chart.n, chart.n)))

    def upper(self) -> np.ndarray:
        """Node-major upper-triangle components, shape (nodes, n(n+1)/2)."""
        iu = np.triu_indices(self.chart.n)
        return self.values.reshape(-1, self.chart.n, self.chart.n)[:, iu[0], iu[1]]

    def __add__(self, other):
        if not isinstance(other, Sym2Field):
            return NotImplemented
        same_chart(self, other)
        return Sym2Field(self.chart, self.values + other.values)

    def __sub__(self, other):
        if not isinstance(other, Sym2Field):
            return NotImplemented
        same_chart(self, other)
        return Sym2Field(self.chart, self.values - other.values)

    def __neg__(self):
        return Sym2Field(self.chart, -self.values)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            same_chart(self, other)
            return Sym2Field(self.chart, self.values * other.values[..., None, None])
        return Sym2Field(self.chart, self.values * other)

    __rmul__ = __mul__


class MetricField(Sym2Field):
    """Positive-definite Sym2Field (checked node by node on construction)."""

    def __post_init__(self):
        super().__post_init__()
        d = np.sqrt(np.abs(np.diagonal(self.values, axis1=-2, axis2=-1)))
        if np.any(d == 0):
            raise AmplitudeError("metric has a vanishing diagonal entry")
        scaled = self.values / (d[..., :, None] * d[..., None, :])
        eig = jacobi_eigenvalues(scaled)
        bad = eig[..., 0] <= 0
        if np.any(bad):
            node = tuple(int(i) for i in np.argwhere(bad)[0])
            raise AmplitudeError(f"metric is not positive definite at node {node}")
        object.__setattr__(self, "_scaled_min_eig", float(eig[..., 0].min()))

    @classmethod
    def from_sym2(cls, h: Sym2Field) -> "MetricField":
        return cls(h.chart, h.values)

    def perturbed(self, h: Sym2Field, t: float) -> "MetricField":
        same_chart(self, h)
        return MetricField(self.chart, self.values + t * h.values)

    def scaled(self, c: float) -> "MetricField":
        """The metric c^2 g."""
        return MetricField(self.chart, (c * c) * self.values)


def relative_eigenvalues(g: Sym2Field, bg: MetricField) -> np.ndarray:
    """Eigenvalues of bg^{-1} g at every node (ascending)."""
    same_chart(g, bg)
    L = np.linalg.cholesky(bg.values)
    Linv = np.linalg.inv(L)
    m = Linv @ g.values @ np.swapaxes(Linv, -1, -2)
    return jacobi_eigenvalues(m)


def round_metric(chart: Chart) -> MetricField:
    diag = chart.round_metric_diagonal
    values = np.zeros(chart.shape + (chart.n, chart.n))
    for i in range(chart.n):
        values[..., i, i] = diag[..., i]
    return MetricField(chart, values)


def build_round_sphere(n: int, lam: float = 1.0, resolution=None, order: int | None = None):
    """Chart and round metric of curvature ``lam`` on S^n."""
    kwargs = {} if order is None else {"order": order}
    chart = Chart(n, lam, resolution, **kwargs)
    return chart, round_metric(chart)
