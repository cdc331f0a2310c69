"""Spherical harmonics, Killing fields and seeded smooth test fields."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import DomainError
from .chart import Chart
from .fields import ScalarField, Sym2Field


def harmonic_generator(chart: Chart, degree: int, index: int) -> ScalarField:
    """Ambient coordinate x_index (degree 1) or x_index^2 - 1/(n+1) (degree 2).

    Coordinates are those of the unit sphere, so the Laplace eigenvalues are
    n*lam and 2(n+1)*lam for any radius.
    """
    if degree not in (1, 2):
        raise DomainError(f"degree must be 1 or 2, got {degree}")
    if not 1 <= index <= chart.n + 1:
        raise DomainError(f"index must lie in 1..{chart.n + 1}, got {index}")
    x = chart.ambient[index - 1]
    if degree == 1:
        return ScalarField(chart, x.copy())
    return ScalarField(chart, x * x - 1.0 / (chart.n + 1))


def _monomials(n_amb: int, max_degree: int):
    out = []
    for d in range(max_degree + 1):
        out.extend(itertools.combinations_with_replacement(range(n_amb), d))
    return out


def random_polynomial(chart: Chart, seed: int, max_degree: int = 3) -> ScalarField:
    """Seeded polynomial in the ambient coordinates, normalised to sup 1."""
    rng = np.random.default_rng(seed)
    X = chart.ambient
    vals = np.zeros(chart.shape)
    for mono in _monomials(chart.n + 1, max_degree):
        term = np.ones(chart.shape)
        for a in mono:
            term = term * X[a]
        vals += rng.standard_normal() * term
    return ScalarField(chart, vals / np.max(np.abs(vals)))


def ambient_pullback(chart: Chart, T: np.ndarray) -> Sym2Field:
    """Pull back an ambient symmetric field T_AB(x) (shape (N, N, grid...)) to the sphere."""
    J = chart.ambient_jacobian * chart.radius            # (A, grid, i)
    vals = np.einsum("Ab...,A...i,b...j->...ij", T, J, J)
    return Sym2Field(chart, vals)


def random_sym2(chart: Chart, seed: int) -> Sym2Field:
    """Seeded smooth symmetric 2-tensor, normalised to unit sup operator norm against the round metric."""
    rng = np.random.default_rng(seed)
    N = chart.n + 1
    X = chart.ambient
    C = rng.standard_normal((N, N))
    D = rng.standard_normal((N, N, N))
    T = (C + C.T)[..., None] * np.ones((1,) * 2 + (chart.size,))
    T = T.reshape((N, N) + chart.shape)
    T = T + np.einsum("abc,c...->ab...", D + np.swapaxes(D, 0, 1), X)
    h = ambient_pullback(chart, T)
    return h * (1.0 / round_operator_norm(chart, h))


def round_operator_norm(chart: Chart, h: Sym2Field) -> float:
    """Sup over nodes of the operator norm of h relative to the round metric."""
    d = np.sqrt(chart.round_metric_diagonal)
    m = h.values / (d[..., :, None] * d[..., None, :])
    return float(np.max(np.abs(np.linalg.eigvalsh(m))))


def rotation_field(chart: Chart, a: int, b: int) -> np.ndarray:
    """Coordinate components of the Killing field x_a d_b - x_b d_a (1-based indices)."""
    if not (1 <= a <= chart.n + 1 and 1 <= b <= chart.n + 1 and a != b):
        raise DomainError("rotation plane needs two distinct ambient indices")
    X = chart.ambient
    V = np.zeros_like(X)
    V[b - 1] = X[a - 1]
    V[a - 1] = -X[b - 1]
    J = chart.ambient_jacobian
    # on the unit sphere, V = J X^i with J^T J the round metric up to radius
    cov = np.einsum("A...i,A...->...i", J, V)
    return cov / np.einsum("A...i,A...i->...i", J, J)
