"""Differential operators on grid fields and pointwise tensor algebra."""
from __future__ import annotations

import numpy as np

from .curvature import CurvaturePack, curvature_pack
from ..errors import DomainError
from .fields import MetricField, OneForm, ScalarField, Sym2Field, same_chart


def _pack(g: MetricField, pack: CurvaturePack | None) -> CurvaturePack:
    if pack is None:
        return curvature_pack(g)
    same_chart(pack.metric, g)
    return pack


def integrate(chart, f: ScalarField, g: MetricField, sqrt_det=None) -> float:
    """Quadrature of f dv_g over the sphere."""
    if same_chart(f, g) != chart:
        raise DomainError("fields do not live on the given chart")
    if sqrt_det is None:
        sqrt_det = np.sqrt(np.linalg.det(g.values))
    return float(np.sum(chart.weights * f.values * sqrt_det))


def volume(g: MetricField, pack: CurvaturePack | None = None) -> float:
    sqrt_det = pack.sqrt_det if pack is not None else np.sqrt(np.linalg.det(g.values))
    return float(np.sum(g.chart.weights * sqrt_det))


def trace(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> ScalarField:
    same_chart(g, h)
    inv = pack.inverse if pack is not None else np.linalg.inv(g.values)
    return ScalarField(g.chart, np.einsum("...ij,...ij->...", inv, h.values))


def inner(g: MetricField, a: Sym2Field, b: Sym2Field, pack: CurvaturePack | None = None) -> ScalarField:
    """Pointwise g^ik g^jl a_ij b_kl."""
    same_chart(g, a, b)
    inv = pack.inverse if pack is not None else np.linalg.inv(g.values)
    ai = np.einsum("...ik,...kj->...ij", inv, a.values)
    bi = np.einsum("...ik,...kj->...ij", inv, b.values)
    return ScalarField(g.chart, np.einsum("...ij,...ji->...", ai, bi))


def traceless_part(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> Sym2Field:
    tr = trace(g, h, pack)
    return Sym2Field(g.chart, h.values - (tr.values / g.chart.n)[..., None, None] * g.values)


def gradient(u: ScalarField) -> OneForm:
    return OneForm(u.chart, u.chart.gradient(u.values))


def grad_norm_sq(g: MetricField, u: ScalarField, pack: CurvaturePack | None = None) -> ScalarField:
    same_chart(g, u)
    inv = pack.inverse if pack is not None else np.linalg.inv(g.values)
    du = u.chart.gradient(u.values)
    return ScalarField(u.chart, np.einsum("...ij,...i,...j->...", inv, du, du))


def divergence_oneform(g: MetricField, w: OneForm, pack: CurvaturePack | None = None) -> ScalarField:
    """nabla^i w_i in flux form (1/sqrt g) d_i (sqrt g g^ij w_j)."""
    same_chart(g, w)
    chart = g.chart
    if pack is None:
        inv = np.linalg.inv(g.values)
        sqrt_det = np.sqrt(np.linalg.det(g.values))
    else:
        inv, sqrt_det = pack.inverse, pack.sqrt_det
    flux = sqrt_det[..., None] * np.einsum("...ij,...j->...i", inv, w.values)
    total = np.zeros(chart.shape)
    for a in range(chart.n):
        # the component and the density both pick up reflection signs
        total += chart.diff(flux, a, rank=1, density=True)[..., a]
    return ScalarField(chart, total / sqrt_det)


def laplace_scalar(g: MetricField, u: ScalarField, pack: CurvaturePack | None = None) -> ScalarField:
    """Laplace-Beltrami operator via nested stencils in divergence form."""
    same_chart(g, u)
    return divergence_oneform(g, gradient(u), pack)


def hessian(g: MetricField, u: ScalarField, pack: CurvaturePack | None = None) -> Sym2Field:
    """nabla_i nabla_j u = d_i d_j u - Gamma^k_ij d_k u."""
    same_chart(g, u)
    pack = _pack(g, pack)
    chart = u.chart
    n = chart.n
    du = chart.gradient(u.values)
    dd = np.empty(chart.shape + (n, n))
    for a in range(n):
        for b in range(a, n):
            v = chart.diff(u.values, a, deriv=2) if a == b else chart.diff(du[..., b], a, fixed=(b,))
            dd[..., a, b] = v
            dd[..., b, a] = v
    return Sym2Field(chart, dd - np.einsum("...kij,...k->...ij", pack.christoffel, du))


def laplace_hessian_form(g: MetricField, u: ScalarField, pack: CurvaturePack | None = None) -> ScalarField:
    """g^ij nabla_i nabla_j u; an alternative discretisation of the Laplacian."""
    pack = _pack(g, pack)
    H = hessian(g, u, pack)
    return ScalarField(u.chart, np.einsum("...ij,...ij->...", pack.inverse, H.values))


def covariant_derivative_sym2(pack: CurvaturePack, h: Sym2Field) -> np.ndarray:
    """nabla_c h_ij with index order (c, i, j)."""
    chart = h.chart
    gu = pack.christoffel
    dh = chart.gradient(h.values, rank=2)
    return (dh - np.einsum("...mci,...mj->...cij", gu, h.values)
            - np.einsum("...mcj,...im->...cij", gu, h.values))


def second_covariant_derivative_sym2(pack: CurvaturePack, h: Sym2Field) -> np.ndarray:
    """nabla_d nabla_c h_ij with index order (d, c, i, j)."""
    chart = h.chart
    gu = pack.christoffel
    nh = covariant_derivative_sym2(pack, h)
    dnh = chart.gradient(nh, rank=3)
    return (dnh - np.einsum("...mdc,...mij->...dcij", gu, nh)
            - np.einsum("...mdi,...cmj->...dcij", gu, nh)
            - np.einsum("...mdj,...cim->...dcij", gu, nh))


def divergence_sym2(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> OneForm:
    """(delta h)_i = nabla^j h_ij."""
    same_chart(g, h)
    pack = _pack(g, pack)
    nh = covariant_derivative_sym2(pack, h)
    return OneForm(h.chart, np.einsum("...jc,...cij->...i", pack.inverse, nh))


def double_divergence(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> ScalarField:
    """delta^2 h = nabla^i nabla^j h_ij, as the flux divergence of delta h."""
    pack = _pack(g, pack)
    return divergence_oneform(g, divergence_sym2(g, h, pack), pack)


def double_divergence_direct(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> ScalarField:
    """g^ia g^jb nabla_a nabla_b h_ij from the full second covariant derivative."""
    same_chart(g, h)
    pack = _pack(g, pack)
    nnh = second_covariant_derivative_sym2(pack, h)
    return ScalarField(h.chart, np.einsum("...ia,...jb,...abij->...", pack.inverse, pack.inverse, nnh))


def rough_laplacian_sym2(pack: CurvaturePack, h: Sym2Field) -> Sym2Field:
    nnh = second_covariant_derivative_sym2(pack, h)
    return Sym2Field(h.chart, np.einsum("...dc,...dcij->...ij", pack.inverse, nnh))


def curvature_action(pack: CurvaturePack, h: Sym2Field) -> Sym2Field:
    """Rm acting on h, normalised so that Rm(g) = Ric: R_kijl h^kl."""
    if pack.riemann is None:
        raise ValueError("curvature pack was built without the Riemann tensor")
    hu = np.einsum("...ka,...ab,...lb->...kl", pack.inverse, h.values, pack.inverse)
    return Sym2Field(h.chart, np.einsum("...kijl,...kl->...ij", pack.riemann, hu))


def einstein_operator(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> Sym2Field:
    """Delta_E h = Delta h + 2 Rm(h)."""
    same_chart(g, h)
    pack = _pack(g, pack)
    lap = rough_laplacian_sym2(pack, h)
    return Sym2Field(h.chart, lap.values + 2.0 * curvature_action(pack, h).values)


def tt_diagnostics(g: MetricField, h: Sym2Field, pack: CurvaturePack | None = None):
    """Sup norms of tr_g h and |delta_g h|_g."""
    pack = _pack(g, pack)
    tr = trace(g, h, pack)
    div = divergence_sym2(g, h, pack)
    div_norm = np.sqrt(np.abs(np.einsum("...ij,...i,...j->...", pack.inverse, div.values, div.values)))
    return float(np.max(np.abs(tr.values))), float(np.max(div_norm))


def lie_derivative_metric(g: MetricField, X: np.ndarray, pack: CurvaturePack | None = None) -> Sym2Field:
    """(L_X g)_ij = nabla_i X_j + nabla_j X_i for a vector field with components X^k.

    The field is lowered before differentiating: coordinate components of a
    vector field blow up at the chart poles while the lowered ones stay smooth.
    """
    pack = _pack(g, pack)
    chart = g.chart
    Xl = np.einsum("...jk,...k->...j", g.values, X)
    dXl = chart.gradient(Xl, rank=1)          # (i, j) = d_i X_j
    out = dXl + np.swapaxes(dXl, -1, -2) - 2.0 * np.einsum("...kij,...k->...ij", pack.christoffel, Xl)
    return Sym2Field(chart, out)


def raise_index(g: MetricField, w: OneForm, pack: CurvaturePack | None = None) -> np.ndarray:
    inv = pack.inverse if pack is not None else np.linalg.inv(g.values)
    return np.einsum("...ij,...j->...i", inv, w.values)
