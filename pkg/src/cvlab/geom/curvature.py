"""Christoffel symbols, Riemann, Ricci, scalar and Schouten tensors.

Conventions: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
R_ijkl = <R(d_i, d_j) d_k, d_l>, R_jk = g^il R_ijkl, and
S = Ric - R / (2(n-1)) g.  On the unit sphere R_ijkl = g_jk g_il - g_ik g_jl.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConditioningError
from .fields import MetricField, Sym2Field, ScalarField

CONDITION_FLOOR = 1e-10
_BLOCK_BYTES = 64 * 2 ** 20


@dataclass(frozen=True, eq=False)
class CurvaturePack:
    metric: MetricField
    inverse: np.ndarray        # g^ij
    sqrt_det: np.ndarray       # sqrt(det g)
    dmetric: np.ndarray        # d_c g_ij, index order (c, i, j)
    christoffel: np.ndarray    # Gamma^k_ij, index order (k, i, j)
    christoffel_lower: np.ndarray  # Gamma_kij = g_km Gamma^m_ij
    riemann: np.ndarray | None     # R_ijkl (None when not kept)
    ricci: np.ndarray
    scalar: np.ndarray
    schouten: np.ndarray

    @property
    def chart(self):
        return self.metric.chart

    def schouten_field(self) -> Sym2Field:
        return Sym2Field(self.chart, self.schouten)

    def scalar_field(self) -> ScalarField:
        return ScalarField(self.chart, self.scalar)

    def schouten_endomorphism(self) -> np.ndarray:
        """Mixed Schouten tensor S^i_j = g^ia S_aj."""
        return np.einsum("...ia,...aj->...ij", self.inverse, self.schouten)


def _invert(g: MetricField):
    v = g.values
    d = np.sqrt(np.diagonal(v, axis1=-2, axis2=-1))
    scaled = v / (d[..., :, None] * d[..., None, :])
    det_scaled = np.linalg.det(scaled)
    # det of the unit-diagonal scaled metric is the product of its eigenvalues (each <= n)
    bad = det_scaled < CONDITION_FLOOR
    if np.any(bad):
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ConditioningError(f"metric nearly singular at node {node} (scaled det {det_scaled[node]:.2e})")
    inv_scaled = np.linalg.inv(scaled)
    inverse = inv_scaled / (d[..., :, None] * d[..., None, :])
    sqrt_det = np.sqrt(det_scaled) * np.prod(d, axis=-1)
    return inverse, sqrt_det


def curvature_pack(g: MetricField, keep_riemann: bool = True) -> CurvaturePack:
    """Curvature of ``g`` from central differences of its coordinate components."""
    chart = g.chart
    n = chart.n
    w = chart.order // 2
    gv = g.values
    inverse, sqrt_det = _invert(g)

    dg = chart.gradient(gv, rank=2)                      # (c, i, j)
    # Gamma_kij = 1/2 (d_i g_jk + d_j g_ik - d_k g_ij)
    gl = 0.5 * (np.einsum("...ijk->...kij", dg) + np.einsum("...jik->...kij", dg)
                - dg)
    gu = np.einsum("...mk,...kij->...mij", inverse, gl)

    # second derivatives are assembled in blocks along axis 0 to bound memory
    padded_g = chart.pad(gv, 0, w, rank=2)
    padded_dg = chart.pad(dg, 0, w, rank=3)
    N0 = chart.shape[0]
    per_slab = int(np.prod(chart.shape[1:])) * n ** 4 * 8 * 6
    step = max(1, min(N0, _BLOCK_BYTES // max(per_slab, 1)))

    riemann = np.empty(chart.shape + (n,) * 4) if keep_riemann else None
    ricci = np.empty(chart.shape + (n, n))
    for start in range(0, N0, step):
        stop = min(N0, start + step)
        blk = slice(start, stop)
        ddg = np.empty((stop - start,) + chart.shape[1:] + (n,) * 4)
        for a in range(n):
            for b in range(a, n):
                if a == b:
                    if a == 0:
                        v = chart.stencil(padded_g, 0, start, stop, deriv=2)
                    else:
                        v = chart.diff(gv[blk], a, rank=2, deriv=2)
                elif a == 0:
                    v = chart.stencil(padded_dg[..., b, :, :], 0, start, stop)
                else:
                    v = chart.diff(dg[blk][..., b, :, :], a, rank=2, fixed=(b,))
                ddg[..., a, b, :, :] = v
                ddg[..., b, a, :, :] = v
        gi = inverse[blk]
        glb = gl[blk]
        gub = gu[blk]
        # R_ijkl = 1/2 (d_i d_k g_jl + d_j d_l g_ik - d_i d_l g_jk - d_j d_k g_il)
        #          + g^mp (Gamma_pjl Gamma_mik - Gamma_pil Gamma_mjk)
        rm = 0.5 * (np.einsum("...ikjl->...ijkl", ddg) + np.einsum("...jlik->...ijkl", ddg)
                    - np.einsum("...iljk->...ijkl", ddg) - np.einsum("...jkil->...ijkl", ddg))
        rm += np.einsum("...pjl,...pik->...ijkl", glb, gub)
        rm -= np.einsum("...pil,...pjk->...ijkl", glb, gub)
        ricci[blk] = np.einsum("...il,...ijkl->...jk", gi, rm)
        if keep_riemann:
            riemann[blk] = rm
    ricci = 0.5 * (ricci + np.swapaxes(ricci, -1, -2))
    scalar = np.einsum("...jk,...jk->...", inverse, ricci)
    schouten = ricci - (scalar / (2.0 * (n - 1)))[..., None, None] * gv
    return CurvaturePack(metric=g, inverse=inverse, sqrt_det=sqrt_det, dmetric=dg,
                         christoffel=gu, christoffel_lower=gl, riemann=riemann,
                         ricci=ricci, scalar=scalar, schouten=schouten)
