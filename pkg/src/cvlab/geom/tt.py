"""Best-effort projection of a symmetric 2-tensor onto its TT part."""
from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import LinearOperator, lgmres

from ..errors import ConvergenceError
from .curvature import CurvaturePack, curvature_pack
from .fields import MetricField, OneForm, Sym2Field
from .operators import divergence_sym2, traceless_part, tt_diagnostics


def conformal_killing(pack: CurvaturePack, Y: np.ndarray) -> np.ndarray:
    """Trace-free part of nabla_i Y_j + nabla_j Y_i for a one-form Y."""
    g = pack.metric
    chart = g.chart
    dY = chart.gradient(Y, rank=1)
    L = dY + np.swapaxes(dY, -1, -2) - 2.0 * np.einsum("...kij,...k->...ij", pack.christoffel, Y)
    tr = np.einsum("...ij,...ij->...", pack.inverse, L)
    return L - (tr / chart.n)[..., None, None] * g.values


def tt_project(bg: MetricField, h: Sym2Field, tol: float = 1e-6, max_iter: int = 200,
               pack: CurvaturePack | None = None):
    """Remove the trace and a conformal-Killing gauge part from ``h``.

    Solves delta(L Y) = delta(h0) for the one-form Y with a Krylov iteration
    preconditioned by the inverse diagonal of the metric, then returns
    ``(h0 - L Y, (trace_sup, div_sup))``.  Raises ConvergenceError when the
    divergence of the result stays above ``10 * tol``.
    """
    pack = pack or curvature_pack(bg, keep_riemann=False)
    chart = bg.chart
    shape = chart.shape + (chart.n,)
    h0 = traceless_part(bg, h, pack)
    rhs = divergence_sym2(bg, h0, pack).values.ravel()
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    if scale <= tol:
        return h0, tt_diagnostics(bg, h0, pack)

    def apply(y):
        L = conformal_killing(pack, y.reshape(shape))
        return divergence_sym2(bg, Sym2Field(chart, L), pack).values.ravel()

    # Jacobi scaling by the symbol of the principal part, sum_a g^aa (2/h_a)^2
    sym = sum(pack.inverse[..., a, a] * (2.0 / chart.spacing[a]) ** 2 for a in range(chart.n))
    inv_diag = np.repeat((1.0 / sym).ravel(), chart.n)
    A = LinearOperator((rhs.size, rhs.size), matvec=apply, dtype=float)
    M = LinearOperator((rhs.size, rhs.size), matvec=lambda r: r * inv_diag, dtype=float)
    y, _ = lgmres(A, rhs, M=M, rtol=tol / scale * 0.1, atol=0.0, maxiter=max_iter)
    out = h0 - Sym2Field(chart, conformal_killing(pack, y.reshape(shape)))
    diag = tt_diagnostics(bg, out, pack)
    if diag[1] > 10 * tol:
        raise ConvergenceError("gauge equation did not converge", diag[1])
    return out, diag


def divergence_residual(bg: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> OneForm:
    return divergence_sym2(bg, h, pack)
