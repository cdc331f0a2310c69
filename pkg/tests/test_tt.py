import numpy as np
import pytest

from cvlab.errors import ConvergenceError
from cvlab.geom import build_round_sphere, curvature_pack, hessian, harmonic_generator, random_sym2, trace
from cvlab.geom.tt import conformal_killing, tt_project


@pytest.fixture(scope="module")
def small():
    chart, g = build_round_sphere(3, 1.0, 12)
    return chart, g, curvature_pack(g, keep_riemann=False)


def test_pure_trace_projects_to_zero(small):
    chart, g, pk = small
    h = harmonic_generator(chart, 2, 4) * g
    out, (tr_sup, div_sup) = tt_project(g, h, pack=pk)
    assert np.max(np.abs(out.values)) < 1e-12
    assert tr_sup < 1e-12


def test_conformal_killing_of_gradient_is_traceless(small):
    chart, g, pk = small
    u = harmonic_generator(chart, 2, 4)
    du = chart.gradient(u.values)
    L = conformal_killing(pk, du)
    assert np.max(np.abs(np.einsum("...ij,...ij->...", pk.inverse, L))) < 1e-10
    # L(du) is twice the trace-free Hessian
    H = hessian(g, u, pk).values
    ref = 2 * (H - (trace(g, hessian(g, u, pk), pk).values / 3)[..., None, None] * g.values)
    assert np.max(np.abs(L - ref)) < 1e-5


def test_gauge_direction_converges(small):
    chart, g, pk = small
    u = harmonic_generator(chart, 2, 4)
    h = hessian(g, u, pk) * 2.0
    out, (tr_sup, div_sup) = tt_project(g, h, tol=1e-4, max_iter=100, pack=pk)
    assert tr_sup < 1e-10 and div_sup < 1e-3
    # a pure gauge tensor has no TT part
    assert np.max(np.abs(out.values)) < 1e-2 * np.max(np.abs(h.values))


def test_reports_nonconvergence(small):
    chart, g, pk = small
    with pytest.raises(ConvergenceError) as info:
        tt_project(g, random_sym2(chart, 0), tol=1e-12, max_iter=1, pack=pk)
    assert info.value.residual > 0
