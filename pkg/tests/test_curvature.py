import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlab.errors import ConditioningError
from cvlab.geom import MetricField, build_round_sphere, curvature_pack


def test_round_s3_curvature(s3_medium):
    chart, g, pk = s3_medium
    assert np.max(np.abs(pk.scalar - 6.0)) < 1e-5
    assert np.max(np.abs(pk.ricci - 2.0 * g.values)) < 1e-5
    assert np.max(np.abs(pk.schouten - 0.5 * g.values)) < 1e-5


def test_riemann_symmetries(s3_coarse):
    _, _, pk = s3_coarse
    R = pk.riemann
    scale = np.max(np.abs(R))
    assert np.max(np.abs(R + np.swapaxes(R, -4, -3))) <= 1e-12 * scale
    assert np.max(np.abs(R + np.swapaxes(R, -2, -1))) <= 1e-12 * scale
    pair = np.moveaxis(R, (-4, -3), (-2, -1))
    assert np.max(np.abs(R - pair)) < 1e-4 * scale
    bianchi = R + np.einsum("...jkil->...ijkl", R) + np.einsum("...kijl->...ijkl", R)
    assert np.max(np.abs(bianchi)) < 1e-4 * scale


def test_christoffel_symmetric(s3_coarse):
    _, _, pk = s3_coarse
    G = pk.christoffel
    assert np.array_equal(G, np.swapaxes(G, -1, -2))


@settings(max_examples=5, deadline=None)
@given(st.floats(0.3, 3.0))
def test_scalar_curvature_scales(c):
    # R(c^2 g) = R(g) / c^2
    _, g = build_round_sphere(3, 1.0, 12)
    base = curvature_pack(g, keep_riemann=False).scalar
    scaled = curvature_pack(g.scaled(c), keep_riemann=False).scalar
    assert np.allclose(scaled * c * c, base, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_curvature_of_lambda_sphere(lam):
    _, g = build_round_sphere(3, lam, 20)
    pk = curvature_pack(g, keep_riemann=False)
    assert np.max(np.abs(pk.scalar / (6 * lam) - 1)) < 1e-5


@pytest.mark.parametrize("n,res,tol", [(4, 20, 1e-3), (5, 12, 2e-2)])
def test_higher_dimensions_on_collar(n, res, tol):
    chart, g = build_round_sphere(n, 1.0, res)
    pk = curvature_pack(g, keep_riemann=False)
    R0 = n * (n - 1)
    assert np.max(np.abs(pk.scalar - R0)[chart.collar]) < tol * R0


def test_convergence_order():
    errs = []
    for res in (12, 16, 20):
        _, g = build_round_sphere(3, 1.0, res)
        errs.append(np.max(np.abs(curvature_pack(g, keep_riemann=False).scalar - 6.0)))
    slope = np.polyfit(np.log([12, 16, 20]), np.log(errs), 1)[0]
    assert slope < -3.5


def test_drop_riemann():
    _, g = build_round_sphere(3, 1.0, 12)
    assert curvature_pack(g, keep_riemann=False).riemann is None


def test_nearly_singular_metric_rejected():
    chart, g = build_round_sphere(3, 1.0, 12)
    v = g.values.copy()
    # make rows 0 and 1 nearly parallel at one node
    node = (3, 4, 5)
    a, b = v[node][0, 0], v[node][1, 1]
    v[node][0, 1] = v[node][1, 0] = np.sqrt(a * b) * (1 - 1e-12)
    with pytest.raises(ConditioningError):
        curvature_pack(MetricField(chart, v))
