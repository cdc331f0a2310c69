import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlab.errors import DomainError
from cvlab.geom import (Chart, ScalarField, Sym2Field, build_round_sphere, divergence_sym2,
                        double_divergence, double_divergence_direct, einstein_operator,
                        grad_norm_sq, harmonic_generator, hessian, inner, integrate,
                        laplace_hessian_form, laplace_scalar, lie_derivative_metric, random_sym2,
                        rotation_field, trace, traceless_part, tt_diagnostics, volume)


@pytest.mark.parametrize("degree,index", [(1, 1), (1, 4), (2, 2), (2, 4)])
def test_laplace_on_harmonics(s3_medium, degree, index):
    chart, g, pk = s3_medium
    u = harmonic_generator(chart, degree, index)
    ev = degree * (degree + 2)
    lap = laplace_scalar(g, u, pk).values
    assert np.max(np.abs(lap + ev * u.values)) < 1e-5 * ev


def test_integrals_of_harmonics(s3_coarse):
    chart, g, pk = s3_coarse
    u1 = harmonic_generator(chart, 1, 4)
    u2 = harmonic_generator(chart, 2, 4)
    assert integrate(chart, u1 * u1, g) == pytest.approx(math.pi ** 2 / 2, rel=1e-12)
    assert integrate(chart, u2 * u2, g) == pytest.approx(math.pi ** 2 / 8, rel=1e-12)
    assert integrate(chart, grad_norm_sq(g, u1, pk), g) == pytest.approx(1.5 * math.pi ** 2, rel=1e-6)
    assert volume(g, pk) == pytest.approx(2 * math.pi ** 2, rel=1e-14)


def test_integrate_rejects_foreign_field(s3_coarse):
    _, g, _ = s3_coarse
    with pytest.raises(DomainError):
        integrate(Chart(3, 1.0, 12), ScalarField.constant(Chart(3, 1.0, 12), 1.0), g)


def test_hessian_trace_and_bochner_density(s3_medium):
    chart, g, pk = s3_medium
    u = harmonic_generator(chart, 2, 4)
    H = hessian(g, u, pk)
    assert np.max(np.abs(trace(g, H, pk).values - laplace_scalar(g, u, pk).values)) < 1e-5 * 8
    lh = laplace_hessian_form(g, u, pk).values
    assert np.max(np.abs(lh + 8 * u.values)) < 1e-5


def test_double_divergence_forms(s3_medium):
    chart, g, pk = s3_medium
    h = random_sym2(chart, 5)
    a = double_divergence(g, h, pk).values
    b = double_divergence_direct(g, h, pk).values
    assert np.max(np.abs(a - b)[chart.collar]) < 1e-4 * np.max(np.abs(b))


def test_metric_is_divergence_free(s3_coarse):
    _, g, pk = s3_coarse
    assert np.max(np.abs(divergence_sym2(g, g, pk).values)) < 1e-8
    tr_sup, div_sup = tt_diagnostics(g, g, pk)
    assert tr_sup == pytest.approx(3.0)
    assert div_sup < 1e-8


def test_einstein_operator_on_metric(s3_coarse):
    _, g, pk = s3_coarse
    assert np.max(np.abs(einstein_operator(g, g, pk).values - 4 * g.values)) < 1e-5


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_traceless_part_has_no_trace(seed):
    _, g = build_round_sphere(3, 1.0, 8)
    h = random_sym2(g.chart, seed)
    hr = traceless_part(g, h)
    assert np.max(np.abs(trace(g, hr).values)) < 1e-12
    assert np.all(inner(g, h, h).values >= -1e-14)


@pytest.mark.parametrize("a,b", [(1, 2), (3, 4), (1, 4)])
def test_rotations_are_killing(s3_medium, a, b):
    chart, g, pk = s3_medium
    L = lie_derivative_metric(g, rotation_field(chart, a, b), pk)
    assert np.max(np.abs(L.values)) < 1e-6


def test_gradient_field_is_not_killing(s3_coarse):
    chart, g, pk = s3_coarse
    u = harmonic_generator(chart, 2, 4)
    # L_{grad u} g = 2 Hess u, non-zero for a non-constant u
    assert np.max(np.abs(hessian(g, u, pk).values)) > 0.1
    h = Sym2Field(chart, 2.0 * hessian(g, u, pk).values)
    assert np.max(np.abs(trace(g, h, pk).values + 16 * u.values)) < 1e-5
