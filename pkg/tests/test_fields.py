import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlab.errors import AmplitudeError, DomainError
from cvlab.geom import (Chart, MetricField, ScalarField, Sym2Field, build_round_sphere,
                        relative_eigenvalues, round_metric, same_chart)


@pytest.fixture(scope="module")
def chart():
    return Chart(3, 1.0, 8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_sym2_is_exactly_symmetric(seed):
    chart = Chart(3, 1.0, 8)
    v = np.random.default_rng(seed).standard_normal(chart.shape + (3, 3))
    h = Sym2Field(chart, v)
    assert np.array_equal(h.values, np.swapaxes(h.values, -1, -2))


def test_rejects_wrong_shape_and_nonfinite(chart):
    with pytest.raises(DomainError):
        ScalarField(chart, np.zeros((8, 8)))
    bad = np.zeros(chart.shape)
    bad[0, 0, 0] = np.nan
    with pytest.raises(DomainError):
        ScalarField(chart, bad)


def test_metric_must_be_positive(chart):
    g = round_metric(chart)
    v = g.values.copy()
    v[1, 2, 3] = -v[1, 2, 3]
    with pytest.raises(AmplitudeError):
        MetricField(chart, v)


def test_scalar_algebra(chart):
    u = ScalarField.constant(chart, 2.0)
    w = u * u + 1.0 - u
    assert np.all(w.values == 3.0)
    assert (-u).sup() == 2.0


def test_sym2_algebra(chart):
    g = round_metric(chart)
    h = ScalarField.constant(chart, 3.0) * Sym2Field(chart, g.values)
    assert np.allclose((h - g).values, 2 * g.values)
    assert np.allclose(relative_eigenvalues(h, g), 3.0)


def test_scaled_and_perturbed(chart):
    g = round_metric(chart)
    assert np.allclose(g.scaled(2.0).values, 4 * g.values)
    assert np.allclose(g.perturbed(Sym2Field(chart, g.values), 0.5).values, 1.5 * g.values)


def test_same_chart_mismatch():
    a = ScalarField.constant(Chart(3, 1.0, 8), 1.0)
    b = ScalarField.constant(Chart(3, 1.0, 10), 1.0)
    with pytest.raises(DomainError):
        same_chart(a, b)


def test_upper_triangle_layout(chart):
    _, g = build_round_sphere(3, 1.0, 8)
    up = g.upper()
    assert up.shape == (chart.size, 6)
    assert np.array_equal(up[:, 0], g.values.reshape(-1, 3, 3)[:, 0, 0])
    assert np.array_equal(up[:, 3], g.values.reshape(-1, 3, 3)[:, 1, 1])
