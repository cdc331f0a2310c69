import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlab.curv import (EinsteinConstants, einstein_constants, quotient_field, sigma_fields,
                        sigma_k_field, total_quotient, total_quotient_fixed_bg, volume)
from cvlab.errors import DegenerateDenominatorError, DomainError
from cvlab.geom import MetricField, build_round_sphere, curvature_pack


@given(st.integers(3, 8), st.floats(0.1, 10.0))
def test_einstein_constants_closed_form(n, lam):
    c = einstein_constants(n, lam)
    for k in range(n + 1):
        assert c.sigma[k] == pytest.approx(((n - 2) * lam / 2) ** k * math.comb(n, k), rel=1e-14)
    assert c.A(2, 1) == pytest.approx((n - 1) * (n - 2) * lam / 4)


def test_einstein_constants_validation():
    with pytest.raises(DomainError):
        EinsteinConstants(2, 1.0)
    with pytest.raises(DomainError):
        EinsteinConstants(3, -1.0)


def test_round_sphere_sigma(s3_medium):
    chart, g, pk = s3_medium
    sig = sigma_fields(g, pk)
    for k, ref in enumerate((1.0, 1.5, 0.75, 0.125)):
        assert np.max(np.abs(sig[k].values / ref - 1)) < 1e-5
    q = quotient_field(g, pk, 2, 1).values
    assert np.max(np.abs(q - 0.5)) < 1e-5


@settings(max_examples=4, deadline=None)
@given(st.floats(0.5, 2.0), st.integers(1, 3))
def test_sigma_k_homogeneity(c, k):
    # sigma_k(c^2 g) = c^(-2k) sigma_k(g)
    _, g = build_round_sphere(3, 1.0, 12)
    a = sigma_k_field(g, None, k).values
    b = sigma_k_field(g.scaled(c), None, k).values
    assert np.allclose(b * c ** (2 * k), a, rtol=1e-9)


def test_total_quotient_examples(s3_coarse):
    chart, g, pk = s3_coarse
    vol = 2 * math.pi ** 2
    assert total_quotient(g, pk, 2, 2) == pytest.approx(vol, rel=1e-14)
    assert total_quotient(g, pk, 2, 1) == pytest.approx(0.5 * vol, rel=1e-4)
    assert total_quotient_fixed_bg(g.scaled(2.0), g, None, 2, 1) == pytest.approx(0.125 * vol, rel=1e-4)
    assert volume(g.scaled(2.0)) == pytest.approx(8 * vol, rel=1e-12)


def test_pack_must_match_metric(s3_coarse):
    _, g, pk = s3_coarse
    with pytest.raises(DomainError):
        sigma_fields(g.scaled(2.0), pk)


def test_quotient_index_validation(s3_coarse):
    _, g, pk = s3_coarse
    with pytest.raises(DomainError):
        quotient_field(g, pk, 1, 2)
    with pytest.raises(DomainError):
        sigma_k_field(g, pk, 4)


def test_vanishing_denominator_is_located():
    # flat metric dx^2 + ... on the chart: Schouten vanishes identically
    chart, g = build_round_sphere(3, 1.0, 12)
    flat = MetricField(chart, np.broadcast_to(np.eye(3), chart.shape + (3, 3)).copy())
    with pytest.raises(DegenerateDenominatorError, match="node"):
        quotient_field(flat, curvature_pack(flat, keep_riemann=False), 2, 1)
