import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvlab.errors import DomainError, PreconditionError
from cvlab.funlab import (FunctionalSpec, bochner_check, comparison_experiment, criticality_check,
                          h_eval, h_factors, local_max_scan, obata_check, rayleigh_einstein,
                          scaling_invariance_check, second_variation_analytic,
                          second_variation_fd_compare)
from cvlab.geom import ScalarField, Sym2Field, harmonic_generator, random_polynomial
from cvlab.symcomb import Admissibility, IndexTuple
from cvlab.vary import PerturbationPath, perturbation

SPEC = FunctionalSpec(IndexTuple(3, 2, 1, 2, 1))


def test_spec_properties():
    assert (SPEC.alpha, SPEC.beta) == (2, 1)
    assert SPEC.admissibility is Admissibility.CASE1
    assert SPEC.closed_form_value(2 * math.pi ** 2) == pytest.approx(0.125 * (2 * math.pi ** 2) ** 3)
    with pytest.raises(DomainError):
        FunctionalSpec((4, 2, 1, 3, 1))


def test_h_background_value(s3_coarse):
    _, g, pk = s3_coarse
    assert h_eval(SPEC, g, g, pk) == pytest.approx(0.125 * (2 * math.pi ** 2) ** 3, rel=1e-6)


def test_h_rejects_other_dimension(s3_coarse):
    _, g, pk = s3_coarse
    with pytest.raises(DomainError):
        h_eval(FunctionalSpec((4, 2, 1, 2, 1)), g, g, pk)


def test_equal_own_indices_reduce_to_volume(s3_coarse):
    # (p, q) = (q, q): first factor is Vol(g)
    _, g, pk = s3_coarse
    spec = FunctionalSpec((3, 2, 1, 1, 1))
    f1, f2 = h_factors(spec, g, g, pk)
    assert f1 == pytest.approx(2 * math.pi ** 2, rel=1e-12)
    assert h_eval(spec, g, g, pk) == pytest.approx(f1 ** spec.alpha * f2 ** spec.beta, rel=1e-12)


@settings(max_examples=5, deadline=None)
@given(st.floats(0.5, 2.0))
def test_scaling_invariance_property(c):
    from cvlab.geom import build_round_sphere
    _, g = build_round_sphere(3, 1.0, 12)
    assert scaling_invariance_check(SPEC, g, g, [c], tol=1e-10).passed


def test_criticality_and_second_variation(s3_medium):
    _, g, pk = s3_medium
    path = PerturbationPath(g, perturbation("harmonic2", g, pk), bg_pack=pk)
    rep = criticality_check(SPEC, path, label="h2")
    assert [c.name for c in rep.checks][0] == "criticality[h2]"
    assert rep.passed
    sv = second_variation_fd_compare(SPEC, path, 1e-2, "h2").checks[0]
    assert sv.passed
    assert sv.extra["normalized_analytic"] == pytest.approx(-175 / 48 * math.pi ** 2, rel=1e-3)


def test_second_variation_needs_slice(s3_coarse):
    _, g, pk = s3_coarse
    with pytest.raises(PreconditionError):
        second_variation_analytic(SPEC, g, perturbation("random_sym:0", g, pk), pk)


def test_bochner_and_obata_equality_cases(s3_coarse):
    chart, g, pk = s3_coarse
    for u, equal in ((ScalarField.constant(chart, 2.0), True),
                     (harmonic_generator(chart, 1, 3), True),
                     (harmonic_generator(chart, 2, 4), False),
                     (random_polynomial(chart, 7), False)):
        for check in (bochner_check, obata_check):
            rec = check(g, u, pk).checks[0]
            assert rec.passed and rec.measured >= -1e-6
            assert rec.extra["equality"] is equal


def test_rayleigh_needs_tt(s3_coarse):
    _, g, pk = s3_coarse
    with pytest.raises(PreconditionError):
        rayleigh_einstein(g, perturbation("random_sym:0", g, pk), pk)
    with pytest.raises(PreconditionError):
        rayleigh_einstein(g, Sym2Field.zeros(g.chart), pk)


def test_local_max_scan_profiles(s3_coarse):
    _, g, pk = s3_coarse
    dirs = {"scaling": Sym2Field(g.chart, g.values), "harmonic2": perturbation("harmonic2", g, pk)}
    rep = local_max_scan(SPEC, g, dirs, (-0.02, -0.01, 0.01, 0.02), equality={"scaling"}, pack=pk)
    assert rep.passed
    prof = rep["local_max[harmonic2]"].extra["profile"]
    assert len(prof["t"]) == 4 and max(prof["delta_H"]) < 0


def test_local_max_scan_amplitude(s3_coarse):
    _, g, pk = s3_coarse
    with pytest.raises(DomainError):
        local_max_scan(SPEC, g, {"big": Sym2Field(g.chart, 10 * g.values)}, (0.04,), pack=pk)


@pytest.mark.parametrize("c,holds", [(0.95, True), (1.0, True), (1.05, False)])
def test_comparison_scaling_family(s3_coarse, c, holds):
    _, g, pk = s3_coarse
    rec = comparison_experiment(SPEC, g, Sym2Field(g.chart, g.values), c * c - 1, pk).checks[0]
    assert rec.extra["hypothesis_holds"] is holds
    assert rec.extra["conclusion_holds"] is holds
    assert rec.diagnostic is (not holds)
    assert rec.measured == pytest.approx(c * rec.reference, rel=1e-6)
    assert rec.extra["conclusion_equality"] is (c == 1.0)


def test_comparison_rejects_inadmissible(s3_coarse):
    _, g, pk = s3_coarse
    spec = FunctionalSpec((5, 2, 1, 4, 1))
    with pytest.raises(DomainError):
        comparison_experiment(spec, g, Sym2Field(g.chart, g.values), 0.0, pk)
