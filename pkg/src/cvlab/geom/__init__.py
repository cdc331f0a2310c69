"""Discrete Riemannian geometry on a single hyperspherical chart."""
from .chart import Chart, central_weights, fejer_weights
from .curvature import CurvaturePack, curvature_pack
from .fields import (MetricField, OneForm, ScalarField, Sym2Field, build_round_sphere,
                     relative_eigenvalues, round_metric, same_chart)
from .harmonics import (ambient_pullback, harmonic_generator, random_polynomial, random_sym2,
                        rotation_field, round_operator_norm)
from .jacobi import jacobi_eigenvalues
from .operators import (divergence_oneform, divergence_sym2, double_divergence,
                        double_divergence_direct, einstein_operator, grad_norm_sq, gradient,
                        hessian, inner, integrate, laplace_hessian_form, laplace_scalar,
                        lie_derivative_metric, tt_diagnostics, trace, traceless_part, volume)

__all__ = [
    "Chart", "central_weights", "fejer_weights", "CurvaturePack", "curvature_pack",
    "MetricField", "OneForm", "ScalarField", "Sym2Field", "build_round_sphere",
    "relative_eigenvalues", "round_metric", "same_chart", "ambient_pullback",
    "harmonic_generator", "random_polynomial", "random_sym2", "rotation_field",
    "round_operator_norm", "jacobi_eigenvalues", "divergence_oneform", "divergence_sym2",
    "double_divergence", "double_divergence_direct", "einstein_operator", "grad_norm_sq",
    "gradient", "hessian", "inner", "integrate", "laplace_hessian_form", "laplace_scalar",
    "lie_derivative_metric", "tt_diagnostics", "trace", "traceless_part", "volume",
]
