"""The key comparison functional: evaluation, scaling, criticality, second variation,
spectral inequalities and the scaling-family comparison experiment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curv import (EinsteinConstants, einstein_constants, integrate_density, quotient_field,
                   total_quotient, total_quotient_fixed_bg, volume)
from .errors import DegeneracyError, DomainError, PreconditionError
from .geom.curvature import CurvaturePack, curvature_pack
from .geom.fields import MetricField, ScalarField, Sym2Field, relative_eigenvalues, same_chart
from .geom.operators import einstein_operator, grad_norm_sq, inner, laplace_scalar, trace, tt_diagnostics
from .report import CheckRecord, Report
from .symcomb import Admissibility, IndexTuple, admissible_indices
from .vary import (PerturbationPath, fd_functional_derivative, integration_terms, require_slice,
                   scalar_check)

EQUALITY_REL = 1e-4
DEFAULT_T_GRID = (-0.04, -0.03, -0.02, -0.01, -0.005, 0.005, 0.01, 0.02, 0.03, 0.04)


@dataclass(frozen=True)
class FunctionalSpec:
    """Indices of H = [int s_p/s_q dv_g]^alpha [int s_k/s_l dv_bg]^beta and the background constants."""

    indices: IndexTuple
    lam: float = 1.0

    def __post_init__(self):
        if not isinstance(self.indices, IndexTuple):
            object.__setattr__(self, "indices", IndexTuple(*self.indices))
        if self.indices.n < 3:
            raise DomainError("the functional needs n >= 3")
        if self.beta == 0:
            raise DomainError("beta = n - 2(p-q) vanishes; the functional degenerates")

    @property
    def alpha(self) -> int:
        return self.indices.alpha

    @property
    def beta(self) -> int:
        return self.indices.beta

    @property
    def constants(self) -> EinsteinConstants:
        return einstein_constants(self.indices.n, self.lam)

    @property
    def admissibility(self) -> Admissibility:
        return admissible_indices(self.indices)

    def closed_form_value(self, vol: float) -> float:
        """H at the background: A_pq^alpha A_kl^beta Vol^(alpha+beta)."""
        t, c = self.indices, self.constants
        return c.A(t.p, t.q) ** self.alpha * c.A(t.k, t.l) ** self.beta * vol ** (self.alpha + self.beta)

    def as_dict(self) -> dict:
        t = self.indices
        return {"n": t.n, "k": t.k, "l": t.l, "p": t.p, "q": t.q, "lambda": self.lam}


def _check_chart(spec: FunctionalSpec, g: MetricField):
    if g.chart.n != spec.indices.n:
        raise DomainError(f"spec is for n={spec.indices.n}, metric lives on S^{g.chart.n}")


def h_factors(spec: FunctionalSpec, g: MetricField, bg: MetricField,
              pack: CurvaturePack | None = None) -> tuple[float, float]:
    _check_chart(spec, g)
    t = spec.indices
    pack = pack or curvature_pack(g, keep_riemann=False)
    return (total_quotient(g, pack, t.p, t.q), total_quotient_fixed_bg(g, bg, pack, t.k, t.l))


def h_eval(spec: FunctionalSpec, g: MetricField, bg: MetricField,
           pack: CurvaturePack | None = None) -> float:
    f1, f2 = h_factors(spec, g, bg, pack)
    if f2 <= 0 and spec.beta < 0:
        raise DegeneracyError(f"fixed-background factor {f2:.3g} cannot carry the power {spec.beta}")
    if f1 == 0:
        raise DegeneracyError("total quotient curvature vanishes")
    return f1 ** spec.alpha * f2 ** spec.beta


def _H(spec, bg):
    return lambda g, pack: h_eval(spec, g, bg, pack)


def scaling_invariance_check(spec: FunctionalSpec, g: MetricField, bg: MetricField, scales,
                             tol: float = 1e-10, pack: CurvaturePack | None = None) -> Report:
    base = h_eval(spec, g, bg, pack)
    rep = Report("scaling_invariance")
    for c in scales:
        value = h_eval(spec, g.scaled(c), bg)
        rep.add(scalar_check(f"scaling_invariance[c={c}]", value, base, tol, abs(base),
                             inputs={"c": c, **spec.as_dict()}))
    return rep


def criticality_check(spec: FunctionalSpec, path: PerturbationPath, tol: float = 1e-6,
                      block_tol: float = 1e-3, label: str = "", blocks: bool = True) -> Report:
    """First variation of H vanishes; both factor derivatives match their closed forms.

    ``blocks=False`` skips the per-factor checks, which are meaningless for
    directions that vanish up to discretisation error (Killing fields).
    """
    bg, h = path.bg, path.h
    _check_chart(spec, bg)
    t = spec.indices
    c = spec.constants
    n = t.n
    pk = path.pack(0.0)
    H0 = h_eval(spec, bg, bg, pk)
    rep = Report("criticality")
    dH = fd_functional_derivative(path, _H(spec, bg), 1)
    rep.add(scalar_check(f"criticality[{label}]", dH.value, 0.0, tol, abs(H0), dH.error,
                         inputs={"direction": label, **spec.as_dict()}, H=H0))
    if not blocks:
        return rep
    trv = trace(bg, h, pk).values
    int_tr = integrate_density(bg, trv, pk.sqrt_det)
    int_abs_tr = integrate_density(bg, np.abs(trv), pk.sqrt_det)
    d_fixed = fd_functional_derivative(path, lambda g, p: total_quotient_fixed_bg(g, bg, p, t.k, t.l), 1)
    coef_fixed = -c.A(t.k, t.l) * (t.k - t.l) / n
    rep.add(scalar_check(f"criticality_fixed_factor[{label}]", d_fixed.value, coef_fixed * int_tr,
                         block_tol, max(abs(coef_fixed * int_tr), abs(coef_fixed) * int_abs_tr),
                         d_fixed.error, inputs={"direction": label, **spec.as_dict()}))
    d_own = fd_functional_derivative(path, lambda g, p: total_quotient(g, p, t.p, t.q), 1)
    coef_own = c.A(t.p, t.q) * (n - 2 * (t.p - t.q)) / (2 * n)
    rep.add(scalar_check(f"criticality_own_factor[{label}]", d_own.value, coef_own * int_tr,
                         block_tol, max(abs(coef_own * int_tr), abs(coef_own) * int_abs_tr, 1e-300),
                         d_own.error, inputs={"direction": label, **spec.as_dict()}))
    return rep


def second_variation_analytic(spec: FunctionalSpec, bg: MetricField, h: Sym2Field,
                              pack: CurvaturePack | None = None, tt_tol: float = 1e-6) -> float:
    """Closed-form D^2 H(bg)(h, h) for h = TT + u bg."""
    _check_chart(spec, bg)
    pack = pack or curvature_pack(bg)
    require_slice(bg, h, pack, tt_tol)
    t = spec.indices
    n, k, l, p, q = t.n, t.k, t.l, t.p, t.q
    lam = bg.chart.lam
    a, b = spec.alpha, spec.beta
    T = integration_terms(bg, h, pack)
    sd = pack.sqrt_det
    vol = volume(bg, pack)
    trv = trace(bg, h, pack).values
    mean = integrate_density(bg, trv, sd) / vol
    var = integrate_density(bg, (trv - mean) ** 2, sd)
    bracket = (-a * (b * (k + l) + 2 * (p * p - q * q) - n) / (2 * n * (n - 1) * (n - 2) ** 2 * lam ** 2) * T["EH_sq"]
               + a / (4 * (n - 1) * lam) * T["hr_EH"]
               - a * (2 * (p - q) * (q - l) + n * l) / (n ** 4 * lam ** 2) * (T["lap_tr_sq"] - n * lam * T["grad_tr_sq"])
               - a * b * (a + b) / (4 * n ** 3 * lam) * (T["grad_tr_sq"] - n * lam * var))
    H0 = h_eval(spec, bg, bg, pack)
    return H0 / vol * bracket


def second_variation_fd_compare(spec: FunctionalSpec, path: PerturbationPath, tol: float = 1e-2,
                                label: str = "", tt_tol: float = 1e-6) -> Report:
    bg = path.bg
    pk = path.pack(0.0)
    analytic = second_variation_analytic(spec, bg, path.h, pk, tt_tol)
    fd = fd_functional_derivative(path, _H(spec, bg), 2)
    H0 = h_eval(spec, bg, bg, pk)
    vol = volume(bg, pk)
    scale = max(abs(analytic), abs(H0) * 1e-6)
    rep = Report("second_variation")
    rep.add(scalar_check(f"second_variation[{label}]", fd.value, analytic, tol, scale, fd.error,
                         inputs={"direction": label, **spec.as_dict()},
                         normalized_fd=fd.value * vol / H0, normalized_analytic=analytic * vol / H0))
    return rep


def _equality_flag(value: float, scale: float) -> bool:
    return abs(value) <= EQUALITY_REL * max(1.0, scale)


def bochner_check(bg: MetricField, u: ScalarField, pack: CurvaturePack | None = None,
                  tol: float = 1e-6, label: str = "") -> Report:
    """int (Delta u)^2 - n lam |grad u|^2 >= 0 on the positive Einstein background."""
    same_chart(bg, u)
    pack = pack or curvature_pack(bg, keep_riemann=False)
    chart = bg.chart
    sd = pack.sqrt_det
    lap = laplace_scalar(bg, u, pack).values
    a = integrate_density(bg, lap ** 2, sd)
    b = chart.n * chart.lam * integrate_density(bg, grad_norm_sq(bg, u, pack).values, sd)
    value = a - b
    rep = Report("bochner")
    rep.add(CheckRecord(name=f"bochner[{label}]", measured=value, reference=0.0, abs_dev=abs(value),
                        rel_dev=None, tol=tol, passed=bool(value >= -tol), inputs={"field": label},
                        extra={"equality": _equality_flag(value, a), "laplace_sq": a, "gradient_term": b}))
    return rep


def obata_check(bg: MetricField, u: ScalarField, pack: CurvaturePack | None = None,
                tol: float = 1e-6, label: str = "") -> Report:
    """int |grad u|^2 - n lam int (u - mean)^2 >= 0, equality on first eigenfunctions and constants."""
    same_chart(bg, u)
    pack = pack or curvature_pack(bg, keep_riemann=False)
    chart = bg.chart
    sd = pack.sqrt_det
    vol = integrate_density(bg, 1.0, sd)
    mean = integrate_density(bg, u.values, sd) / vol
    a = integrate_density(bg, grad_norm_sq(bg, u, pack).values, sd)
    b = chart.n * chart.lam * integrate_density(bg, (u.values - mean) ** 2, sd)
    value = a - b
    rep = Report("obata")
    rep.add(CheckRecord(name=f"obata[{label}]", measured=value, reference=0.0, abs_dev=abs(value),
                        rel_dev=None, tol=tol, passed=bool(value >= -tol), inputs={"field": label},
                        extra={"equality": _equality_flag(value, a), "gradient_term": a, "variance_term": b}))
    return rep


def rayleigh_einstein(bg: MetricField, h: Sym2Field, pack: CurvaturePack | None = None,
                      tt_tol: float = 1e-6) -> float:
    """-int h.Delta_E h / int |h|^2 for a TT-certified h."""
    same_chart(bg, h)
    pack = pack or curvature_pack(bg)
    size = float(np.sqrt(np.max(np.abs(inner(bg, h, h, pack).values))))
    if size <= tt_tol:
        raise PreconditionError("h is numerically zero")
    tr_sup, div_sup = tt_diagnostics(bg, h, pack)
    if tr_sup > tt_tol * size or div_sup > tt_tol * size:
        raise PreconditionError(f"h is not TT (trace sup {tr_sup:.3e}, divergence sup {div_sup:.3e})")
    sd = pack.sqrt_det
    EH = einstein_operator(bg, h, pack)
    num = integrate_density(bg, inner(bg, h, EH, pack).values, sd)
    den = integrate_density(bg, inner(bg, h, h, pack).values, sd)
    return -num / den


def local_max_scan(spec: FunctionalSpec, bg: MetricField, directions: dict, t_grid=DEFAULT_T_GRID,
                   equality: set | None = None, pack: CurvaturePack | None = None,
                   tol: float = 1e-8, flat_tol: float = 1e-4, amplitude_cap: float = 0.05) -> Report:
    """Profiles t -> H(bg + t h) - H(bg) along each direction.

    Directions named in ``equality`` must be near-flat: the quadratic
    coefficient of a cubic fit stays below ``flat_tol |H(bg)|``.  The others
    must not rise above ``tol |H(bg)|`` anywhere on the grid.
    """
    pack = pack or curvature_pack(bg, keep_riemann=False)
    H0 = h_eval(spec, bg, bg, pack)
    equality = set(equality or ())
    ts = np.array(sorted(float(t) for t in t_grid))
    rep = Report("local_max_scan")
    for name, h in directions.items():
        reach = float(np.max(np.abs(ts))) * float(np.max(np.abs(relative_eigenvalues(h, bg))))
        if reach > amplitude_cap:
            raise DomainError(f"direction {name} exceeds the amplitude cap on this t grid")
        prof = np.array([h_eval(spec, bg.perturbed(h, t), bg) - H0 for t in ts])
        coeffs = np.polyfit(ts, prof, 3)  # highest power first
        a2 = float(coeffs[1])
        if name in equality:
            passed = abs(a2) <= flat_tol * abs(H0)
            rel = abs(a2) / abs(H0)
            rec = CheckRecord(name=f"local_max_flat[{name}]", measured=a2, reference=0.0, abs_dev=abs(a2),
                              rel_dev=rel, tol=flat_tol, passed=bool(passed), inputs={"direction": name})
        else:
            worst = float(np.max(prof))
            passed = worst <= tol * abs(H0)
            rec = CheckRecord(name=f"local_max[{name}]", measured=worst, reference=0.0,
                              abs_dev=max(worst, 0.0), rel_dev=worst / abs(H0), tol=tol,
                              passed=bool(passed), inputs={"direction": name})
        rec.inputs.update(spec.as_dict())
        rec.extra = {"H": H0, "quadratic_coefficient": a2, "cubic_fit": [float(c) for c in coeffs],
                     "profile": {"t": ts.tolist(), "delta_H": prof.tolist()}}
        rep.add(rec)
    return rep


def comparison_experiment(spec: FunctionalSpec, bg: MetricField, h: Sym2Field, t: float,
                          pack: CurvaturePack | None = None, equality_rel: float = 1e-9,
                          min_eig: float = 0.1, label: str = "") -> Report:
    """Evaluate the hypothesis and the conclusion of the comparison at g = bg + t h.

    Both sides are compared against the same discretisation of the
    background, so the exact equality at g = bg is reproduced.  Samples
    that violate the hypothesis are recorded as diagnostics with no claim.
    """
    case = spec.admissibility
    if case is Admissibility.INADMISSIBLE:
        raise DomainError(f"index tuple {spec.as_dict()} is inadmissible")
    _check_chart(spec, bg)
    idx = spec.indices
    pack = pack or curvature_pack(bg, keep_riemann=False)
    rel = relative_eigenvalues(Sym2Field(bg.chart, bg.values + t * h.values), bg)
    if float(rel.min()) < min_eig:
        raise DomainError(f"perturbed metric has relative eigenvalue {rel.min():.3g} < {min_eig}")
    g = bg.perturbed(h, t)
    gp = curvature_pack(g, keep_riemann=False)
    c = spec.constants
    Akl = c.A(idx.k, idx.l)
    bg_q = quotient_field(bg, pack, idx.k, idx.l).values
    g_q = quotient_field(g, gp, idx.k, idx.l).values
    diff = g_q - bg_q
    eps = equality_rel * Akl
    lo, hi = float(diff.min()), float(diff.max())
    if case is Admissibility.CASE1:
        hyp = lo >= -eps
    else:
        hyp = hi <= eps
    hyp_equal = max(abs(lo), abs(hi)) <= eps
    I_g = total_quotient(g, gp, idx.p, idx.q)
    I_bg = total_quotient(bg, pack, idx.p, idx.q)
    closed = c.A(idx.p, idx.q) * volume(bg, pack)
    margin = I_bg - I_g
    concl_equal = abs(margin) <= equality_rel * abs(I_bg)
    concl = margin >= -equality_rel * abs(I_bg)
    extra = {"case": case.value, "hypothesis_min": lo, "hypothesis_max": hi,
             "hypothesis_closed_form_min": float((g_q - Akl).min()),
             "hypothesis_closed_form_max": float((g_q - Akl).max()),
             "hypothesis_holds": bool(hyp), "hypothesis_equality": bool(hyp_equal),
             "conclusion_integral": I_g, "background_integral": I_bg,
             "background_closed_form": closed, "conclusion_holds": bool(concl),
             "conclusion_equality": bool(concl_equal)}
    rep = Report("comparison")
    inputs = {"t": t, "direction": label, **spec.as_dict()}
    if not hyp:
        extra["note"] = "hypothesis not satisfied; no claim"
        rep.add(CheckRecord(name=f"comparison[{label},t={t}]", measured=I_g, reference=I_bg,
                            abs_dev=abs(margin), rel_dev=abs(margin) / abs(I_bg), tol=None,
                            passed=True, diagnostic=True, inputs=inputs, extra=extra))
        return rep
    # under the hypothesis the conclusion must hold, with equality exactly at the background
    passed = concl and (concl_equal == hyp_equal)
    rep.add(CheckRecord(name=f"comparison[{label},t={t}]", measured=I_g, reference=I_bg,
                        abs_dev=abs(margin), rel_dev=abs(margin) / abs(I_bg), tol=equality_rel,
                        passed=bool(passed), inputs=inputs, extra=extra))
    return rep
