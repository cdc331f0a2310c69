"""Finite-difference variations along metric paths and the analytic variation formulas."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .curv import einstein_constants, integrate_density, quotient_field, sigma_k_field
from .errors import AmplitudeError, DomainError, PreconditionError
from .geom.curvature import CurvaturePack, curvature_pack
from .geom.fields import MetricField, ScalarField, Sym2Field, relative_eigenvalues, same_chart
from .geom.harmonics import harmonic_generator, random_polynomial, random_sym2, rotation_field
from .geom.operators import (double_divergence, einstein_operator, grad_norm_sq, hessian,
                             inner, laplace_scalar, lie_derivative_metric, trace, traceless_part,
                             tt_diagnostics)
from .report import CheckRecord, Report

DEFAULT_T_STEP = 5e-3
DEFAULT_CAP = 0.05

# central stencils: offsets (in units of the step) and weights
_STENCILS = {
    (3, 1): ((-1, 1), (-0.5, 0.5)),
    (3, 2): ((-1, 0, 1), (1.0, -2.0, 1.0)),
    (5, 1): ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
    (5, 2): ((-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
}


@dataclass(frozen=True)
class FDResult:
    """A finite-difference derivative and its stencil-disagreement error estimate."""

    value: float | np.ndarray
    error: float | np.ndarray


def sup_operator_norm(h: Sym2Field, bg: MetricField) -> float:
    """max over nodes of |eigenvalues of bg^{-1} h|."""
    return float(np.max(np.abs(relative_eigenvalues(h, bg))))


class PerturbationPath:
    """The metric path g_t = bg + t h with cached metrics and curvature packs.

    The amplitude cap bounds the largest excursion used by the stencil:
    2 * t_step * sup|h|_bg must not exceed ``amplitude_cap``.
    """

    def __init__(self, bg: MetricField, h: Sym2Field, t_step: float = DEFAULT_T_STEP,
                 stencil: int = 5, richardson: bool = True, amplitude_cap: float = DEFAULT_CAP,
                 bg_pack: CurvaturePack | None = None):
        same_chart(bg, h)
        if stencil not in (3, 5):
            raise DomainError("stencil must be 3 or 5 points")
        if not t_step > 0:
            raise DomainError("t_step must be positive")
        self.bg, self.h = bg, h
        self.t_step, self.stencil, self.richardson = float(t_step), stencil, richardson
        self.amplitude_cap = float(amplitude_cap)
        self.h_norm = sup_operator_norm(h, bg)
        reach = (2 if stencil == 5 else 1) * self.t_step * self.h_norm
        if reach > self.amplitude_cap:
            raise AmplitudeError(f"path excursion {reach:.3g} exceeds the amplitude cap {self.amplitude_cap}")
        self._packs: dict[float, CurvaturePack] = {}
        self._metrics: dict[float, MetricField] = {}
        if bg_pack is not None:
            self._packs[0.0] = bg_pack

    @property
    def chart(self):
        return self.bg.chart

    def metric(self, t: float) -> MetricField:
        t = float(t)
        if t == 0.0:
            return self.bg
        if t not in self._metrics:
            self._metrics[t] = self.bg.perturbed(self.h, t)
        return self._metrics[t]

    def pack(self, t: float) -> CurvaturePack:
        t = float(t)
        if t not in self._packs:
            self._packs[t] = self._build(t)
        return self._packs[t]

    def _build(self, t: float) -> CurvaturePack:
        pk = curvature_pack(self.metric(t), keep_riemann=(t == 0.0))
        if t != 0.0:
            # off-background points only feed curvature scalars and the Schouten field
            pk = replace(pk, dmetric=None, christoffel=None, christoffel_lower=None)
        return pk

    def stencil_points(self) -> list[float]:
        offs = set()
        for order in (1, 2):
            o, _ = _STENCILS[(self.stencil, order)]
            offs.update(o)
        steps = [self.t_step, self.t_step / 2]
        return sorted({o * s for o in offs for s in steps})

    def prefetch(self, workers: int = 1) -> None:
        """Build every stencil pack up front, concurrently when ``workers > 1``."""
        todo = [t for t in self.stencil_points() if float(t) not in self._packs]
        if workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                built = list(ex.map(self._build, todo))
        else:
            built = [self._build(t) for t in todo]
        for t, pk in zip(todo, built):
            self._packs[float(t)] = pk

    def _single(self, fn: Callable[[float], object], order: int, step: float):
        offs, wts = _STENCILS[(self.stencil, order)]
        acc = None
        for o, w in zip(offs, wts):
            term = w * np.asarray(fn(o * step), dtype=float)
            acc = term if acc is None else acc + term
        return acc / step ** order

    def derivative(self, fn: Callable[[float], object], order: int) -> FDResult:
        """d^order/dt^order of fn(t) at t = 0."""
        if order not in (1, 2):
            raise DomainError("order must be 1 or 2")
        coarse = self._single(fn, order, self.t_step)
        fine = self._single(fn, order, self.t_step / 2)
        if not self.richardson:
            return FDResult(_unwrap(coarse), _unwrap(np.abs(coarse - fine)))
        p = 4 if self.stencil == 5 else 2
        best = (2 ** p * fine - coarse) / (2 ** p - 1)
        return FDResult(_unwrap(best), _unwrap(np.abs(best - fine)))


def _unwrap(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def fd_functional_derivative(path: PerturbationPath,
                             F: Callable[[MetricField, CurvaturePack], float], order: int) -> FDResult:
    """Derivative of t -> F(g_t) at 0; F receives the metric and its curvature pack."""
    return path.derivative(lambda t: F(path.metric(t), path.pack(t)), order)


def fd_field_variation(path: PerturbationPath,
                       field_map: Callable[[MetricField, CurvaturePack], np.ndarray], order: int) -> FDResult:
    """Node-wise derivative of a field map along the path."""
    def fn(t):
        v = field_map(path.metric(t), path.pack(t))
        return getattr(v, "values", v)
    return path.derivative(fn, order)


# -- standard field maps ---------------------------------------------------------
def scalar_curvature_map(g, pack):
    return pack.scalar


def schouten_map(g, pack):
    return pack.schouten


def sigma_map(k: int):
    return lambda g, pack: sigma_k_field(g, pack, k).values


def quotient_map(k: int, l: int):
    return lambda g, pack: quotient_field(g, pack, k, l).values


# -- perturbation library -------------------------------------------------------------
LIBRARY = ("scaling", "harmonic1", "harmonic2", "random_trace", "random_sym", "gauge", "killing")


def perturbation(name: str, bg: MetricField, pack: CurvaturePack | None = None) -> Sym2Field:
    """A named direction; ``name`` may carry an argument after a colon (index or seed).

    scaling: bg itself.  harmonic1[:i], harmonic2[:i]: u bg with u the degree-1 or
    degree-2 harmonic built on ambient coordinate i (default n+1).
    random_trace:seed: u bg with u a seeded band-limited polynomial of sup 1.
    random_sym:seed: seeded smooth symmetric tensor of unit operator norm.
    gauge: 2 Hess(u) = L_{grad u} bg for the default degree-2 harmonic u.
    killing: L_X bg for the rotation X in the plane of the last two ambient axes.
    """
    chart = bg.chart
    base, _, arg = name.partition(":")
    if base == "scaling":
        return Sym2Field(chart, bg.values)
    if base in ("harmonic1", "harmonic2"):
        index = int(arg) if arg else chart.n + 1
        u = harmonic_generator(chart, int(base[-1]), index)
        return u * Sym2Field(chart, bg.values)
    if base == "random_trace":
        u = random_polynomial(chart, int(arg or 0))
        return u * Sym2Field(chart, bg.values)
    if base == "random_sym":
        return random_sym2(chart, int(arg or 0))
    if base == "gauge":
        u = harmonic_generator(chart, 2, chart.n + 1)
        return hessian(bg, u, pack) * 2.0
    if base == "killing":
        return lie_derivative_metric(bg, rotation_field(chart, chart.n, chart.n + 1), pack)
    raise DomainError(f"unknown perturbation {name!r}; choose from {', '.join(LIBRARY)}")


def is_pure_trace(name: str) -> bool:
    return name.partition(":")[0] in ("scaling", "harmonic1", "harmonic2", "random_trace")


# -- analytic formulas -------------------------------------------------------------
def r_prime_analytic(bg: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> ScalarField:
    """-Delta(tr h) + delta^2 h - (n-1) lam tr h at the round background."""
    same_chart(bg, h)
    pack = pack or curvature_pack(bg)
    chart = bg.chart
    tr = trace(bg, h, pack)
    vals = (-laplace_scalar(bg, tr, pack).values + double_divergence(bg, h, pack).values
            - (chart.n - 1) * chart.lam * tr.values)
    return ScalarField(chart, vals)


def mean_trace(bg: MetricField, h: Sym2Field, pack: CurvaturePack | None = None) -> float:
    same_chart(bg, h)
    sqrt_det = pack.sqrt_det if pack is not None else np.sqrt(np.linalg.det(bg.values))
    tr = trace(bg, h, pack).values
    return integrate_density(bg, tr, sqrt_det) / integrate_density(bg, 1.0, sqrt_det)


@dataclass
class VariationPack:
    """First and second t-derivatives of the Schouten field and R' along a path, plus trace data."""

    path: PerturbationPath
    S1: FDResult
    S2: FDResult
    R1: FDResult
    trace_h: np.ndarray
    h_ring: Sym2Field
    mean_trace: float

    @classmethod
    def build(cls, path: PerturbationPath) -> "VariationPack":
        bg, h = path.bg, path.h
        pk = path.pack(0.0)
        return cls(path=path,
                   S1=fd_field_variation(path, schouten_map, 1),
                   S2=fd_field_variation(path, schouten_map, 2),
                   R1=fd_field_variation(path, scalar_curvature_map, 1),
                   trace_h=trace(bg, h, pk).values,
                   h_ring=traceless_part(bg, h, pk),
                   mean_trace=mean_trace(bg, h, pk))


def require_slice(bg: MetricField, h: Sym2Field, pack: CurvaturePack, tt_tol: float = 1e-6) -> Sym2Field:
    """Trace-free part of h, certified transverse (or negligible against h)."""
    hr = traceless_part(bg, h, pack)
    size = float(np.sqrt(np.max(np.abs(inner(bg, h, h, pack).values))))
    hr_size = float(np.sqrt(np.max(np.abs(inner(bg, hr, hr, pack).values))))
    if hr_size > tt_tol * max(size, 1e-300):
        _, div_sup = tt_diagnostics(bg, hr, pack)
        if div_sup > tt_tol * hr_size:
            raise PreconditionError(f"trace-free part is not transverse (divergence sup {div_sup:.3e}); "
                                    "the formula needs h in TT + C(M) g")
    return hr


# -- comparison helpers ---------------------------------------------------------------
def field_check(name: str, measured: np.ndarray, reference: np.ndarray, mask: np.ndarray,
                tol: float, scale_floor: float, fd_error: np.ndarray | None = None,
                inputs: dict | None = None, **extra) -> CheckRecord:
    """Max node-wise deviation over ``mask`` relative to max(sup|reference|, scale_floor)."""
    m, r = np.asarray(measured)[mask], np.asarray(reference)[mask]
    dev = np.abs(m - r)
    if dev.ndim > 1:
        dev = dev.reshape(dev.shape[0], -1).max(axis=1)
        m = m.reshape(m.shape[0], -1)
        r = r.reshape(r.shape[0], -1)
    i = int(np.argmax(dev))
    scale = max(float(np.max(np.abs(r))), float(scale_floor))
    abs_dev = float(dev[i])
    rel_dev = abs_dev / scale if scale > 0 else (0.0 if abs_dev == 0 else np.inf)
    fd_err = None if fd_error is None else float(np.max(np.asarray(fd_error)[mask]))
    passed = rel_dev <= tol and (fd_err is None or fd_err <= 0.3 * tol * scale)
    mi = m[i] if m.ndim == 1 else m[i][np.argmax(np.abs(m[i] - r[i]))]
    ri = r[i] if r.ndim == 1 else r[i][np.argmax(np.abs(m[i] - r[i]))]
    return CheckRecord(name=name, measured=float(mi), reference=float(ri), abs_dev=abs_dev,
                       rel_dev=rel_dev, tol=tol, passed=bool(passed), inputs=dict(inputs or {}),
                       fd_error=fd_err, extra={"scale": scale, **extra})


def scalar_check(name: str, measured: float, reference: float, tol: float, scale: float,
                 fd_error: float | None = None, inputs: dict | None = None, **extra) -> CheckRecord:
    abs_dev = abs(float(measured) - float(reference))
    rel_dev = abs_dev / scale if scale > 0 else (0.0 if abs_dev == 0 else np.inf)
    passed = rel_dev <= tol and (fd_error is None or fd_error <= 0.3 * tol * scale)
    return CheckRecord(name=name, measured=float(measured), reference=float(reference),
                       abs_dev=abs_dev, rel_dev=rel_dev, tol=tol, passed=bool(passed),
                       inputs=dict(inputs or {}), fd_error=None if fd_error is None else float(fd_error),
                       extra={"scale": scale, **extra})


def _rprime_scale(path: PerturbationPath) -> float:
    """Natural size of R' for the direction: n(n-1) lam sup|h|_bg."""
    chart = path.chart
    return chart.n * (chart.n - 1) * chart.lam * path.h_norm


# -- checks --------------------------------------------------------------------------------
def r_prime_check(path: PerturbationPath, tol: float = 1e-3, label: str = "") -> Report:
    bg, h = path.bg, path.h
    rep = Report("r_prime")
    fd = fd_field_variation(path, scalar_curvature_map, 1)
    ref = r_prime_analytic(bg, h, path.pack(0.0)).values
    rep.add(field_check(f"r_prime[{label}]", fd.value, ref, bg.chart.collar, tol,
                        _rprime_scale(path), fd.error, inputs={"direction": label}))
    return rep


def sigma_k_prime_check(path: PerturbationPath, k: int, tol: float = 1e-3, label: str = "") -> Report:
    """FD sigma_k' against k/(n(n-1)lam) sigma_k(bg) R' on the collar."""
    bg, h = path.bg, path.h
    chart = bg.chart
    n, lam = chart.n, chart.lam
    ec = einstein_constants(n, lam)
    coef = k / (n * (n - 1) * lam) * ec.sigma[k]
    fd = fd_field_variation(path, sigma_map(k), 1)
    ref = coef * r_prime_analytic(bg, h, path.pack(0.0)).values
    rep = Report("sigma_k_prime")
    rep.add(field_check(f"sigma_k_prime[k={k},{label}]", fd.value, ref, chart.collar, tol,
                        abs(coef) * _rprime_scale(path), fd.error, inputs={"k": k, "direction": label}))
    return rep


def quotient_prime_check(path: PerturbationPath, k: int, l: int, tol: float = 1e-3, label: str = "") -> Report:
    """FD (sigma_k/sigma_l)' against (k-l)/(n(n-1)lam) A_kl R'."""
    bg, h = path.bg, path.h
    chart = bg.chart
    n, lam = chart.n, chart.lam
    coef = (k - l) / (n * (n - 1) * lam) * einstein_constants(n, lam).A(k, l)
    fd = fd_field_variation(path, quotient_map(k, l), 1)
    ref = coef * r_prime_analytic(bg, h, path.pack(0.0)).values
    rep = Report("quotient_prime")
    rep.add(field_check(f"quotient_prime[k={k},l={l},{label}]", fd.value, ref, chart.collar, tol,
                        abs(coef) * _rprime_scale(path), fd.error,
                        inputs={"k": k, "l": l, "direction": label}))
    return rep


def quotient_second_variation_rhs(vp: VariationPack, k: int, l: int) -> np.ndarray:
    """Right-hand side of the second-variation formula of sigma_k/sigma_l from FD S', S'', R'."""
    path = vp.path
    chart = path.chart
    n, lam = chart.n, chart.lam
    A = einstein_constants(n, lam).A(k, l)
    inv = path.pack(0.0).inverse
    h = path.h.values
    S1, S2, R1 = vp.S1.value, vp.S2.value, vp.R1.value
    tr_S2 = np.einsum("...ij,...ij->...", inv, S2)
    S1_sq = np.einsum("...ia,...jb,...ij,...ab->...", inv, inv, S1, S1)
    h_S1 = np.einsum("...ia,...jb,...ij,...ab->...", inv, inv, h, S1)
    h_sq = np.einsum("...ia,...jb,...ij,...ab->...", inv, inv, h, h)
    bracket = (tr_S2
               - 2 * (k + l - 1) / ((n - 1) * (n - 2) * lam) * S1_sq
               - 2 * (n - k - l) / (n - 1) * h_S1
               + (n - 2) * (n * (k - l) - (n - 2 * l)) / (2 * n * (n - 1) ** 3 * lam) * R1 ** 2
               + (n - 2) * (2 * n - k - l - 1) / (2 * (n - 1)) * lam * h_sq)
    return 2 * A * (k - l) / (n * (n - 2) * lam) * bracket


def quotient_second_variation_check(path: PerturbationPath, k: int, l: int, tol: float = 1e-2,
                                    label: str = "", vp: VariationPack | None = None) -> Report:
    chart = path.chart
    n, lam = chart.n, chart.lam
    vp = vp or VariationPack.build(path)
    lhs = fd_field_variation(path, quotient_map(k, l), 2)
    rhs = quotient_second_variation_rhs(vp, k, l)
    A = einstein_constants(n, lam).A(k, l)
    # second derivatives of the quotient scale like A (k-l)^2 sup|h|^2
    floor = A * (k - l) * path.h_norm ** 2
    rep = Report("quotient_second_variation")
    rep.add(field_check(f"quotient_second_variation[k={k},l={l},{label}]", lhs.value, rhs,
                        chart.collar, tol, floor, lhs.error,
                        inputs={"k": k, "l": l, "direction": label}))
    return rep


def integration_terms(bg: MetricField, h: Sym2Field, pack: CurvaturePack) -> dict:
    """The integrals that appear on the analytic side of the integration identities."""
    sd = pack.sqrt_det
    I = lambda f: integrate_density(bg, f, sd)  # noqa: E731
    inv = pack.inverse
    hr = traceless_part(bg, h, pack)
    EH = einstein_operator(bg, hr, pack).values
    dot = lambda a, b: np.einsum("...ia,...jb,...ij,...ab->...", inv, inv, a, b)  # noqa: E731
    tr = trace(bg, h, pack)
    lap_tr = laplace_scalar(bg, tr, pack).values
    return {
        "hr_EH": I(dot(hr.values, EH)),
        "EH_sq": I(dot(EH, EH)),
        "hr_sq": I(dot(hr.values, hr.values)),
        "lap_tr_sq": I(lap_tr ** 2),
        "grad_tr_sq": I(grad_norm_sq(bg, tr, pack).values),
        "tr_sq": I(tr.values ** 2),
        "h_sq": I(dot(h.values, h.values)),
    }


def integration_identity_rhs(terms: dict, n: int, lam: float) -> dict:
    T = terms
    return {
        "tr_S2": (-(3 * n - 2) / (4 * (n - 1)) * T["hr_EH"] + (n - 2) / 2 * lam * T["hr_sq"]
                  - (n - 2) ** 2 / (4 * n ** 2) * T["grad_tr_sq"]),
        "S1_sq": (0.25 * T["EH_sq"] - (n - 2) / 2 * lam * T["hr_EH"] + (n - 2) ** 2 / 4 * lam ** 2 * T["hr_sq"]
                  + (n - 2) ** 2 / (4 * n ** 2) * T["lap_tr_sq"]
                  - (n - 1) * (n - 2) ** 2 / (4 * n ** 2) * lam * T["grad_tr_sq"]),
        "h_S1": (-0.5 * T["hr_EH"] + (n - 2) / 2 * lam * T["hr_sq"]
                 + (n - 2) / (2 * n ** 2) * T["grad_tr_sq"]),
        "R1_sq": (n - 1) ** 2 * (T["lap_tr_sq"] / n ** 2 - 2 / n * lam * T["grad_tr_sq"]
                                 + lam ** 2 * T["tr_sq"]),
    }


def integration_identity_check(path: PerturbationPath, tol: float = 1e-2, label: str = "",
                               vp: VariationPack | None = None, tt_tol: float = 1e-6) -> Report:
    """The four integral identities: FD left-hand sides against the analytic combinations."""
    bg, h = path.bg, path.h
    chart = bg.chart
    n, lam = chart.n, chart.lam
    pk = path.pack(0.0)
    require_slice(bg, h, pk, tt_tol)
    vp = vp or VariationPack.build(path)
    inv = pk.inverse
    sd = pk.sqrt_det
    I = lambda f: integrate_density(bg, f, sd)  # noqa: E731
    dot = lambda a, b: np.einsum("...ia,...jb,...ij,...ab->...", inv, inv, a, b)  # noqa: E731
    S1, S2, R1 = vp.S1.value, vp.S2.value, vp.R1.value
    lhs = {
        "tr_S2": I(np.einsum("...ij,...ij->...", inv, S2)),
        "S1_sq": I(dot(S1, S1)),
        "h_S1": I(dot(h.values, S1)),
        "R1_sq": I(R1 ** 2),
    }
    # error propagation of the FD fields into each integral
    e1, e2, eR = vp.S1.error, vp.S2.error, vp.R1.error
    s1n = np.sqrt(np.abs(dot(S1, S1)))
    hn = np.sqrt(np.abs(dot(h.values, h.values)))
    fd_err = {
        "tr_S2": I(n * np.max(np.abs(e2), axis=(-1, -2)) * np.max(np.abs(inv), axis=(-1, -2))),
        "S1_sq": I(2 * s1n * n * np.max(np.abs(e1), axis=(-1, -2)) * np.max(np.abs(inv), axis=(-1, -2))),
        "h_S1": I(hn * n * np.max(np.abs(e1), axis=(-1, -2)) * np.max(np.abs(inv), axis=(-1, -2))),
        "R1_sq": I(2 * np.abs(R1) * eR),
    }
    terms = integration_terms(bg, h, pk)
    rhs = integration_identity_rhs(terms, n, lam)
    rep = Report("integration_identity")
    # identities whose sides both vanish are measured against lam^2 int |h|^2
    floor = {"tr_S2": lam * terms["h_sq"], "S1_sq": lam ** 2 * terms["h_sq"],
             "h_S1": lam * terms["h_sq"], "R1_sq": lam ** 2 * terms["h_sq"]}
    for key in ("tr_S2", "S1_sq", "h_S1", "R1_sq"):
        scale = max(abs(rhs[key]), abs(lhs[key]), floor[key])
        rep.add(scalar_check(f"integration_identity[{key},{label}]", lhs[key], rhs[key], tol, scale,
                             fd_err[key], inputs={"identity": key, "direction": label}))
    return rep


def integral_r_prime_check(bg: MetricField, h: Sym2Field, pack: CurvaturePack | None = None,
                           tol: float = 1e-4, label: str = "") -> Report:
    """int R' dv = -(n-1) lam int tr h dv."""
    pack = pack or curvature_pack(bg)
    chart = bg.chart
    sd = pack.sqrt_det
    rp = integrate_density(bg, r_prime_analytic(bg, h, pack).values, sd)
    trv = trace(bg, h, pack).values
    ref = -(chart.n - 1) * chart.lam * integrate_density(bg, trv, sd)
    scale = max(abs(ref), (chart.n - 1) * chart.lam * integrate_density(bg, np.abs(trv), sd))
    rep = Report("integral_r_prime")
    rep.add(scalar_check(f"integral_r_prime[{label}]", rp, ref, tol, scale, inputs={"direction": label}))
    return rep
