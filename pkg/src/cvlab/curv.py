"""sigma_k and quotient curvature fields, total curvatures and Einstein closed forms."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominatorError, DomainError
from .geom.curvature import CurvaturePack, curvature_pack
from .geom.fields import MetricField, ScalarField, same_chart
from .symcomb import binomial, sigma_from_power_sums

DENOMINATOR_FLOOR = 1e-8


@dataclass(frozen=True)
class EinsteinConstants:
    """Closed-form sigma_k and quotient values of an Einstein metric with Ric = (n-1) lam g."""

    n: int
    lam: float
    sigma: tuple[float, ...] = field(init=False)
    quotient: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 3:
            raise DomainError("n must be at least 3")
        if not self.lam > 0:
            raise DomainError("lambda must be positive")
        base = (self.n - 2) * self.lam / 2.0
        sig = tuple(base ** k * binomial(self.n, k) for k in range(self.n + 1))
        object.__setattr__(self, "sigma", sig)
        table = {(k, l): sig[k] / sig[l] for k in range(self.n + 1) for l in range(k)}
        object.__setattr__(self, "quotient", table)

    def A(self, k: int, l: int) -> float:
        """sigma_k / sigma_l for any 0 <= k, l <= n."""
        return self.sigma[k] / self.sigma[l]


def einstein_constants(n: int, lam: float = 1.0) -> EinsteinConstants:
    return EinsteinConstants(n, lam)


def _pack_for(g: MetricField, pack: CurvaturePack | None) -> CurvaturePack:
    if pack is None:
        return curvature_pack(g, keep_riemann=False)
    if pack.metric is not g:
        same_chart(pack.metric, g)
        if not np.array_equal(pack.metric.values, g.values):
            raise DomainError("curvature pack was built from a different metric")
    return pack


def schouten_power_sums(pack: CurvaturePack, kmax: int) -> np.ndarray:
    """tr(S^m) of the mixed Schouten endomorphism for m = 1..kmax, stacked on the last axis."""
    E = pack.schouten_endomorphism()
    out = np.empty(E.shape[:-2] + (max(kmax, 0),))
    P = E
    for m in range(kmax):
        if m:
            P = np.einsum("...ij,...jk->...ik", P, E)
        out[..., m] = np.trace(P, axis1=-2, axis2=-1)
    return out


def sigma_fields(g: MetricField, pack: CurvaturePack | None = None, kmax: int | None = None) -> list[ScalarField]:
    """[sigma_0, ..., sigma_kmax] of the Schouten endomorphism g^{-1} S."""
    pack = _pack_for(g, pack)
    n = g.chart.n
    kmax = n if kmax is None else kmax
    if not 0 <= kmax <= n:
        raise DomainError(f"k must lie in 0..{n}")
    ps = schouten_power_sums(pack, kmax)
    out = [ScalarField(g.chart, np.ones(g.chart.shape))]
    for k in range(1, kmax + 1):
        out.append(ScalarField(g.chart, sigma_from_power_sums(ps, k)))
    return out


def sigma_k_field(g: MetricField, pack: CurvaturePack | None, k: int) -> ScalarField:
    n = g.chart.n
    if not 0 <= k <= n:
        raise DomainError(f"k must lie in 0..{n}, got {k}")
    return sigma_fields(g, pack, k)[k]


def quotient_field(g: MetricField, pack: CurvaturePack | None, k: int, l: int) -> ScalarField:
    """sigma_k / sigma_l node-wise; a vanishing denominator raises with its node."""
    n = g.chart.n
    if not 0 <= l <= k <= n:
        raise DomainError(f"need 0 <= l <= k <= n, got k={k}, l={l}")
    sig = sigma_fields(g, pack, k)
    den = sig[l].values
    floor = DENOMINATOR_FLOOR * abs(einstein_constants(n, g.chart.lam).sigma[l])
    bad = np.abs(den) < floor
    if np.any(bad):
        node = tuple(int(i) for i in np.argwhere(bad)[0])
        raise DegenerateDenominatorError(f"sigma_{l} vanishes at node {node}")
    return ScalarField(g.chart, sig[k].values / den)


def integrate_density(g: MetricField, f: np.ndarray, sqrt_det: np.ndarray) -> float:
    return float(np.sum(g.chart.weights * f * sqrt_det))


def volume(g: MetricField, pack: CurvaturePack | None = None) -> float:
    sqrt_det = pack.sqrt_det if pack is not None else np.sqrt(np.linalg.det(g.values))
    return integrate_density(g, 1.0, sqrt_det)


def total_quotient(g: MetricField, pack: CurvaturePack | None, p: int, q: int) -> float:
    """Integral of sigma_p / sigma_q against the volume form of g."""
    pack = _pack_for(g, pack)
    if p == q:
        return volume(g, pack)
    return integrate_density(g, quotient_field(g, pack, p, q).values, pack.sqrt_det)


def total_quotient_fixed_bg(g: MetricField, bg: MetricField, pack: CurvaturePack | None,
                            k: int, l: int) -> float:
    """Integral of sigma_k(g) / sigma_l(g) against the volume form of the background."""
    same_chart(g, bg)
    pack = _pack_for(g, pack)
    bg_sqrt = np.sqrt(np.linalg.det(bg.values))
    if k == l:
        return integrate_density(bg, 1.0, bg_sqrt)
    return integrate_density(bg, quotient_field(g, pack, k, l).values, bg_sqrt)
