"""Hyperspherical coordinate chart on S^n with parity-aware finite differences.

Angles are theta_1..theta_{n-1} in (0, pi) on half-cell offset grids and an
azimuth phi in [0, 2 pi).  Ghost cells beyond a pole are filled from the
antipodal image inside the grid (theta -> -theta is the same point as
reflecting every later polar angle and rotating phi by pi), so every node
gets a centred stencil and no node sits on a coordinate singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from ..errors import DomainError

SUPPORTED_DIMENSIONS = (3, 4, 5)
DEFAULT_RESOLUTION = {3: 32, 4: 20, 5: 12}
DEFAULT_ORDER = 12
COLLAR = 0.2


@lru_cache(maxsize=None)
def central_weights(order: int, deriv: int) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Exact central finite-difference weights on integer offsets.

    Solves the moment conditions sum_o w_o o^m = m! [m == deriv] in rational
    arithmetic for offsets -order/2..order/2.
    """
    if order % 2 or order < 2:
        raise DomainError("stencil order must be an even integer >= 2")
    m = order // 2
    offs = list(range(-m, m + 1))
    size = len(offs)
    rows = [[Fraction(o) ** p for o in offs] + [Fraction(math.factorial(deriv) if p == deriv else 0)]
            for p in range(size)]
    for col in range(size):
        piv = next(r for r in range(col, size) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return tuple(offs), tuple(float(rows[i][-1]) for i in range(size))


def fejer_weights(count: int) -> np.ndarray:
    """Fejer's first rule on x = cos(theta_j), theta_j = (j + 1/2) pi / count."""
    theta = (np.arange(count) + 0.5) * np.pi / count
    k = np.arange(1, count // 2 + 1)
    s = np.cos(2.0 * np.outer(theta, k)) / (4.0 * k * k - 1.0)
    return (2.0 / count) * (1.0 - 2.0 * s.sum(axis=1))


@dataclass(frozen=True)
class Chart:
    """Grid on the round n-sphere of curvature ``lam`` (radius 1/sqrt(lam))."""

    n: int
    lam: float = 1.0
    resolution: tuple[int, ...] | None = None
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if self.n not in SUPPORTED_DIMENSIONS:
            raise DomainError(f"dimension {self.n} not supported (use one of {SUPPORTED_DIMENSIONS})")
        if not self.lam > 0:
            raise DomainError("lambda must be positive")
        res = self.resolution
        if res is None:
            res = (DEFAULT_RESOLUTION[self.n],) * self.n
        elif isinstance(res, (int, np.integer)):
            res = (int(res),) * self.n
        res = tuple(int(r) for r in res)
        if len(res) != self.n:
            raise DomainError(f"need {self.n} per-axis counts, got {len(res)}")
        if any(r < 8 for r in res):
            raise DomainError("every axis needs at least 8 nodes")
        if res[-1] % 2:
            raise DomainError("azimuthal count must be even (antipodal ghost cells)")
        if self.order // 2 > min(res):
            raise DomainError("stencil wider than the grid")
        object.__setattr__(self, "resolution", res)
        object.__setattr__(self, "lam", float(self.lam))
        central_weights(self.order, 1)

    # -- geometry of the grid -------------------------------------------------
    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(self.lam)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.resolution

    @property
    def size(self) -> int:
        return int(np.prod(self.resolution))

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        polar = tuple(math.pi / r for r in self.resolution[:-1])
        return polar + (2.0 * math.pi / self.resolution[-1],)

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        out = [(np.arange(r) + 0.5) * math.pi / r for r in self.resolution[:-1]]
        out.append(np.arange(self.resolution[-1]) * 2.0 * math.pi / self.resolution[-1])
        return tuple(out)

    @cached_property
    def angles(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    @cached_property
    def round_metric_diagonal(self) -> np.ndarray:
        """Diagonal of the round metric r^2 diag(1, s1^2, s1^2 s2^2, ...)."""
        out = np.empty(self.shape + (self.n,))
        f = np.full(self.shape, self.radius ** 2)
        for i in range(self.n):
            out[..., i] = f
            if i < self.n - 1:
                f = f * np.sin(self.angles[i]) ** 2
        return out

    @cached_property
    def axis_weights(self) -> tuple[np.ndarray, ...]:
        """Coordinate quadrature weights per axis.

        The round density carries sin^(n-1-i) on polar axis i.  Even powers
        make the integrand a smooth periodic function (midpoint rule); odd
        powers leave one factor of sin, absorbed by Fejer's rule.
        """
        out = []
        for i, count in enumerate(self.resolution[:-1]):
            power = self.n - 1 - i
            if power % 2:
                out.append(fejer_weights(count) / np.sin(self.axes[i]))
            else:
                out.append(np.full(count, math.pi / count))
        out.append(np.full(self.resolution[-1], 2.0 * math.pi / self.resolution[-1]))
        return tuple(out)

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.ones(())
        for a in self.axis_weights:
            w = np.multiply.outer(w, a)
        return w

    @cached_property
    def collar(self) -> np.ndarray:
        """Boolean mask of nodes whose polar angles all lie in [0.2, pi - 0.2]."""
        mask = np.ones(self.shape, dtype=bool)
        for a in self.angles[:-1]:
            mask &= (a >= COLLAR) & (a <= math.pi - COLLAR)
        return mask

    # -- embedding ----------------------------------------------------------------
    def _factor_codes(self):
        # X_A = prod_i f_{A,i}(theta_i); code 0: 1, 1: sin, 2: cos
        n = self.n
        codes = []
        for A in range(n + 1):
            if A == 0:
                c = [1] * (n - 1) + [1]
            else:
                m = n - A
                c = [1] * m + [2] + [0] * (n - m - 1)
            codes.append(c)
        return codes

    @cached_property
    def ambient(self) -> np.ndarray:
        """Unit-sphere ambient coordinates X_0..X_n; x_j (1-based) is X_{j-1}."""
        out = np.ones((self.n + 1,) + self.shape)
        for A, code in enumerate(self._factor_codes()):
            for i, c in enumerate(code):
                if c == 1:
                    out[A] *= np.sin(self.angles[i])
                elif c == 2:
                    out[A] *= np.cos(self.angles[i])
        return out

    @cached_property
    def ambient_jacobian(self) -> np.ndarray:
        """d X_A / d theta_i on the unit sphere, shape (n+1, grid..., n)."""
        out = np.ones((self.n + 1,) + self.shape + (self.n,))
        s = [np.sin(a) for a in self.angles]
        c = [np.cos(a) for a in self.angles]
        for A, code in enumerate(self._factor_codes()):
            for i in range(self.n):
                prod = np.ones(self.shape)
                for j, f in enumerate(code):
                    if j == i:
                        prod = prod * (c[j] if f == 1 else -s[j] if f == 2 else 0.0)
                    elif f == 1:
                        prod = prod * s[j]
                    elif f == 2:
                        prod = prod * c[j]
                out[A, ..., i] = prod
        return out

    # -- finite differences -----------------------------------------------------
    def parity_signs(self, axis: int) -> np.ndarray:
        """Coordinate-direction signs of the reflection through a pole of ``axis``."""
        s = np.ones(self.n)
        if axis < self.n - 1:
            s[axis:self.n - 1] = -1.0
        return s

    def pad(self, values: np.ndarray, axis: int, width: int, rank: int = 0,
            density: bool = False, fixed: tuple[int, ...] = ()) -> np.ndarray:
        """Extend ``values`` by ``width`` ghost layers on both ends of ``axis``.

        ``values`` has the grid axes first (axis 0 may be a contiguous block
        only when ``axis != 0``) followed by ``rank`` tensor indices.
        Tensor components pick up the reflection sign of each index;
        densities also pick up the Jacobian determinant.  ``fixed`` lists
        coordinate indices of tensor slots already sliced away, whose signs
        still apply.
        """
        n = self.n
        count = values.shape[axis]
        if axis == n - 1:
            lo = values.take(range(count - width, count), axis=axis)
            hi = values.take(range(width), axis=axis)
            return np.concatenate([lo, values, hi], axis=axis)
        s = self.parity_signs(axis)
        factor = np.ones((n,) * rank)
        for r in range(rank):
            shp = [1] * rank
            shp[r] = n
            factor = factor * s.reshape(shp)
        if density:
            factor = factor * np.prod(s)
        for c in fixed:
            factor = factor * s[c]
        half = values.shape[n - 1] // 2

        def image(idx):
            block = values.take(idx, axis=axis)
            for b in range(axis + 1, n - 1):
                block = np.flip(block, axis=b)
            block = np.roll(block, half, axis=n - 1)
            return block * factor if rank or density or fixed else block

        lo = image(list(range(width - 1, -1, -1)))
        hi = image(list(range(count - 1, count - 1 - width, -1)))
        return np.concatenate([lo, values, hi], axis=axis)

    def stencil(self, padded: np.ndarray, axis: int, start: int, stop: int,
                deriv: int = 1) -> np.ndarray:
        """Apply the central stencil to a padded array for outputs start..stop-1."""
        offs, wts = central_weights(self.order, deriv)
        w = self.order // 2
        out = None
        for o, c in zip(offs, wts):
            if c == 0.0:
                continue
            sl = [slice(None)] * padded.ndim
            sl[axis] = slice(w + start + o, w + stop + o)
            term = c * padded[tuple(sl)]
            out = term if out is None else out + term
        return out / self.spacing[axis] ** deriv

    def diff(self, values: np.ndarray, axis: int, rank: int = 0, deriv: int = 1,
             density: bool = False, fixed: tuple[int, ...] = ()) -> np.ndarray:
        """Partial derivative of a grid field along coordinate ``axis``."""
        w = self.order // 2
        padded = self.pad(values, axis, w, rank, density, fixed)
        return self.stencil(padded, axis, 0, values.shape[axis], deriv)

    def gradient(self, values: np.ndarray, rank: int = 0, density: bool = False) -> np.ndarray:
        """All first partials, derivative index appended after the grid axes."""
        parts = [self.diff(values, a, rank, 1, density) for a in range(self.n)]
        return np.stack(parts, axis=self.n)
