"""Exact symmetric-function and index combinatorics.

Elementary symmetric polynomials (by expansion and by Newton's identities),
the generalized Kronecker delta, its contraction rule, and the integer
inequality that controls the sign of the second variation.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .report import CheckRecord, Report

DELTA_MAX_N = 6
DELTA_MAX_K = 4


@dataclass(frozen=True)
class MultiIndex:
    """An ordered index tuple with entries in ``1..n``."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) > self.n:
            raise DomainError(f"multi-index {self.entries} longer than n={self.n}")
        if any(e < 1 or e > self.n for e in self.entries):
            raise DomainError(f"multi-index {self.entries} has entries outside 1..{self.n}")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class IndexTuple:
    """Curvature orders (n, k, l, p, q) of a comparison functional."""

    n: int
    k: int
    l: int
    p: int
    q: int

    def __post_init__(self):
        n, k, l, p, q = self.n, self.k, self.l, self.p, self.q
        if not (1 <= l < k <= n and 1 <= q <= p <= n):
            raise DomainError(
                f"index tuple (n={n}, k={k}, l={l}, p={p}, q={q}) violates "
                "1 <= l < k <= n and 1 <= q <= p <= n")

    @property
    def alpha(self) -> int:
        return 2 * (self.k - self.l)

    @property
    def beta(self) -> int:
        return self.n - 2 * (self.p - self.q)


class Admissibility(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    INADMISSIBLE = "Inadmissible"


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"binomial({n}, {k}) requires 0 <= k <= n")
    return math.comb(n, k)


def sigma_from_eigs(eigs, k: int):
    """k-th elementary symmetric polynomial of the values along the last axis.

    Expands prod(1 + x_i t) coefficient by coefficient, so it works for any
    leading batch shape.
    """
    eigs = np.asarray(eigs, dtype=float)
    n = eigs.shape[-1]
    if k < 0 or k > n:
        raise DomainError(f"sigma_{k} undefined for {n} eigenvalues")
    e = [np.ones(eigs.shape[:-1])] + [np.zeros(eigs.shape[:-1]) for _ in range(k)]
    for i in range(n):
        x = eigs[..., i]
        for j in range(min(k, i + 1), 0, -1):
            e[j] = e[j] + x * e[j - 1]
    out = e[k]
    return float(out) if out.ndim == 0 else out


def sigma_from_power_sums(power_sums, k: int):
    """sigma_k from power sums p_m = tr(S^m), m = 1..k, via Newton's identities.

    ``power_sums[..., m-1]`` holds p_m; extra trailing entries are ignored.
    """
    ps = np.asarray(power_sums, dtype=float)
    if ps.ndim == 0:
        ps = ps[None]
    if k < 0:
        raise DomainError("k must be non-negative")
    if k > ps.shape[-1]:
        raise DomainError(f"sigma_{k} needs {k} power sums, got {ps.shape[-1]}")
    e = [np.ones(ps.shape[:-1])]
    for m in range(1, k + 1):
        acc = np.zeros(ps.shape[:-1])
        for i in range(1, m + 1):
            term = e[m - i] * ps[..., i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        e.append(acc / m)
    out = e[k]
    return float(out) if out.ndim == 0 else out


def power_sums_from_eigs(eigs, kmax: int) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=float)
    return np.stack([np.sum(eigs ** m, axis=-1) for m in range(1, kmax + 1)], axis=-1)


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation of 0..m-1 given in one-line notation."""
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def gen_delta(i: Sequence[int], j: Sequence[int]) -> int:
    """Generalized Kronecker delta: sign of j as a permutation of distinct i."""
    i = tuple(i)
    j = tuple(j)
    if len(i) != len(j):
        raise DomainError(f"index lengths differ: {len(i)} vs {len(j)}")
    if len(set(i)) != len(i) or sorted(i) != sorted(j):
        return 0
    position = {v: a for a, v in enumerate(i)}
    return permutation_sign([position[v] for v in j])


def delta_tensor(n: int, k: int) -> np.ndarray:
    """Dense int64 array D[j_1..j_k, i_1..i_k] of the generalized delta.

    Built straight from the definition: every tuple of distinct entries and
    every rearrangement of it, signed by the rearrangement's parity.  All
    other entries are zero.  Indices are 0-based in the array.
    """
    if n > DELTA_MAX_N or k > DELTA_MAX_K:
        raise ResourceError(f"dense delta tensor for n={n}, k={k} exceeds brute-force bounds")
    D = np.zeros((n,) * (2 * k), dtype=np.int64)
    perms = [(perm, permutation_sign(perm)) for perm in itertools.permutations(range(k))]
    for tup in itertools.permutations(range(n), k):
        for perm, sign in perms:
            rearranged = tuple(tup[a] for a in perm)
            D[rearranged + tup] = sign
    return D


def delta_contraction_check(n: int, k: int, p: int) -> Report:
    """Brute-force the contraction rule of the generalized Kronecker delta.

    Sums delta^{i_1..i_p}_{j_1..j_p} delta^{j_1..j_k}_{i_1..i_k} over the p
    contracted pairs and compares with p!(n-k+p)!/(n-k)! times the reduced
    delta, for every assignment of the free indices, in exact integers.
    """
    if not (1 <= p <= k - 1 and k <= n):
        raise DomainError(f"need 1 <= p <= k-1 <= n-1, got n={n}, k={k}, p={p}")
    if n > DELTA_MAX_N or k > DELTA_MAX_K:
        raise ResourceError(f"brute force limited to n <= {DELTA_MAX_N}, k <= {DELTA_MAX_K}")
    coefficient = math.factorial(p) * math.factorial(n - k + p) // math.factorial(n - k)
    small = delta_tensor(n, p)  # [i_1..i_p (upper), j_1..j_p (lower)]
    big = delta_tensor(n, k)    # [j_1..j_k (upper), i_1..i_k (lower)]
    # contract small's upper i_a with big's lower i_a, small's lower j_a with big's upper j_a
    axes_small = list(range(2 * p))
    axes_big = [k + a for a in range(p)] + list(range(p))
    lhs = np.tensordot(small, big, axes=(axes_small, axes_big))
    # lhs axes: j_{p+1}..j_k, i_{p+1}..i_k
    rhs = coefficient * delta_tensor(n, k - p)
    deviation = int(np.max(np.abs(lhs - rhs)))
    report = Report("delta_contraction")
    report.add(CheckRecord(
        name=f"delta_contraction[n={n},k={k},p={p}]",
        inputs={"n": n, "k": k, "p": p},
        measured=deviation, reference=0, abs_dev=deviation, rel_dev=float(deviation),
        tol=0.0, passed=deviation == 0,
        extra={"coefficient": coefficient, "assignments": int(rhs.size)}))
    return report


def sigma_via_delta(S, k: int) -> float:
    """(1/k!) delta^{j..}_{i..} S^{i_1}_{j_1} ... S^{i_k}_{j_k} by index summation."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if S.shape != (n, n):
        raise DomainError("S must be a square matrix")
    if n > DELTA_MAX_N:
        raise ResourceError(f"delta summation limited to n <= {DELTA_MAX_N}")
    if k < 0 or k > n:
        raise DomainError(f"sigma_{k} undefined for n={n}")
    if k == 0:
        return 1.0
    tuples = np.array(list(itertools.permutations(range(n), k)), dtype=np.intp)
    total = 0.0
    for perm in itertools.permutations(range(k)):
        sign = permutation_sign(perm)
        lower = tuples[:, list(perm)]
        prod = np.ones(len(tuples))
        for a in range(k):
            prod *= S[tuples[:, a], lower[:, a]]
        total += sign * prod.sum()
    return total / math.factorial(k)


def index_inequality_value(n: int, k: int, l: int, p: int, q: int) -> int:
    beta = n - 2 * (p - q)
    return beta * (k + l) + 2 * (p * p - q * q) - n


def index_inequality_scan(n_max: int, n_min: int = 3, max_argmin: int = 20) -> Report:
    """Evaluate beta(k+l) + 2(p^2-q^2) - n over every admissible tuple.

    Values are bounded by 6 n_max^2 in magnitude, far inside int64.
    """
    if n_max < 3:
        raise DomainError("n_max must be >= 3")
    n_min = max(3, n_min)
    if 6 * n_max * n_max >= 2 ** 62:
        raise ResourceError("n_max too large for exact int64 evaluation")
    best = None
    argmin: list[tuple[int, ...]] = []
    violations = 0
    count = 0
    for n in range(n_min, n_max + 1):
        kl = np.array([(k, l) for k in range(2, n + 1) for l in range(1, k)], dtype=np.int64)
        pq = np.array([(p, q) for p in range(1, n + 1) for q in range(1, p + 1)], dtype=np.int64)
        beta = n - 2 * (pq[:, 0] - pq[:, 1])
        vals = beta[:, None] * (kl[:, 0] + kl[:, 1])[None, :] \
            + (2 * (pq[:, 0] ** 2 - pq[:, 1] ** 2) - n)[:, None]
        count += vals.size
        violations += int(np.count_nonzero(vals < 0))
        m = int(vals.min())
        if best is None or m < best:
            best = m
            argmin = []
        if m == best and len(argmin) < max_argmin:
            for a, b in zip(*np.nonzero(vals == m)):
                if len(argmin) >= max_argmin:
                    break
                argmin.append((n, int(kl[b, 0]), int(kl[b, 1]), int(pq[a, 0]), int(pq[a, 1])))
    report = Report("index_inequality")
    report.add(CheckRecord(
        name=f"index_inequality_scan[n<={n_max}]",
        inputs={"n_min": n_min, "n_max": n_max},
        measured=best, reference=0, abs_dev=None, rel_dev=None, tol=0.0,
        passed=violations == 0,
        extra={"violations": violations, "tuples": count,
               "argmin": [list(t) for t in argmin]}))
    return report


def admissible_indices(t: IndexTuple) -> Admissibility:
    if not isinstance(t, IndexTuple):
        t = IndexTuple(*t)
    x = 2 * (t.p - t.q)
    if t.beta == 0:
        return Admissibility.INADMISSIBLE
    if x < t.n:
        return Admissibility.CASE1
    if x >= t.n + 2 * (t.k - t.l):
        return Admissibility.CASE2
    return Admissibility.INADMISSIBLE
