"""GCD sums over multi-index sets, their matrices, and spectral quantities.

The central quantity is S(t, B) = sum over all ordered pairs (a, b) of B of
t^|a-b|.  Summation runs over every pair directly; for square-free sets with
a small position universe the pairwise powers come from an XOR-indexed
product table, otherwise from exponent-matrix blocks.  Per-row partial sums
are combined with compensated summation in canonical member order, so results
are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import mpmath as mp
import numpy as np

from .errors import ConvergenceError, DomainError
from .multiindex import MultiIndex, abs_diff, from_integer, lcm
from .weights import WeightSequence

_XOR_TABLE_MAX_BITS = 22
_DENSE_CAP = 20_000
_DENSE_MATVEC_DEFAULT = 4096
_BLOCK_BUDGET = 4_000_000  # floats per pair block


class IndexSet:
    """A finite set of distinct multi-indices in canonical (sorted) order."""

    __slots__ = ("_members", "_set", "_universe")

    def __init__(self, members: Iterable[MultiIndex]):
        members = list(members)
        sset = set(members)
        if len(sset) != len(members):
            raise DomainError("members must be pairwise distinct")
        if not members:
            raise DomainError("an index set must be nonempty")
        self._members = tuple(sorted(members))
        self._set = frozenset(sset)
        self._universe: tuple[int, ...] | None = None

    @property
    def members(self) -> tuple[MultiIndex, ...]:
        return self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self._members)

    def __contains__(self, mi: MultiIndex) -> bool:
        return mi in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexSet) and self._set == other._set

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return f"IndexSet({len(self)} members, max_index={self.max_index()})"

    def as_set(self) -> frozenset[MultiIndex]:
        return self._set

    def universe(self) -> tuple[int, ...]:
        """Sorted union of member supports."""
        if self._universe is None:
            u: set[int] = set()
            for m in self._members:
                u.update(m.support())
            self._universe = tuple(sorted(u))
        return self._universe

    def max_index(self) -> int:
        u = self.universe()
        return u[-1] if u else 0

    def is_square_free(self) -> bool:
        return all(m.is_square_free() for m in self._members)

    def exponent_matrix(self, universe: Sequence[int] | None = None) -> np.ndarray:
        """Members as rows of exponents over the given position universe."""
        if universe is None:
            universe = self.universe()
        pos = {j: i for i, j in enumerate(universe)}
        out = np.zeros((len(self), len(universe)), dtype=np.int16)
        for r, m in enumerate(self._members):
            for j, e in m.items:
                if e > 30_000:
                    raise DomainError(f"exponent {e} too large for the pair kernel")
                out[r, pos[j]] = e
        return out


def _xor_masks(B: IndexSet, universe: Sequence[int]) -> np.ndarray:
    pos = {j: i for i, j in enumerate(universe)}
    masks = np.zeros(len(B), dtype=np.int64)
    for r, m in enumerate(B.members):
        acc = 0
        for j, _ in m.items:
            acc |= 1 << pos[j]
        masks[r] = acc
    return masks


def _power_table(weights: np.ndarray) -> np.ndarray:
    """table[x] = product of weights[i] over the set bits of x."""
    m = len(weights)
    table = np.ones(1 << m, dtype=np.float64)
    for i in range(m):
        table.reshape(-1, 2, 1 << i)[:, 1, :] *= weights[i]
    return table


def _pair_blocks(t: WeightSequence, B: IndexSet) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (lo, hi, block) with block[r - lo, c] = t^|B[r] - B[c]|."""
    n = len(B)
    universe = B.universe()
    m = len(universe)
    w = t.weights_for(universe)
    if B.is_square_free() and m <= _XOR_TABLE_MAX_BITS:
        masks = _xor_masks(B, universe)
        table = _power_table(w)
        rows = max(1, _BLOCK_BUDGET // max(n, 1))
        for lo in range(0, n, rows):
            hi = min(lo + rows, n)
            x = masks[lo:hi, None] ^ masks[None, :]
            yield lo, hi, table[x]
    else:
        E = B.exponent_matrix(universe)
        logw = np.log(w)
        rows = max(1, _BLOCK_BUDGET // max(n * max(m, 1), 1))
        for lo in range(0, n, rows):
            hi = min(lo + rows, n)
            diff = np.abs(E[lo:hi, None, :].astype(np.int32) - E[None, :, :])
            yield lo, hi, np.exp(np.tensordot(diff, logw, axes=([2], [0])))


def gcd_row_sums(t: WeightSequence, B: IndexSet) -> np.ndarray:
    """Per-member row sums sum_b t^|a-b| in canonical member order."""
    out = np.empty(len(B), dtype=np.float64)
    for lo, hi, block in _pair_blocks(t, B):
        out[lo:hi] = block.sum(axis=1)
    return out


def gcd_sum(t: WeightSequence, B: IndexSet) -> float:
    """S(t, B): the full pair sum including the diagonal; always >= |B|."""
    return float(math.fsum(gcd_row_sums(t, B)))


def gcd_sum_mp(t: WeightSequence, B: IndexSet, dps: int = 50) -> mp.mpf:
    """S(t, B) recomputed termwise at `dps` decimal digits."""
    members = B.members
    with mp.workdps(dps):
        cache: dict[MultiIndex, mp.mpf] = {}
        terms = []
        for a in members:
            for b in members:
                d = abs_diff(a, b)
                v = cache.get(d)
                if v is None:
                    v = t.pow_mp(d)
                    cache[d] = v
                terms.append(v)
        return mp.fsum(terms)


def gcd_sum_integers(ns: Sequence[int], alpha: float) -> float:
    """sum over pairs of gcd(n_k, n_l)^(2 alpha) / (n_k n_l)^alpha."""
    ns = [int(n) for n in ns]
    if len(set(ns)) != len(ns):
        raise DomainError("integers must be distinct")
    if any(n < 1 for n in ns):
        raise DomainError("integers must be >= 1")
    alpha = float(alpha)
    terms = []
    for i, a in enumerate(ns):
        terms.append(1.0)
        for b in ns[i + 1 :]:
            g = math.gcd(a, b)
            terms.append(2.0 * float(g * g) ** alpha / float(a * b) ** alpha)
    return float(math.fsum(terms))


def lcm_closure(B: IndexSet) -> IndexSet:
    """All pairwise componentwise maxima of B; contains B, at most n(n+1)/2 members."""
    members = B.members
    out = set(members)
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            out.add(lcm(a, b))
    return IndexSet(out)


def lcm_closure_bound(
    t: WeightSequence, B: IndexSet, tol: float = 1e-12
) -> tuple[float, bool]:
    """Square majorant of S(t, B) over the lcm closure.

    rhs = sum over c in closure(B) of (sum over members a <= c of t^(c-a))^2;
    returns (rhs, S <= rhs * (1 + tol)).
    """
    closure = lcm_closure(B)
    universe = closure.universe()
    E = B.exponent_matrix(universe)
    F = closure.exponent_matrix(universe)
    logw = np.log(t.weights_for(universe))
    squares = []
    for r in range(len(closure)):
        row = F[r]
        mask = np.all(E <= row, axis=1)
        diff = (row[None, :] - E[mask]).astype(np.float64)
        inner = float(math.fsum(np.exp(diff @ logw)))
        squares.append(inner * inner)
    rhs = float(math.fsum(squares))
    s = gcd_sum(t, B)
    return rhs, s <= rhs * (1.0 + tol) + tol


class GcdMatrix:
    """Symmetric unit-diagonal matrix with entries t^|a-b| over B's members.

    Dense storage is built lazily and only below the hard cap; matvec falls
    back to streaming recomputed blocks above `dense_limit`.
    """

    def __init__(self, t: WeightSequence, B: IndexSet, dense_limit: int = _DENSE_MATVEC_DEFAULT):
        self.t = t
        self.B = B
        self.dense_limit = dense_limit
        self._dense: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.B)

    def entry(self, k: int, l: int) -> float:
        return self.t.pow(abs_diff(self.B.members[k], self.B.members[l]))

    def dense(self) -> np.ndarray:
        if self._dense is None:
            if self.n > _DENSE_CAP:
                raise DomainError(f"dense storage capped at {_DENSE_CAP} (n={self.n})")
            out = np.empty((self.n, self.n), dtype=np.float64)
            for lo, hi, block in _pair_blocks(self.t, self.B):
                out[lo:hi] = block
            self._dense = out
        return self._dense

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.n <= self.dense_limit or self._dense is not None:
            return self.dense() @ v
        out = np.empty(self.n, dtype=np.float64)
        for lo, hi, block in _pair_blocks(self.t, self.B):
            out[lo:hi] = block @ v
        return out

    def row_sums(self) -> np.ndarray:
        return gcd_row_sums(self.t, self.B)


def gcd_matrix(t: WeightSequence, B: IndexSet, dense_limit: int = _DENSE_MATVEC_DEFAULT) -> GcdMatrix:
    return GcdMatrix(t, B, dense_limit=dense_limit)


def _power_iteration(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float,
    max_iterations: int,
) -> float:
    # all-ones start: a positive matrix guarantees overlap with the
    # dominant eigenvector
    v = np.full(n, 1.0 / math.sqrt(n))
    lam_prev = None
    for it in range(1, max_iterations + 1):
        y = matvec(v)
        lam = float(v @ y)
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            raise ConvergenceError("matvec collapsed to zero", estimate=lam, iterations=it)
        v = y / norm
        if lam_prev is not None and abs(lam - lam_prev) <= tol * max(abs(lam), 1e-300):
            return lam
        lam_prev = lam
    residual = float(np.linalg.norm(matvec(v) - lam_prev * v))
    raise ConvergenceError(
        f"power iteration did not converge in {max_iterations} iterations",
        estimate=lam_prev,
        residual=residual,
        iterations=max_iterations,
    )


def spectral_norm(M: GcdMatrix, tol: float = 1e-13, max_iterations: int = 100_000) -> float:
    """Largest eigenvalue via power iteration from the all-ones vector."""
    return _power_iteration(M.matvec, M.n, tol, max_iterations)


def min_eigenvalue(M: GcdMatrix, tol: float = 1e-13, max_iterations: int = 100_000) -> float:
    """Smallest eigenvalue: direct symmetric solve up to n=200, else shifted iteration."""
    if M.n <= 200:
        return float(np.linalg.eigvalsh(M.dense())[0])
    shift = spectral_norm(M, tol=tol, max_iterations=max_iterations) * (1.0 + 1e-12)
    mu = _power_iteration(
        lambda v: shift * v - M.matvec(v), M.n, tol, max_iterations
    )
    return shift - mu


def group_by_support(B: IndexSet) -> list[tuple[MultiIndex, IndexSet]]:
    """Partition B into blocks of equal support, keyed by the square-free indicator."""
    groups: dict[frozenset[int], list[MultiIndex]] = {}
    for m in B:
        groups.setdefault(m.support(), []).append(m)
    out = []
    for supp, block in groups.items():
        rep = MultiIndex({j: 1 for j in supp})
        out.append((rep, IndexSet(block)))
    out.sort(key=lambda pair: pair[0])
    return out


def weighted_sf_form(
    u: WeightSequence, reps: IndexSet, sizes: Sequence[int]
) -> float:
    """sum over pairs of sqrt(sizes_k * sizes_l) * u^|rep_k - rep_l|."""
    if len(sizes) != len(reps):
        raise DomainError("one size per representative required")
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes):
        raise DomainError("sizes must be positive")
    members = reps.members
    roots = [math.sqrt(s) for s in sizes]
    terms = []
    for k, a in enumerate(members):
        terms.append(float(sizes[k]))
        for l in range(k + 1, len(members)):
            terms.append(2.0 * roots[k] * roots[l] * u.pow(abs_diff(a, members[l])))
    return float(math.fsum(terms))


def support_grouping_ratio(u: WeightSequence, B: IndexSet) -> float:
    """Diagnostic ratio S(u, B) / weighted square-free form of its support blocks.

    Reported, never asserted: no finite constant is claimed for it.
    """
    groups = group_by_support(B)
    reps = IndexSet([rep for rep, _ in groups])
    order = {rep: len(block) for rep, block in groups}
    sizes = [order[rep] for rep in reps.members]
    return gcd_sum(u, B) / weighted_sf_form(u, reps, sizes)


def cube_sum_closed_form(t: WeightSequence, k: int) -> float:
    """Product form of S over the k-dimensional boolean cube: prod (2 + 2 t_j)."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    out = 1.0
    for j in range(1, k + 1):
        out *= 2.0 + 2.0 * t.weight_at(j)
    return out


@dataclass(frozen=True)
class RayleighBounds:
    lower: float  # S/N, the all-ones Rayleigh quotient
    spectral: float
    upper: float  # max row sum


def rayleigh_bounds(t: WeightSequence, B: IndexSet, tol: float = 1e-13) -> RayleighBounds:
    """S/N <= largest eigenvalue <= max row sum, all computed per instance."""
    rows = gcd_row_sums(t, B)
    lam = spectral_norm(gcd_matrix(t, B), tol=tol)
    return RayleighBounds(
        lower=float(math.fsum(rows)) / len(B),
        spectral=lam,
        upper=float(rows.max()),
    )


def index_set_from_integers(ns: Sequence[int]) -> IndexSet:
    return IndexSet([from_integer(n) for n in ns])
