"""Sparse multi-indices: finitely supported exponent sequences at 1-based positions.

A multi-index encodes the prime factorization of a positive integer:
position j carries the exponent of the j-th prime.  Values are immutable,
hashable, and totally ordered by their canonical (position, exponent) tuple.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import DomainError
from .primes import DEFAULT_TABLE, PrimeTable


class MultiIndex:
    __slots__ = ("_items", "_map")

    def __init__(self, exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(exponents, Mapping):
            pairs = exponents.items()
        else:
            pairs = tuple(exponents)
        cleaned = {}
        for j, e in pairs:
            j = int(j)
            e = int(e)
            if j < 1:
                raise DomainError(f"position must be >= 1, got {j}")
            if e < 0:
                raise DomainError(f"exponent must be >= 0, got {e}")
            if e == 0:
                continue
            if j in cleaned:
                raise DomainError(f"duplicate position {j}")
            cleaned[j] = e
        self._items = tuple(sorted(cleaned.items()))
        self._map = cleaned

    @classmethod
    def zero(cls) -> "MultiIndex":
        return _ZERO

    @classmethod
    def unit(cls, j: int) -> "MultiIndex":
        return cls({j: 1})

    @property
    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    def exponent(self, j: int) -> int:
        return self._map.get(j, 0)

    def support(self) -> frozenset[int]:
        return frozenset(self._map)

    def max_index(self) -> int:
        """Largest supported position; 0 for the zero multi-index."""
        return self._items[-1][0] if self._items else 0

    def is_zero(self) -> bool:
        return not self._items

    def is_square_free(self) -> bool:
        return all(e <= 1 for _, e in self._items)

    def degree(self) -> int:
        return sum(e for _, e in self._items)

    def weighted_rank(self) -> int:
        """Sum of position * exponent; strictly drops under the transforms."""
        return sum(j * e for j, e in self._items)

    def with_unit_added(self, j: int) -> "MultiIndex":
        m = dict(self._map)
        m[j] = m.get(j, 0) + 1
        return MultiIndex(m)

    def with_unit_removed(self, j: int) -> "MultiIndex":
        if self._map.get(j, 0) < 1:
            raise DomainError(f"position {j} has exponent 0")
        m = dict(self._map)
        m[j] -= 1
        return MultiIndex(m)

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        m = dict(self._map)
        for j, e in other._items:
            m[j] = m.get(j, 0) + e
        return MultiIndex(m)

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        if not leq(other, self):
            raise DomainError("subtraction would give a negative exponent")
        m = dict(self._map)
        for j, e in other._items:
            m[j] -= e
        return MultiIndex(m)

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiIndex) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: "MultiIndex") -> bool:
        return self._items < other._items

    def __le__(self, other: "MultiIndex") -> bool:
        return self._items <= other._items

    def __gt__(self, other: "MultiIndex") -> bool:
        return self._items > other._items

    def __ge__(self, other: "MultiIndex") -> bool:
        return self._items >= other._items

    def __str__(self) -> str:
        return format_multiindex(self)

    def __repr__(self) -> str:
        return f"MultiIndex({dict(self._items)!r})"


_ZERO = MultiIndex()


def abs_diff(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise |a - b|."""
    m = dict(a._map)
    for j, e in b.items:
        m[j] = abs(m.get(j, 0) - e)
    return MultiIndex(m)


def lcm(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise max (least common multiple of the encoded integers)."""
    m = dict(a._map)
    for j, e in b.items:
        if e > m.get(j, 0):
            m[j] = e
    return MultiIndex(m)


def leq(a: MultiIndex, b: MultiIndex) -> bool:
    """True iff a <= b componentwise (a's integer divides b's)."""
    return all(e <= b.exponent(j) for j, e in a.items)


def support(a: MultiIndex) -> frozenset[int]:
    return a.support()


def is_square_free(a: MultiIndex) -> bool:
    return a.is_square_free()


def from_integer(n: int, table: PrimeTable = DEFAULT_TABLE) -> MultiIndex:
    """Multi-index of n's prime factorization; from_integer(1) is zero."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    exps: dict[int, int] = {}

    def account(p: int, e: int) -> None:
        exps[table.index_of(p)] = e

    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            account(p, e)
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e:
                account(p, e)
        d += 6
    if n > 1:
        account(n, 1)
    return MultiIndex(exps)


def to_integer(a: MultiIndex, table: PrimeTable = DEFAULT_TABLE) -> int:
    """Integer encoded by a; inverse of from_integer."""
    n = 1
    for j, e in a.items:
        n *= table.prime(j) ** e
    return n


def format_multiindex(a: MultiIndex) -> str:
    """Text form: `mi 1:2 3:1` (bare `mi` for zero)."""
    if a.is_zero():
        return "mi"
    return "mi " + " ".join(f"{j}:{e}" for j, e in a.items)


_MAX_PARSE_INDEX = 10 ** 6
_MAX_PARSE_EXPONENT = 10 ** 4


def parse_multiindex(text: str) -> MultiIndex:
    """Parse the `mi j:e ...` text form; positions must be strictly increasing."""
    tokens = text.split()
    if not tokens or tokens[0] != "mi":
        raise DomainError(f"expected 'mi' prefix, got {text!r}")
    pairs = []
    last = 0
    for tok in tokens[1:]:
        head, sep, tail = tok.partition(":")
        if not sep:
            raise DomainError(f"malformed entry {tok!r} (want position:exponent)")
        try:
            j, e = int(head), int(tail)
        except ValueError:
            raise DomainError(f"malformed entry {tok!r} (want position:exponent)") from None
        if j <= last:
            raise DomainError(f"positions must be strictly increasing (saw {j} after {last})")
        if j > _MAX_PARSE_INDEX:
            raise DomainError(f"position {j} exceeds the cap {_MAX_PARSE_INDEX}")
        if not 1 <= e <= _MAX_PARSE_EXPONENT:
            raise DomainError(f"exponent {e} outside [1, {_MAX_PARSE_EXPONENT}]")
        pairs.append((j, e))
        last = j
    return MultiIndex(pairs)
