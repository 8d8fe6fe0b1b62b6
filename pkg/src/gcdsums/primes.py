"""Lazily extended prime table backed by a segmented sieve."""

from __future__ import annotations

import threading

import numpy as np

from .errors import DomainError, PrimeRangeError

_SEGMENT = 1 << 22
_DENSE_LIMIT = 1 << 24
_DEFAULT_INITIAL = 1 << 16
_DEFAULT_CEILING = 10 ** 9


def sieve_upto(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as int64."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


class PrimeTable:
    """Ascending primes p_1 = 2, p_2 = 3, ... grown on demand.

    Reads are lock-free on the immutable snapshot; extension is serialized,
    so concurrent callers see a monotonically growing table.
    """

    def __init__(self, initial_limit: int = _DEFAULT_INITIAL, ceiling: int = _DEFAULT_CEILING):
        self._lock = threading.Lock()
        self._ceiling = int(ceiling)
        self._limit = 0
        self._primes = np.zeros(0, dtype=np.int64)
        self._grow(min(int(initial_limit), self._ceiling))

    def __len__(self) -> int:
        return int(self._primes.size)

    @property
    def limit(self) -> int:
        return self._limit

    def _grow(self, limit: int) -> None:
        with self._lock:
            if limit <= self._limit:
                return
            if limit > self._ceiling:
                raise PrimeRangeError(
                    f"prime table ceiling {self._ceiling} exceeded (requested {limit})"
                )
            # Geometric growth amortizes repeated small extensions.
            target = min(max(limit, 2 * self._limit, _DEFAULT_INITIAL), self._ceiling)
            if target <= _DENSE_LIMIT:
                self._primes = sieve_upto(target)
            else:
                self._append_segments(target)
            self._limit = target

    def _append_segments(self, target: int) -> None:
        base = sieve_upto(int(target ** 0.5) + 1)
        chunks = [self._primes]
        lo = self._limit + 1
        while lo <= target:
            hi = min(lo + _SEGMENT - 1, target)
            flags = np.ones(hi - lo + 1, dtype=bool)
            for p in base:
                p = int(p)
                start = max(p * p, ((lo + p - 1) // p) * p)
                if start > hi:
                    continue
                flags[start - lo :: p] = False
            if lo <= 1:
                flags[: 2 - lo] = False
            chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
            lo = hi + 1
        self._primes = np.concatenate(chunks)

    def _ensure_count(self, count: int) -> None:
        while len(self) < count:
            if count < 6:
                guess = 16
            else:
                # p_n < n (ln n + ln ln n) for n >= 6
                import math

                guess = int(count * (math.log(count) + math.log(math.log(count)))) + 16
            self._grow(max(guess, 2 * self._limit))

    def prime(self, j: int) -> int:
        """The j-th prime, 1-based (prime(1) == 2)."""
        if j < 1:
            raise DomainError(f"prime index must be >= 1, got {j}")
        self._ensure_count(j)
        return int(self._primes[j - 1])

    def first(self, count: int) -> np.ndarray:
        """The first `count` primes as an int64 array (read-only view)."""
        if count < 0:
            raise DomainError("count must be >= 0")
        self._ensure_count(count)
        return self._primes[:count]

    def index_of(self, p: int) -> int:
        """1-based rank of the prime p; DomainError if p is not prime."""
        if p < 2:
            raise DomainError(f"{p} is not prime")
        if p > self._limit:
            self._grow(p)
        i = int(np.searchsorted(self._primes, p))
        if i >= len(self) or int(self._primes[i]) != p:
            raise DomainError(f"{p} is not prime")
        return i + 1


DEFAULT_TABLE = PrimeTable()
