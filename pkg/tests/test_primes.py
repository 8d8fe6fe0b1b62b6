import pytest

from oracles import FIRST_PRIMES

from gcdsums import DomainError, PrimeRangeError, PrimeTable
from gcdsums.primes import sieve_upto


def is_prime_slow(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_sieve_matches_trial_division():
    primes = sieve_upto(1000)
    assert list(primes) == [n for n in range(1001) if is_prime_slow(n)]


def test_first_primes():
    table = PrimeTable(initial_limit=16)
    assert [table.prime(j) for j in range(1, 31)] == list(FIRST_PRIMES)


def test_index_of_inverse():
    table = PrimeTable(initial_limit=16)
    for j in (1, 5, 25, 168, 1000):
        assert table.index_of(table.prime(j)) == j


def test_index_of_rejects_composites():
    table = PrimeTable()
    for n in (1, 4, 100, 1001):
        with pytest.raises(DomainError):
            table.index_of(n)


def test_lazy_growth():
    table = PrimeTable(initial_limit=16)
    assert table.prime(100_000) == 1_299_709


def test_segmented_growth_matches_dense():
    # a ceiling past the dense cutoff forces the segment path
    table = PrimeTable(initial_limit=(1 << 24) + 5000)
    dense = sieve_upto(100_000)
    assert list(table.first(len(dense))) == list(dense)
    assert table.index_of(16_777_259) >= 1  # first prime past 2^24


def test_ceiling_enforced():
    table = PrimeTable(initial_limit=100, ceiling=10_000)
    with pytest.raises(PrimeRangeError):
        table.prime(10_000)
