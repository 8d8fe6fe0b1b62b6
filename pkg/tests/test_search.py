import math

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from oracles import brute_downsets, brute_pair_sum

from gcdsums import (
    DomainError,
    IndexSet,
    MultiIndex,
    PrimePowerWeights,
    cube_construction,
    cube_sum_closed_form,
    divisor_closure,
    enumerate_downsets,
    extremal_sf,
    gcd_sum,
    is_complete,
    is_divisor_closed,
    local_search,
)

half = PrimePowerWeights(0.5)
zero = MultiIndex.zero()
e1 = MultiIndex.unit(1)
e2 = MultiIndex.unit(2)


def as_mask_set(B):
    out = set()
    for m in B:
        out.add(sum(1 << (j - 1) for j, _ in m.items))
    return frozenset(out)


def test_enumerate_examples():
    assert [as_mask_set(s) for s in enumerate_downsets(2, 3)] == [frozenset({0, 1, 2})]
    two = [as_mask_set(s) for s in enumerate_downsets(2, 2)]
    assert two == [frozenset({0, 1}), frozenset({0, 2})]
    ones = list(enumerate_downsets(5, 1))
    assert ones == [IndexSet([zero])]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_enumerate_matches_brute_force(m):
    for n in range(1, (1 << m) + 1):
        got = [as_mask_set(s) for s in enumerate_downsets(m, n)]
        assert len(got) == len(set(got)), "duplicates emitted"
        assert set(got) == brute_downsets(m, n)


def test_enumerate_counts():
    # total nonempty downsets of the m-cube: the antichain counts 168 (m=4)
    # and 7581 (m=5) minus the empty one
    assert sum(len(list(enumerate_downsets(4, n))) for n in range(1, 17)) == 167
    assert sum(len(list(enumerate_downsets(5, n))) for n in range(1, 33)) == 7580


def test_enumerate_all_are_downsets():
    for n in (3, 7, 12):
        for s in enumerate_downsets(4, n):
            assert len(s) == n
            assert is_divisor_closed(s)
            assert s.is_square_free()


def test_enumerate_validation():
    with pytest.raises(DomainError):
        list(enumerate_downsets(7, 3))
    with pytest.raises(DomainError):
        list(enumerate_downsets(3, 9))
    with pytest.raises(DomainError):
        list(enumerate_downsets(3, 0))


def test_extremal_examples():
    rep = extremal_sf(half, 2, 3)
    assert rep.maximizers == (IndexSet([zero, e1]),)
    assert rep.gamma == pytest.approx(1 + 1 / math.sqrt(2), rel=1e-12)
    assert rep.candidates == 3

    rep3 = extremal_sf(half, 3, 3)
    assert rep3.maximizers == (IndexSet([zero, e1, e2]),)
    assert rep3.gamma == pytest.approx(2.1284705, abs=1e-6)

    rep4 = extremal_sf(half, 4, 4)
    assert rep4.maximizers == (cube_construction(2),)
    assert rep4.best_value == pytest.approx(cube_sum_closed_form(half, 2), rel=1e-12)


def test_extremal_beats_every_candidate():
    rep = extremal_sf(half, 5, 4)
    best = max(brute_pair_sum(half, s.members) for s in enumerate_downsets(4, 5))
    assert rep.best_value == pytest.approx(best, rel=1e-12)


def test_extremal_maximizers_complete_small_sweep():
    for alpha in (0.5, 1.0):
        t = PrimePowerWeights(alpha)
        for m in (2, 3, 4):
            for n in range(1, min(1 << m, 6) + 1):
                for s in extremal_sf(t, n, m).maximizers:
                    assert is_complete(s)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.dictionaries(st.integers(1, 4), st.just(1), max_size=4).map(MultiIndex),
        min_size=1, max_size=6, unique=True,
    )
)
def test_extremal_dominates_closed_user_sets(members):
    B = IndexSet(members)
    closed, _ = divisor_closure(half, B)
    rep = extremal_sf(half, len(B), 4)
    assert gcd_sum(half, closed) <= rep.best_value * (1 + 1e-12)


def test_tie_reporting():
    # a large tie tolerance must surface several candidates, best first in
    # canonical order
    rep = extremal_sf(half, 2, 3, tie_tol=0.5)
    assert len(rep.maximizers) == 3
    values = [gcd_sum(half, s) for s in rep.maximizers]
    assert max(values) == pytest.approx(rep.best_value)


def test_local_search_trivial_cases():
    rep = local_search(half, 1, 3, seed=0, iterations=50)
    assert rep.maximizers == (IndexSet([zero]),)
    assert rep.best_value == pytest.approx(1.0)

    frozen = local_search(half, 4, 4, seed=9, iterations=0)
    again = local_search(half, 4, 4, seed=9, iterations=0)
    assert frozen.maximizers == again.maximizers
    assert frozen.mode == "heuristic"


def test_local_search_reaches_cube():
    target = cube_sum_closed_form(half, 2)
    for seed in range(4):
        rep = local_search(half, 4, 4, seed=seed, iterations=300)
        assert rep.best_value >= target * (1 - 1e-12)


def test_local_search_never_beats_exhaustive():
    for n, m in ((3, 3), (5, 4), (6, 4)):
        exact = extremal_sf(half, n, m).best_value
        for seed in (0, 1):
            rep = local_search(half, n, m, seed=seed, iterations=200)
            assert rep.best_value <= exact * (1 + 1e-12)
            assert is_divisor_closed(rep.maximizers[0])


def test_cube_construction_examples():
    assert cube_construction(1) == IndexSet([zero, e1])
    assert cube_construction(2) == IndexSet([zero, e1, e2, e1 + e2])
    c3 = cube_construction(3)
    assert len(c3) == 8
    assert is_complete(c3)


def test_cube_construction_validation():
    with pytest.raises(DomainError):
        cube_construction(0)
    with pytest.raises(DomainError):
        cube_construction(21)
