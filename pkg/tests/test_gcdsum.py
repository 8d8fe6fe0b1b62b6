import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import index_sets, square_free_sets
from oracles import brute_pair_sum

import gcdsums.gcdsum as gcdsum_module
from gcdsums import (
    ConvergenceError,
    DomainError,
    IndexSet,
    MultiIndex,
    PrimePowerWeights,
    cube_sum_closed_form,
    gcd_matrix,
    gcd_sum,
    gcd_sum_integers,
    gcd_sum_mp,
    group_by_support,
    index_set_from_integers,
    lcm_closure,
    lcm_closure_bound,
    min_eigenvalue,
    rayleigh_bounds,
    spectral_norm,
    support_grouping_ratio,
    weighted_sf_form,
)
from gcdsums.search import cube_construction

half = PrimePowerWeights(0.5)
zero = MultiIndex.zero()
e1 = MultiIndex.unit(1)
e2 = MultiIndex.unit(2)
e3 = MultiIndex.unit(3)


def test_index_set_canonical_and_distinct():
    B = IndexSet([e2, zero, e1])
    assert B.members == (zero, e1, e2)
    with pytest.raises(DomainError):
        IndexSet([e1, e1])
    with pytest.raises(DomainError):
        IndexSet([])


def test_gcd_sum_examples():
    assert gcd_sum(half, IndexSet([zero])) == 1.0
    assert gcd_sum(half, IndexSet([zero, e1])) == pytest.approx(2 + math.sqrt(2), rel=1e-14)
    t1, t2 = half.weight_at(1), half.weight_at(2)
    expected = 3 + 2 * t1 + 2 * t2 + 2 * t1 * t2
    assert gcd_sum(half, IndexSet([zero, e1, e2])) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(6.3854115, abs=1e-6)


@given(index_sets(max_index=7, max_exponent=3, max_n=9))
def test_gcd_sum_matches_brute_force(B):
    assert gcd_sum(half, B) == pytest.approx(brute_pair_sum(half, B.members), rel=1e-12)


@given(square_free_sets(max_index=7, max_n=9))
def test_gcd_sum_square_free_path_matches_brute_force(B):
    assert gcd_sum(half, B) == pytest.approx(brute_pair_sum(half, B.members), rel=1e-12)


def test_gcd_sum_block_paths(monkeypatch):
    rng = random.Random(7)
    members = set()
    while len(members) < 60:
        members.add(
            MultiIndex({j: rng.randint(1, 2) for j in rng.sample(range(1, 9), rng.randint(0, 6))})
        )
    B = IndexSet(members)
    whole = gcd_sum(half, B)
    monkeypatch.setattr(gcdsum_module, "_BLOCK_BUDGET", 300)
    blocked = gcd_sum(half, B)
    assert blocked == pytest.approx(whole, rel=1e-13)


def test_gcd_sum_permutation_invariant():
    rng = random.Random(1)
    members = [MultiIndex({j: 1 for j in rng.sample(range(1, 8), 3)}) for _ in range(6)]
    members = list(dict.fromkeys(members))
    shuffled = members[:]
    rng.shuffle(shuffled)
    assert gcd_sum(half, IndexSet(members)) == gcd_sum(half, IndexSet(shuffled))


def test_gcd_sum_at_least_n():
    B = IndexSet([zero, e1, e2, e3])
    assert gcd_sum(half, B) > len(B)
    assert gcd_sum(half, IndexSet([zero])) == 1.0


def test_gcd_sum_mp_agrees():
    B = IndexSet([zero, e1, e2, e1 + e2])
    assert float(gcd_sum_mp(half, B, dps=40)) == pytest.approx(gcd_sum(half, B), rel=1e-13)


def test_gcd_sum_integers_examples():
    assert gcd_sum_integers([1], 0.7) == 1.0
    assert gcd_sum_integers([2, 6], 0.5) == pytest.approx(2 + 2 / math.sqrt(3), rel=1e-14)
    assert gcd_sum_integers([1, 2, 3], 0.5) == pytest.approx(6.3854115, abs=1e-6)


def test_gcd_sum_integers_validation():
    with pytest.raises(DomainError):
        gcd_sum_integers([2, 2], 0.5)
    with pytest.raises(DomainError):
        gcd_sum_integers([0], 0.5)


@given(
    st.lists(st.integers(1, 10**6), min_size=1, max_size=12, unique=True),
    st.sampled_from((0.5, 0.7, 1.0)),
)
def test_integer_and_multiindex_forms_agree(ns, alpha):
    direct = gcd_sum_integers(ns, alpha)
    lifted = gcd_sum(PrimePowerWeights(alpha), index_set_from_integers(ns))
    assert lifted == pytest.approx(direct, rel=1e-10)


def test_lcm_closure_examples():
    assert lcm_closure(IndexSet([zero])) == IndexSet([zero])
    assert lcm_closure(IndexSet([e1, e2])) == IndexSet([e1, e2, e1 + e2])
    assert lcm_closure(IndexSet([zero, e1, e2])) == IndexSet([zero, e1, e2, e1 + e2])


@given(index_sets(max_index=6, max_exponent=2, max_n=8))
def test_lcm_closure_properties(B):
    closure = lcm_closure(B)
    assert B.as_set() <= closure.as_set()
    n = len(B)
    assert len(closure) <= n * (n + 1) // 2 + n


def test_closure_bound_examples():
    rhs, holds = lcm_closure_bound(half, IndexSet([zero]))
    assert rhs == 1.0 and holds
    rhs, holds = lcm_closure_bound(half, IndexSet([zero, e1]))
    t1 = half.weight_at(1)
    assert rhs == pytest.approx(1 + (1 + t1) ** 2, rel=1e-13)
    assert holds


@given(index_sets(max_index=8, max_exponent=3, max_n=10))
def test_closure_bound_holds(B):
    rhs, holds = lcm_closure_bound(half, B)
    assert holds
    assert gcd_sum(half, B) <= rhs * (1 + 1e-12) + 1e-12


def test_gcd_matrix_entries():
    M = gcd_matrix(half, IndexSet([zero]))
    assert M.dense().tolist() == [[1.0]]
    M2 = gcd_matrix(half, IndexSet([zero, e1]))
    a = half.weight_at(1)
    assert np.allclose(M2.dense(), [[1, a], [a, 1]], rtol=1e-14)
    cube = gcd_matrix(half, cube_construction(2))
    t1, t2 = half.weight_at(1), half.weight_at(2)
    block1 = np.array([[1, t1], [t1, 1]])
    block2 = np.array([[1, t2], [t2, 1]])
    # members sort as (zero, e1, e1+e2, e2): kron over position 1 outer
    kron = np.kron(block1, block2)
    order = [0, 2, 3, 1]
    assert np.allclose(cube.dense(), kron[np.ix_(order, order)], rtol=1e-13)


def test_gcd_matrix_symmetric_unit_diagonal():
    B = IndexSet([zero, e1, e2, e1 + e2, MultiIndex({1: 2})])
    D = gcd_matrix(half, B).dense()
    assert np.allclose(D, D.T)
    assert np.allclose(np.diag(D), 1.0)
    assert (D > 0).all() and (D <= 1.0).all()


def test_spectral_norm_closed_forms():
    assert spectral_norm(gcd_matrix(half, IndexSet([zero]))) == pytest.approx(1.0)
    lam = spectral_norm(gcd_matrix(half, IndexSet([zero, e1])))
    assert lam == pytest.approx(1 + 1 / math.sqrt(2), rel=1e-12)
    for k in (2, 3, 5):
        lam = spectral_norm(gcd_matrix(half, cube_construction(k)))
        closed = math.prod(1 + half.weight_at(j) for j in range(1, k + 1))
        assert lam == pytest.approx(closed, rel=1e-10)


def test_spectral_norm_matches_dense_eigensolver():
    rng = random.Random(5)
    for _ in range(5):
        members = set()
        while len(members) < 12:
            members.add(MultiIndex({j: rng.randint(1, 2) for j in rng.sample(range(1, 8), rng.randint(0, 5))}))
        M = gcd_matrix(half, IndexSet(members))
        lam = spectral_norm(M)
        assert lam == pytest.approx(float(np.linalg.eigvalsh(M.dense())[-1]), rel=1e-10)


def test_matrix_free_matvec_agrees():
    rng = random.Random(11)
    members = set()
    while len(members) < 50:
        members.add(MultiIndex({j: 1 for j in rng.sample(range(1, 9), rng.randint(0, 5))}))
    B = IndexSet(members)
    lam_dense = spectral_norm(gcd_matrix(half, B))
    lam_free = spectral_norm(gcd_matrix(half, B, dense_limit=0))
    assert lam_free == pytest.approx(lam_dense, rel=1e-11)


def test_power_iteration_failure_carries_state():
    M = gcd_matrix(half, IndexSet([zero, e1, e2]))
    with pytest.raises(ConvergenceError) as err:
        spectral_norm(M, tol=1e-30, max_iterations=2)
    assert err.value.estimate is not None
    assert err.value.iterations == 2


def test_min_eigenvalue_closed_forms():
    assert min_eigenvalue(gcd_matrix(half, IndexSet([zero]))) == pytest.approx(1.0)
    mn = min_eigenvalue(gcd_matrix(half, IndexSet([zero, e1])))
    assert mn == pytest.approx(1 - 1 / math.sqrt(2), rel=1e-12)


def test_min_eigenvalue_positive_and_cross_checked():
    rng = random.Random(9)
    for _ in range(10):
        members = set()
        target = rng.randint(2, 25)
        while len(members) < target:
            members.add(MultiIndex({j: rng.randint(1, 2) for j in rng.sample(range(1, 9), rng.randint(0, 6))}))
        M = gcd_matrix(half, IndexSet(members))
        mn = min_eigenvalue(M)
        assert mn > 0
        np.linalg.cholesky(M.dense())  # independent positive-definiteness witness


def test_min_eigenvalue_shifted_path():
    rng = random.Random(13)
    members = set()
    while len(members) < 210:
        members.add(MultiIndex({j: 1 for j in rng.sample(range(1, 11), rng.randint(0, 7))}))
    M = gcd_matrix(half, IndexSet(members))
    mn = min_eigenvalue(M)
    assert mn == pytest.approx(float(np.linalg.eigvalsh(M.dense())[0]), abs=1e-8)


def test_group_by_support_examples():
    B = IndexSet([e1, MultiIndex({1: 2}), MultiIndex({1: 3})])
    groups = group_by_support(B)
    assert len(groups) == 1
    rep, block = groups[0]
    assert rep == e1 and len(block) == 3

    B2 = IndexSet([zero, e1, MultiIndex({1: 2}), e2])
    groups2 = {str(rep): len(block) for rep, block in group_by_support(B2)}
    assert groups2 == {"mi": 1, "mi 1:1": 2, "mi 2:1": 1}


@given(square_free_sets(max_index=6, max_n=8))
def test_group_by_support_square_free_singletons(B):
    groups = group_by_support(B)
    assert all(len(block) == 1 for _, block in groups)
    assert sum(len(block) for _, block in groups) == len(B)


def test_weighted_sf_form_examples():
    assert weighted_sf_form(half, IndexSet([e1]), [5]) == pytest.approx(5.0)
    reps = IndexSet([zero, e1])
    assert weighted_sf_form(half, reps, [1, 1]) == pytest.approx(gcd_sum(half, reps), rel=1e-14)
    t1 = half.weight_at(1)
    assert weighted_sf_form(half, reps, [4, 1]) == pytest.approx(5 + 4 * t1, rel=1e-14)


def test_weighted_sf_form_validation():
    with pytest.raises(DomainError):
        weighted_sf_form(half, IndexSet([zero, e1]), [1])
    with pytest.raises(DomainError):
        weighted_sf_form(half, IndexSet([zero]), [0])


def test_support_grouping_ratio_reported():
    B = IndexSet([zero, e1, MultiIndex({1: 2}), e2, MultiIndex({1: 1, 2: 1})])
    ratio = support_grouping_ratio(half, B)
    assert math.isfinite(ratio) and ratio > 0


def test_cube_closed_form():
    assert cube_sum_closed_form(half, 1) == pytest.approx(2 + math.sqrt(2), rel=1e-14)
    t1, t2 = half.weight_at(1), half.weight_at(2)
    assert cube_sum_closed_form(half, 2) == pytest.approx((2 + 2 * t1) * (2 + 2 * t2), rel=1e-14)
    assert cube_sum_closed_form(half, 2) == pytest.approx(10.7708205, abs=1e-6)
    # vanishing-weight limit: the sum approaches the diagonal count 2^k
    tiny = PrimePowerWeights(30.0)
    assert cube_sum_closed_form(tiny, 8) == pytest.approx(2**8, rel=1e-8)


@settings(max_examples=30)
@given(st.integers(1, 8))
def test_cube_identity_small(k):
    direct = gcd_sum(half, cube_construction(k))
    assert direct == pytest.approx(cube_sum_closed_form(half, k), rel=1e-12)


@given(square_free_sets(max_index=6, max_n=8))
def test_rayleigh_sandwich_random(B):
    rb = rayleigh_bounds(half, B)
    assert rb.lower <= rb.spectral * (1 + 1e-10)
    assert rb.spectral <= rb.upper * (1 + 1e-10)
