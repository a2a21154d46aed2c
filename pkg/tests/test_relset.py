from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from joinopt.errors import ContractViolation
from joinopt.relset import (
    deposit_subset,
    format_relset,
    from_members,
    iter_proper_subsets,
    iter_subsets,
    members,
    next_combination,
    rank_combination,
    unrank_combination,
    unrank_combinations,
)


def colex(n, k):
    # colex order = sort by the reversed member tuple
    return sorted((from_members(c) for c in combinations(range(n), k)), key=lambda s: sorted(members(s), reverse=True))


@pytest.mark.parametrize("n", range(0, 9))
def test_unrank_matches_colex_listing(n):
    for k in range(n + 1):
        expected = colex(n, k)
        assert [unrank_combination(r, k, n) for r in range(comb(n, k))] == expected


def test_colex_is_numeric_order():
    for k in range(1, 7):
        assert colex(7, k) == sorted(colex(7, k))


@given(st.integers(1, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))).flatmap(
    lambda nk: st.tuples(st.just(nk[0]), st.just(nk[1]), st.integers(0, comb(nk[0], nk[1]) - 1))
))
def test_rank_roundtrip(nkr):
    n, k, r = nkr
    s = unrank_combination(r, k, n)
    assert s.bit_count() == k and s < 1 << n
    assert rank_combination(s) == r


def test_unrank_rejects_bad_rank():
    with pytest.raises(ContractViolation):
        unrank_combination(comb(6, 3), 3, 6)
    with pytest.raises(ContractViolation):
        unrank_combination(-1, 3, 6)
    with pytest.raises(ContractViolation):
        unrank_combination(0, 7, 6)


def test_next_combination_walks_colex():
    s = 0b111
    seen = [s]
    while True:
        s = next_combination(s)
        if s >= 1 << 8:
            break
        seen.append(s)
    assert seen == colex(8, 3)


@pytest.mark.parametrize("n,k", [(10, 0), (10, 4), (20, 10), (40, 3), (64, 32), (64, 64)])
def test_vectorised_unrank_agrees(n, k):
    total = comb(n, k)
    ranks = np.unique(np.linspace(0, total - 1, num=min(total, 500), dtype=np.float64).astype(np.int64))
    ranks = ranks[ranks < total]
    got = unrank_combinations(ranks, k, n)
    assert got.dtype == np.uint64
    assert [int(x) for x in got] == [unrank_combination(int(r), k, n) for r in ranks]


def test_vectorised_unrank_rejects_out_of_range():
    with pytest.raises(ContractViolation):
        unrank_combinations(np.array([comb(10, 3)]), 3, 10)


def test_deposit_examples():
    assert deposit_subset(0b101, 0b110100) == 0b100100
    assert deposit_subset(0b111, 0b10101) == 0b10101
    for bad in (0, 8):
        with pytest.raises(ContractViolation):
            deposit_subset(bad, 0b10101)
    with pytest.raises(ContractViolation):
        deposit_subset(1, 0)


@given(st.integers(1, 2**20 - 1))
def test_iter_subsets_is_deposit_order(superset):
    m = superset.bit_count()
    if m > 12:
        return
    expected = [deposit_subset(mask, superset) for mask in range(1, 1 << m)]
    assert list(iter_subsets(superset)) == expected
    assert list(iter_proper_subsets(superset)) == expected[:-1]
    assert expected == sorted(expected)


def test_members_and_format():
    assert members(0b10110) == [1, 2, 4]
    assert from_members([4, 1, 2]) == 0b10110
    assert format_relset(0b101) == "{0,2}"
