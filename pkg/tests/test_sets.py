from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive
from conftest import to_tuples
from sumsetlab.groups import GroupSpec, generated_subgroup
from sumsetlab.sets import (
    DenseSubset,
    GroupMismatchError,
    coset_profile,
    format_set,
    format_set_hex,
    generates,
    index5_cosets,
    is_aperiodic,
    is_maximal_nonfull,
    k_fold_sumset,
    min_cover_k,
    parse_set,
    partial_sumsets,
    period,
    sumset,
    translate,
    two_coset_cover_exists,
)

GROUPS = [(6,), (2, 4), (3, 3), (2, 2, 2), (10,), (5, 5)]


def subsets(fs):
    G = GroupSpec(fs)
    return st.integers(0, G.full_mask).map(lambda b: DenseSubset(G, b))


def pairs():
    return st.sampled_from(GROUPS).flatmap(lambda fs: st.tuples(subsets(fs), subsets(fs)))


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_sumset_matches_naive(AB):
    A, B = AB
    fs = A.group.factors
    assert to_tuples(sumset(A, B)) == naive.sumset(to_tuples(A), to_tuples(B), fs)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(subsets), st.integers(1, 5))
def test_k_fold_matches_naive(A, k):
    fs = A.group.factors
    if not A.bits:
        assert k_fold_sumset(A, k).bits == 0
        return
    assert to_tuples(k_fold_sumset(A, k)) == naive.kfold(to_tuples(A), k, fs)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(subsets))
def test_period_matches_naive(A):
    assert set(A.group.decode(i) for i in period(A).members()) == naive.period(to_tuples(A), A.group.factors)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(subsets), st.data())
def test_translate_matches_naive(A, data):
    G = A.group
    g = data.draw(st.integers(0, G.order - 1))
    x = G.decode(g)
    assert to_tuples(A.translate(g)) == {naive.add(a, x, G.factors) for a in to_tuples(A)}


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(subsets), st.integers(1, 4))
def test_period_of_sumset_contains_period(A, k):
    if not A.bits:
        return
    P = period(A).mask
    assert P & ~period(k_fold_sumset(A, k)).mask == 0


def test_period_conventions():
    G = GroupSpec((6,))
    assert period(DenseSubset(G, 0)).mask == G.full_mask
    assert period(DenseSubset.full(G)).mask == G.full_mask
    evens = DenseSubset.from_indices(G, [0, 2, 4])
    assert period(evens).order == 3
    assert is_aperiodic(DenseSubset.from_indices(G, [0, 1]))


def test_set_algebra_and_group_mismatch():
    G = GroupSpec((6,))
    A = DenseSubset.from_indices(G, [0, 1, 2])
    B = DenseSubset.from_indices(G, [2, 3])
    assert (A | B).indices() == [0, 1, 2, 3]
    assert (A & B).indices() == [2]
    assert (A - B).indices() == [0, 1]
    assert (A & B) <= A
    assert A.complement().indices() == [3, 4, 5]
    assert A.negate().indices() == [0, 4, 5]
    assert A.density() == Fraction(1, 2)
    with pytest.raises(GroupMismatchError):
        A | DenseSubset(GroupSpec((2, 2)), 1)


def test_literals_roundtrip():
    G = GroupSpec((5, 5))
    A = DenseSubset.from_elements(G, [(0, 0), (1, 0), (3, 4)])
    lit = format_set(A)
    assert lit == "{(0,0),(1,0),(3,4)}"
    assert parse_set(lit, G) == A
    h = format_set_hex(A)
    assert h.startswith("hex:5,5:")
    assert parse_set(h) == A
    assert parse_set("{1,4}", GroupSpec((7,))).indices() == [1, 4]
    assert parse_set("{}", G).bits == 0


def test_literal_errors():
    G = GroupSpec((5, 5))
    with pytest.raises(ValueError):
        parse_set("{(0,0)}")
    with pytest.raises(ValueError):
        parse_set("{(5,0)}", G)
    with pytest.raises(ValueError):
        parse_set("{(1,2,3)}", G)
    with pytest.raises(GroupMismatchError):
        parse_set("hex:7:3", G)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(GROUPS).flatmap(subsets))
def test_literal_roundtrip_property(A):
    assert parse_set(format_set(A), A.group) == A
    assert parse_set(format_set_hex(A)) == A


def test_partial_sumsets():
    G = GroupSpec((7,))
    A = DenseSubset.from_indices(G, [0, 1])
    parts = partial_sumsets(A, 3)
    assert parts[0] == 1
    assert [p.bit_count() for p in parts] == [1, 2, 3, 4]


def test_maximal_nonfull_examples():
    G = GroupSpec((5, 5))
    F = generated_subgroup(G, [G.encode((1, 0))])
    two = DenseSubset(G, F.mask | translate(G, F.mask, G.encode((0, 1))))
    assert not k_fold_sumset(two, 3).is_full()
    assert is_maximal_nonfull(two, 3)
    small = DenseSubset.from_indices(G, [0])
    assert not is_maximal_nonfull(small, 3)
    assert not is_maximal_nonfull(DenseSubset.full(G), 3)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(6,), (2, 4), (3, 3)]).flatmap(subsets), st.integers(1, 3))
def test_maximal_matches_definition(A, k):
    G = A.group
    fs = G.factors
    full = naive.order(fs)
    T = to_tuples(A)
    nonfull = len(naive.kfold(T, k, fs)) < full if T else True
    expected = nonfull and all(
        len(naive.kfold(T | {g}, k, fs)) == full for g in naive.elements(fs) if g not in T
    )
    assert is_maximal_nonfull(A, k) == expected


def test_min_cover_k():
    G = GroupSpec((10,))
    assert min_cover_k(DenseSubset.from_indices(G, [1])) == 9
    assert min_cover_k(DenseSubset.from_indices(G, [2])) is None
    assert min_cover_k(DenseSubset(GroupSpec(()), 0)) == 0
    assert generates(DenseSubset.from_indices(G, [2, 5]))


def test_coset_profile_and_two_coset_cover(z55):
    G = z55
    cos = index5_cosets(G)
    assert len(cos) == 6
    F, masks = cos[0]
    A = DenseSubset(G, masks[1] | masks[3])
    hit = two_coset_cover_exists(A)
    assert hit is not None
    prof = coset_profile(A, F, next(i for i in range(G.order) if i not in F))
    assert sorted(prof.counts) == [0, 0, 0, 5, 5]
    assert sum(prof.densities) == 2
    spread = DenseSubset.from_elements(G, [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 1)])
    assert two_coset_cover_exists(spread) is None


def test_coset_profile_errors(z55):
    G = z55
    F, _ = index5_cosets(G)[0]
    A = DenseSubset(G, 1)
    with pytest.raises(ValueError):
        coset_profile(A, F, 0)
    with pytest.raises(ValueError):
        two_coset_cover_exists(DenseSubset(GroupSpec((3,)), 1))
