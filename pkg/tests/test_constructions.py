from __future__ import annotations

from fractions import Fraction
from math import gcd

import pytest

import naive
from conftest import to_tuples
from sumsetlab.constructions import (
    ConstructionError,
    build_decomp,
    build_mod3,
    build_two_coset,
    build_x22,
)
from sumsetlab.groups import GroupSpec
from sumsetlab.search import nk_search
from sumsetlab.sets import k_fold_sumset, period


def naive_missing(A):
    fs = A.group.factors
    return set(naive.elements(fs)) - naive.kfold(to_tuples(A), 3, fs)


@pytest.mark.parametrize("fs,size", [([7], 2), ([13], 4), ([7, 7], 16)])
def test_decomp(fs, size):
    r = build_decomp(fs)
    assert r.output.cardinality == size
    assert r.verified, r.checks
    n = r.group.order
    assert size == (n - 1) // 3
    assert gcd(size, n) == 1
    assert period(r.output).order == 1


def test_decomp_rejects_bad_factor():
    with pytest.raises(ConstructionError):
        build_decomp([5])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_two_coset(n):
    r = build_two_coset(n)
    assert r.verified, r.checks
    assert r.output.cardinality == 2 * 5 ** (n - 1)


def test_two_coset_in_z5():
    r = build_two_coset(1, cosets=(0, 2))
    assert r.output.indices() == [0, 2]
    assert r.verified


def test_two_coset_errors():
    with pytest.raises(ConstructionError):
        build_two_coset(2, cosets=(1, 1))


@pytest.mark.parametrize("n,size", [(2, 7), (3, 37)])
def test_x22(n, size):
    r = build_x22(n)
    assert r.output.cardinality == size == (3 * 5 ** (n - 1) - 1) // 2
    assert r.verified, r.checks
    G = r.group
    four_e = G.encode((4,) + (0,) * (n - 1))
    assert r.expected_missing == [four_e]


def test_x22_missing_set_by_naive_oracle():
    r = build_x22(2)
    assert naive_missing(r.output) == {(4, 0)}


def test_x22_rejects_bad_s():
    G = GroupSpec((5, 5))
    h = G.encode((0, 1))
    with pytest.raises(ConstructionError):
        build_x22(2, S=[h, G.neg(h)])
    with pytest.raises(ConstructionError):
        build_x22(1)


def test_mod3_odd():
    r = build_mod3([5, 3])
    assert r.output.cardinality == 4
    m = 1
    assert Fraction(2 * m + 1, 6 * m + 4) * 15 - Fraction(1, 2) == 4
    assert r.verified, r.checks
    target = r.expected_missing[0]
    assert r.group.decode(target) in naive_missing(r.output)


def test_mod3_even():
    r = build_mod3([5, 4])
    assert r.output.cardinality == 6
    assert r.verified, r.checks
    assert r.info["maximal_nonfull"]


def test_mod3_trivial_h_size_only():
    # the size formula gives 1; with H trivial the maximality claim does not hold
    r = build_mod3([5])
    assert r.output.cardinality == 1
    assert not k_fold_sumset(r.output, 3).is_full()
    assert r.checks["maximal_for_target"] is False


def test_mod3_errors():
    with pytest.raises(ConstructionError):
        build_mod3([7, 3])
    with pytest.raises(ConstructionError):
        build_mod3([])


@pytest.mark.parametrize("builder,arg,k", [
    (build_decomp, [7], 3),
    (build_decomp, [13], 3),
    (build_two_coset, 2, 3),
    (build_x22, 2, 3),
    (build_mod3, [5, 3], 3),
])
def test_constructions_bounded_by_search(builder, arg, k):
    r = builder(arg)
    found = nk_search(r.group, k).value
    if r.checks.get("aperiodic", r.info.get("aperiodic")) and r.checks.get("maximal", r.info.get("maximal_nonfull")):
        assert r.output.cardinality <= found


def test_recipe_json():
    js = build_x22(2).to_json()
    assert js["size"] == 7
    assert js["missing_from_3A"] == ["(4,0)"]
    assert js["verified"] is True
