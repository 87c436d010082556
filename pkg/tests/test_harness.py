from __future__ import annotations

import pytest

from sumsetlab import harness
from sumsetlab.groups import GroupSpec, generated_subgroup
from sumsetlab.harness import (
    TrialConfig,
    ViolationReport,
    check_kneser_suite,
    check_lemma_0_25,
    check_propositions,
    falsify_stability_stochastic,
    sample_subset,
    verify_stability_exhaustive,
)
from sumsetlab.sets import DenseSubset, index5_cosets, k_fold_sumset, period, sumset


def test_kneser_equality_cases():
    G = GroupSpec((10,))
    A = DenseSubset.from_indices(G, [0, 1])
    S = sumset(A, A)
    assert len(S) == 3 == len(A) + len(A) - period(S).order
    H = DenseSubset(G, generated_subgroup(G, [2]).mask)
    S = sumset(H, H)
    assert len(S) == 5 == 5 + 5 - period(S).order
    for pid in ("kneser", "union", "pigeonhole"):
        assert harness._check(pid, [A, A], 0) is None
        assert harness._check(pid, [H, H], 0) is None


def test_quarter_examples(z55):
    assert harness._check("quarter-density", [DenseSubset(z55, 1)], 0) is None
    F = index5_cosets(z55)[0][1][0]
    A = DenseSubset(z55, F)
    assert k_fold_sumset(A, 2) == A
    assert harness._check("quarter-density", [A], 0) is None


def test_two_coset_set_meets_two_cosets(z55):
    _F, masks = index5_cosets(z55)[0]
    A = DenseSubset(z55, masks[0] | masks[1])
    assert not k_fold_sumset(A, 3).is_full()
    for c in [(1, 0), (0, 1), (1, 1)]:
        assert harness._check("three-coset-exclusion", [A], 0, {"functional": list(c)}) is None


def test_three_coset_union_fills(z55):
    for _F, masks in index5_cosets(z55):
        A = DenseSubset(z55, masks[0] | masks[2] | masks[3])
        assert k_fold_sumset(A, 3).is_full()


def test_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(None, sampler="bogus")
    with pytest.raises(ValueError):
        TrialConfig(None, window=(0.6, 0.2))


def test_density_window_sampler(z55):
    cfg = TrialConfig(z55, sampler="density-window", window=(0.3, 0.5))
    for t in range(200):
        A = sample_subset(cfg, z55, cfg.rng(t))
        assert 8 <= len(A) <= 12


def test_same_seed_same_trials(z55):
    cfg = TrialConfig(z55, trials=50, seed=9)
    a = [sample_subset(cfg, z55, cfg.rng(t)).bits for t in range(50)]
    b = [sample_subset(cfg, z55, cfg.rng(t)).bits for t in range(50)]
    assert a == b
    other = TrialConfig(z55, trials=50, seed=10)
    assert a != [sample_subset(other, z55, other.rng(t)).bits for t in range(50)]


def test_kneser_suite_small_run():
    stats = {}
    assert check_kneser_suite(TrialConfig(None, trials=300, seed=2), stats=stats) == []
    assert stats["pairs"] == 300
    assert stats["nonfull_sumset"] > 0


def test_suites_independent_of_workers(z55):
    cfg = TrialConfig(z55, trials=40, seed=4)
    s1, s2 = {}, {}
    assert check_propositions(cfg, workers=1, stats=s1) == check_propositions(cfg, workers=2, stats=s2)
    assert s1 == s2


def test_quarter_and_props_small_runs(z55, z555):
    stats = {}
    assert check_lemma_0_25(TrialConfig(z55, trials=300, seed=1), stats=stats) == []
    assert stats["small_doubling"] > 0
    stats = {}
    assert check_propositions(TrialConfig(z555, trials=60, seed=1), stats=stats) == []
    assert stats["dense_nonfull"] > 0


def test_suites_require_z5(z55):
    with pytest.raises(ValueError):
        check_lemma_0_25(TrialConfig(GroupSpec((6,)), trials=1))
    with pytest.raises(ValueError):
        check_propositions(TrialConfig(GroupSpec((5,) * 4), trials=1))


def test_violation_replay(monkeypatch, z55):
    monkeypatch.setitem(harness._PROPERTY_CHECKS, "at-most-two",
                        lambda sets, _d: ("big", "small") if len(sets[0]) > 2 else None)
    v = harness._check("at-most-two", [DenseSubset.from_indices(z55, [0, 1, 2])], 7)
    assert isinstance(v, ViolationReport)
    assert v.replay()
    assert v.to_json()["trial"] == 7
    ok = ViolationReport("stability", (harness.format_set_hex(DenseSubset(z55, 1)),), "", "")
    assert not ok.replay()


def test_stability_exhaustive_z5():
    rep = verify_stability_exhaustive(1, sizes=(2, 3))
    assert rep.survivors == {2: 10, 3: 0}
    assert rep.checked == {2: 10, 3: 10}
    assert rep.ok


def test_stability_exhaustive_size_ten(z55):
    rep = verify_stability_exhaustive(2, sizes=(10,))
    assert rep.survivors[10] == 60 == 6 * 10
    assert rep.violations == []
    assert rep.automorphism_check[10]


def test_falsifier_smoke_n2():
    rep = falsify_stability_stochastic(2, restarts=5, seed=3, steps=60)
    assert rep.start_size == 8
    assert rep.violations == []
    assert rep.to_json()["restarts"] == 5
