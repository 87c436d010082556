"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the terminal summary.
"""

from __future__ import annotations

import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from sumsetlab.constructions import build_decomp, build_mod3, build_two_coset, build_x22
from sumsetlab.groups import GroupSpec, all_groups, diam_plus
from sumsetlab.harness import (
    TrialConfig,
    check_kneser_suite,
    check_lemma_0_25,
    check_propositions,
    falsify_stability_stochastic,
    verify_stability_exhaustive,
)
from sumsetlab.lp import certify_all
from sumsetlab.parallel import default_workers
from sumsetlab.search import is_prime, mk_bruteforce, mk_formula, nk_search, reduction_identity_check
from sumsetlab.sets import DenseSubset, index5_cosets, k_fold_sumset
from sumsetlab.spectral import (
    avoid_zero_translate,
    cubic_sum,
    find_witness,
    parseval_offprincipal,
)


def record(n: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> None:
    in_time = elapsed <= limit
    status = "PASS" if ok and in_time else "FAIL"
    line = f"criterion {n:2d} {status}: {title} ({elapsed:.1f}s / {limit:.0f}s){' - ' + detail if detail else ''}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, detail
    assert in_time, f"took {elapsed:.1f}s, limit {limit}s"


def test_criterion_01_mk_formula_vs_bruteforce():
    t0 = time.perf_counter()
    bad = []
    groups = all_groups(16)
    for G in groups:
        for k in range(1, 6):
            f, _ = mk_formula(G, k)
            b = mk_bruteforce(G, k).value
            if f != b:
                bad.append((str(G), k, f, b))
    record(1, "M_k formula = brute force, |G| <= 16, k in 1..5", not bad, time.perf_counter() - t0, 300,
           f"{len(groups)} groups, mismatches {bad}")


def test_criterion_02_nk_z5_and_z5_squared():
    t0 = time.perf_counter()
    a = nk_search(GroupSpec((5,)), 3).value
    b = nk_search(GroupSpec((5, 5)), 3).value
    record(2, "N_3(Z_5) = 2 and N_3(Z_5^2) = 7", (a, b) == (2, 7), time.perf_counter() - t0, 600,
           f"got {a}, {b}")


def test_criterion_03_nk_z2_fourth():
    t0 = time.perf_counter()
    v = nk_search(GroupSpec((2, 2, 2, 2)), 3).value
    record(3, "N_3(Z_2^4) = 5", v == 5, time.perf_counter() - t0, 30, f"got {v}")


def test_criterion_04_small_group_table():
    t0 = time.perf_counter()
    bad = []
    checks = 0
    for G in all_groups(12):
        n, dp = G.order, diam_plus(G)
        expect = {1: n - 1}
        if 2 < dp:
            expect[2] = n // 2
        if dp - 1 >= 1:
            expect[dp - 1] = G.rank + 1
        for k in (dp, dp + 1):
            if k >= 1:
                expect[k] = 1 if is_prime(n) else 0
        for k, v in sorted(expect.items()):
            got = nk_search(G, k).value
            checks += 1
            if got != v:
                bad.append((str(G), k, v, got))
    record(4, "small-group N_k table, |G| <= 12", not bad, time.perf_counter() - t0, 600,
           f"{checks} values, mismatches {bad}")


def test_criterion_05_k3_spot_values():
    t0 = time.perf_counter()
    got = {m: nk_search(GroupSpec((m,)), 3).value for m in (7, 13, 9)}
    record(5, "N_3(Z_7) = 2, N_3(Z_13) = 4, N_3(Z_9) = 3", got == {7: 2, 13: 4, 9: 3},
           time.perf_counter() - t0, 60, f"got {got}")


def test_criterion_06_exhaustive_stability():
    t0 = time.perf_counter()
    rep = verify_stability_exhaustive(2, sizes=(8, 9, 10, 11), workers=default_workers())
    ok = not rep.violations and rep.survivors[11] == 0 and rep.survivors[10] == 60 and all(rep.automorphism_check.values())
    record(6, "every A in Z_5^2, |A| in 8..10, 3A != G lies in two cosets; 60 at size 10; 0 at 11", ok,
           time.perf_counter() - t0, 1200, f"survivors {rep.survivors}, violations {len(rep.violations)}")


def test_criterion_07_lp_certificates():
    t0 = time.perf_counter()
    certs = certify_all()
    ok = len(certs) == 10 and all(
        c.certified and c.margin >= 0.04 and c.method_agreement <= 1e-12 for c in certs
    )
    worst = min(c.margin for c in certs)
    record(7, "10 LP minima exceed -9/14, margin >= 0.04, methods agree to 1e-12", ok,
           time.perf_counter() - t0, 1, f"smallest margin {worst:.5f}")


def _spectral_sample(G: GroupSpec, rng: np.random.Generator) -> DenseSubset:
    """Random set with ``0 not in 3A``: a random subset of a union of two
    cosets, or a sparse random set, translated into position."""
    cosets = index5_cosets(G)
    while True:
        if rng.random() < 0.5:
            _F, masks = cosets[int(rng.integers(len(cosets)))]
            i, j = rng.choice(5, 2, replace=False)
            pool = [x for x in range(G.order) if (masks[i] | masks[j]) >> x & 1]
            size = int(rng.integers(1, len(pool) + 1))
        else:
            pool = list(range(G.order))
            size = int(rng.integers(1, max(2, G.order // 5)))
        A = DenseSubset.from_indices(G, (pool[int(t)] for t in rng.choice(len(pool), size, replace=False)))
        if not k_fold_sumset(A, 3).is_full():
            return avoid_zero_translate(A)


def test_criterion_08_spectral_identities():
    t0 = time.perf_counter()
    exceptions, worst_cubic, worst_pars, count = 0, 0.0, 0.0, 0
    rng = np.random.default_rng(8)
    for n in (2, 3):
        G = GroupSpec((5,) * n)
        for _ in range(1000):
            A = _spectral_sample(G, rng)
            assert not k_fold_sumset(A, 3).bits & 1
            a = float(A.density())
            worst_cubic = max(worst_cubic, abs(cubic_sum(A)))
            worst_pars = max(worst_pars, abs(parseval_offprincipal(A) - a * (1 - a)))
            w = find_witness(A)
            if w.realpart < a * a / (1 - a):
                exceptions += 1
            count += 1
    ok = worst_cubic <= 1e-10 and worst_pars <= 1e-12 and exceptions == 0
    record(8, "cubic sum = 0, Parseval, witness bound on 2000 sets", ok, time.perf_counter() - t0, 120,
           f"max |cubic| {worst_cubic:.2e}, max Parseval err {worst_pars:.2e}, bound failures {exceptions}/{count}")


def test_criterion_09_property_suites():
    t0 = time.perf_counter()
    z2, z3 = GroupSpec((5, 5)), GroupSpec((5, 5, 5))
    stats: dict = {}
    found = []
    found += check_kneser_suite(TrialConfig(None, trials=10_000, seed=1), stats=stats)
    q = {}
    found += check_lemma_0_25(TrialConfig(z2, trials=10_000, seed=2), stats=q)
    found += check_lemma_0_25(TrialConfig(z3, trials=10_000, seed=3), stats=q)
    p = {}
    found += check_propositions(TrialConfig(z2, trials=10_000, seed=4), stats=p)
    found += check_propositions(TrialConfig(z3, trials=1_000, seed=5), stats=p)
    # the hypotheses must actually be exercised
    exercised = stats["nonfull_sumset"] > 0 and q["small_doubling"] > 0 and p["dense_nonfull"] > 0 and p["triples"] > 0
    record(9, "Kneser/union/pigeonhole, quarter-density, coset propositions, triple lemma", not found and exercised,
           time.perf_counter() - t0, 600,
           f"{len(found)} violations; hits kneser {stats}, quarter {q}, props {p}")


def test_criterion_10_constructions_and_reduction():
    t0 = time.perf_counter()
    recipes = [build_two_coset(n) for n in (1, 2, 3)]
    recipes += [build_x22(n) for n in (2, 3)]
    recipes += [build_decomp(fs) for fs in ([7], [13], [7, 7])]
    recipes += [build_mod3(fs) for fs in ([5, 3], [5, 4])]
    failed = [(r.kind, str(r.group), r.checks) for r in recipes if not r.verified]
    bad_red = []
    for G in all_groups(16):
        for k in (1, 2, 3):
            r = reduction_identity_check(G, k)
            if not r.holds:
                bad_red.append((str(G), k, r.mk, r.rhs))
    record(10, "construction verifiers and M_k = max |H| N_k(G/H) for |G| <= 16", not failed and not bad_red,
           time.perf_counter() - t0, 900, f"{len(recipes)} recipes, failures {failed}, identity failures {bad_red}")


def test_criterion_11_stochastic_falsifier():
    t0 = time.perf_counter()
    rep = falsify_stability_stochastic(3, restarts=1000, seed=1, workers=default_workers())
    record(11, "stochastic falsifier in Z_5^3, 1000 restarts, seed 1", not rep.violations,
           time.perf_counter() - t0, 1800,
           f"{len(rep.violations)} counterexamples, {rep.nonfull_states} non-full states reached, {rep.evaluations} evaluations")
