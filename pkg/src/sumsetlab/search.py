"""The constants M_k(G), N_k(G) and b+_rho(G).

``M_k`` has a closed form (Bajnok) checked against a brute-force scan.
``N_k`` and ``b+_rho`` are found by exhaustive size-descending enumeration;
the first size with a qualifying set is the answer.  Empty maxima are 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, isqrt
from typing import Optional

import numpy as np

from . import batch
from .groups import (
    BudgetExceededError,
    GroupSpec,
    Subgroup,
    diam_plus,
    enumerate_subgroups,
    quotient_map,
)
from .parallel import ordered_map
from .sets import (
    DenseSubset,
    format_set,
    is_aperiodic,
    is_maximal_nonfull,
    k_fold_sumset,
    period,
)

DEFAULT_BUDGET = 50_000_000
WITNESS_CAP = 16


@dataclass
class SearchReport:
    group: GroupSpec
    k: int
    constant: str
    value: int
    witnesses: list[DenseSubset] = field(default_factory=list)
    nodes_visited: int = 0
    elapsed: float = 0.0
    method: str = "exhaustive"
    hits: int = 0
    sizes_covered: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "group": self.group.literal(),
            "k": self.k,
            "constant": self.constant,
            "value": self.value,
            "witnesses": [format_set(w) for w in self.witnesses],
            "nodes": self.nodes_visited,
            "elapsed_ms": round(self.elapsed * 1000, 3),
            "method": self.method,
        }
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# M_k
# ---------------------------------------------------------------------------

def divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def mk_formula(G: GroupSpec, k: int) -> tuple[int, int]:
    """``(M_k(G), maximizing divisor)``; ties go to the smallest divisor."""
    if k < 1:
        raise ValueError("k must be positive")
    m = G.order
    best = None
    for d in divisors(m):
        v = ((d - 2) // k + 1) * (m // d)
        if best is None or v > best[0]:
            best = (v, d)
    return best


def _witness_key(G: GroupSpec, bits: int):
    # prefer the most periodic witness, then the lexicographically first
    A = DenseSubset(G, bits)
    return (-period(A).order, A.indices())


def mk_bruteforce(
    G: GroupSpec,
    k: int,
    descending: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> SearchReport:
    """Largest ``|A|`` with ``kA != G`` by direct enumeration.

    The full scan covers all ``2^|G|`` subsets (|G| <= 16).  Descending mode
    walks sizes down from the pigeonhole bound and stops at the first hit.
    """
    t0 = time.perf_counter()
    n = G.order
    if k < 1:
        raise ValueError("k must be positive")
    if n == 1:
        # every nonempty set fills the trivial group
        return SearchReport(G, k, "Mk", 0, [DenseSubset(G, 0)], 2, time.perf_counter() - t0, "exhaustive")
    batch.check_order(G)
    full = np.uint64(G.full_mask)
    if not descending:
        if n > 16:
            raise BudgetExceededError(f"full scan needs |G| <= 16, got {n}; use descending mode")
        X = batch.all_masks(n)
        kX = batch.partial_sumsets_batch(G, X, k)[k]
        good = X[kX != full]
        sizes = batch.popcount(good)
        value = int(sizes.max()) if good.size else 0
        cands = [int(x) for x in good[sizes == value]]
        w = min(cands, key=lambda b: _witness_key(G, b))
        return SearchReport(G, k, "Mk", value, [DenseSubset(G, w)], int(X.size),
                            time.perf_counter() - t0, "exhaustive", hits=len(cands))
    # |A| + |(k-1)A| <= |G| with |(k-1)A| >= |A| whenever k >= 2
    top = n - 1 if k == 1 else n // 2
    nodes = 0
    for s in range(top, -1, -1):
        c = comb(n, s)
        if nodes + c > budget:
            raise BudgetExceededError(f"M_k descending scan: sizes {top}..{s + 1} covered, size {s} needs {c} nodes")
        nodes += c
        cands = []
        for X in batch.combination_chunks(n, s):
            kX = batch.partial_sumsets_batch(G, X, k)[k]
            cands.extend(int(x) for x in X[kX != full])
        if cands:
            w = min(cands, key=lambda b: _witness_key(G, b))
            return SearchReport(G, k, "Mk", s, [DenseSubset(G, w)], nodes,
                                time.perf_counter() - t0, "descending", hits=len(cands),
                                sizes_covered=(top, s))
    return SearchReport(G, k, "Mk", 0, [DenseSubset(G, 0)], nodes, time.perf_counter() - t0, "descending")


# ---------------------------------------------------------------------------
# N_k
# ---------------------------------------------------------------------------

def nk_upper_bound(G: GroupSpec, k: int) -> int:
    return max(0, (G.order - 2) // k + 1)


def satisfies_nk(A: DenseSubset, k: int) -> bool:
    """Aperiodic, ``kA != G``, and maximal with that property."""
    return is_aperiodic(A) and is_maximal_nonfull(A, k)


def _nk_chunk(args) -> tuple[list[int], int]:
    factors, k, X = args
    G = GroupSpec(factors)
    full = np.uint64(G.full_mask)
    parts = batch.partial_sumsets_batch(G, X, k)
    keep = parts[k] != full
    if not keep.any():
        return [], 0
    X = X[keep]
    parts = [p[keep] for p in parts]
    keep = ~batch.periodic_batch(G, X)
    X = X[keep]
    parts = [p[keep] for p in parts]
    if not X.size:
        return [], 0
    ok = batch.maximal_batch(G, X, parts)
    hits = X[ok]
    return [int(x) for x in hits[:WITNESS_CAP]], int(hits.size)


def nk_search(
    G: GroupSpec,
    k: int,
    budget: int = DEFAULT_BUDGET,
    witness_cap: int = WITNESS_CAP,
    workers: Optional[int] = 1,
) -> SearchReport:
    """``N_k(G)`` by size-descending exhaustion from the general upper bound."""
    if k < 1:
        raise ValueError("k must be positive")
    t0 = time.perf_counter()
    n = G.order
    start = min(nk_upper_bound(G, k), n)
    if comb(n, start) > budget:
        raise BudgetExceededError(
            f"N_{k}({G}): C({n},{start}) = {comb(n, start)} subsets at the starting size exceeds budget {budget}"
        )
    nodes = 0
    for s in range(start, -1, -1):
        c = comb(n, s)
        if nodes + c > budget:
            raise BudgetExceededError(
                f"N_{k}({G}): covered sizes {start}..{s + 1} without a hit; size {s} needs {c} more nodes"
            )
        nodes += c
        witnesses, hits = _nk_size(G, k, s, witness_cap, workers)
        if hits:
            return SearchReport(
                G, k, "Nk", s, [DenseSubset(G, w) for w in witnesses], nodes,
                time.perf_counter() - t0, "descending", hits=hits, sizes_covered=(start, s),
            )
    return SearchReport(G, k, "Nk", 0, [], nodes, time.perf_counter() - t0, "descending",
                        sizes_covered=(start, 0))


def _nk_size(G: GroupSpec, k: int, s: int, cap: int, workers) -> tuple[list[int], int]:
    n = G.order
    if n > batch.WORD:
        from itertools import combinations

        found, hits = [], 0
        for combo in combinations(range(n), s):
            A = DenseSubset.from_indices(G, combo)
            if satisfies_nk(A, k):
                hits += 1
                if len(found) < cap:
                    found.append(A.bits)
        return found, hits
    found, hits = [], 0
    jobs = ((G.factors, k, X) for X in batch.combination_chunks(n, s))
    for w, h in ordered_map(_nk_chunk, jobs, workers):
        hits += h
        found.extend(w[: cap - len(found)])
    return found, hits


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, isqrt(n) + 1))


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _elementary_divisors(G: GroupSpec) -> list[tuple[int, int]]:
    """(p, p^e) for every primary cyclic summand."""
    out = []
    for m in G.factors:
        for p in sorted(set(prime_factors(m))):
            q = 1
            while m % (q * p) == 0:
                q *= p
            out.append((p, q))
    return out


def splits_into_1mod3_cyclics(G: GroupSpec) -> bool:
    """Can G be written as a direct sum of cyclic groups of orders = 1 (mod 3)?

    A cyclic summand is a product of prime powers for distinct primes, so
    this asks for a grouping of the elementary divisors into such products.
    """
    parts = _elementary_divisors(G)
    if not parts:
        return False

    @lru_cache(maxsize=None)
    def ok(remaining: tuple[int, ...]) -> bool:
        if not remaining:
            return True
        first, rest = remaining[0], remaining[1:]
        # choose which other summands join the one containing `first`
        for pick in range(1 << len(rest)):
            members = [first] + [rest[i] for i in range(len(rest)) if pick >> i & 1]
            primes = [parts[j][0] for j in members]
            if len(set(primes)) != len(primes):
                continue
            prod_ = 1
            for j in members:
                prod_ *= parts[j][1]
            if prod_ % 3 != 1:
                continue
            left = tuple(rest[i] for i in range(len(rest)) if not pick >> i & 1)
            if ok(left):
                return True
        return False

    return ok(tuple(range(len(parts))))


def known_values(G: GroupSpec, k: int) -> list[tuple[int, str]]:
    """Every closed form for ``N_k(G)`` that applies, with its source."""
    n = G.order
    dp = diam_plus(G)
    out = []
    if k == 1:
        out.append((n - 1, "k=1: |G|-1"))
    if G.rank == 1 and n >= k + 2:
        out.append(((n - 2) // k + 1, "cyclic: floor((n-2)/k)+1"))
    if k == 2 < dp:
        out.append((n // 2, "k=2 < diam+: floor(|G|/2)"))
    if k == dp - 1:
        out.append((G.rank + 1, "k=diam+-1: rank+1"))
    if k >= dp:
        out.append((1 if is_prime(n) else 0, "k>=diam+: 1 if prime else 0"))
    if k == 3 and dp >= 4:
        if n % 3 == 0:
            out.append((n // 3, "k=3, 3 | |G|: |G|/3"))
        elif all(p % 3 == 1 for p in prime_factors(n)):
            out.append(((n - 1) // 3, "k=3, divisors 1 mod 3: (|G|-1)/3"))
    if k == 3 and dp >= 4 and splits_into_1mod3_cyclics(G):
        out.append(((n - 1) // 3, "k=3, sum of cyclics of order 1 mod 3: (|G|-1)/3"))
    if k == 3 and G.rank >= 1 and G.is_elementary(5):
        r = G.rank
        out.append((2 if r == 1 else (3 * 5 ** (r - 1) - 1) // 2, "k=3, Z_5^n stability"))
    if k == 3 and G.rank >= 4 and G.is_elementary(2):
        out.append((2 ** (G.rank - 2) + 1, "Davydov-Tombak"))
    return out


def known_value(G: GroupSpec, k: int) -> Optional[tuple[int, str]]:
    vals = known_values(G, k)
    return vals[0] if vals else None


# ---------------------------------------------------------------------------
# b+_rho
# ---------------------------------------------------------------------------

def _bt_masks(G: GroupSpec, rho: int, require_generating: bool) -> tuple[np.ndarray, int]:
    """Masks of all qualifying sets for ``b+_rho`` (|G| <= 20)."""
    n = G.order
    full = np.uint64(G.full_mask)
    X = batch.all_masks(n)
    B = X | np.uint64(1)
    steps = rho - 1
    parts = batch.partial_sumsets_batch(G, B, steps) if steps else [np.ones_like(B)]
    keep = parts[steps] != full
    X, B = X[keep], B[keep]
    parts = [p[keep] for p in parts]
    keep = ~batch.periodic_batch(G, X)
    if require_generating:
        keep &= batch.closure_batch(G, X) == full
    X, B = X[keep], B[keep]
    parts = [p[keep] for p in parts]
    if not X.size:
        return X, 1 << n
    # maximal: adding any g outside A makes (rho-1)(A | {0, g}) = G
    ok = np.ones(X.shape, dtype=bool)
    for g in range(n):
        outside = ((X >> np.uint64(g)) & np.uint64(1)) == 0
        if not outside.any():
            continue
        u = parts[steps].copy()
        jg = 0
        for j in range(1, steps + 1):
            jg = G.add(jg, g)
            u |= batch.translate_batch(G, parts[steps - j], jg)
        ok &= ~outside | (u == full)
    return X[ok], 1 << n


def bt_rho_search(G: GroupSpec, rho: int, require_generating: bool = True,
                  budget: int = 1 << 20) -> SearchReport:
    """``b+_rho(G)``: largest aperiodic generating A, maximal with
    ``(rho-1)(A | {0}) != G``.

    With ``require_generating=False`` the generating condition is dropped,
    which is the characterization used when ``rho <= diam+(G)``.
    """
    if rho < 1:
        raise ValueError("rho must be >= 1")
    t0 = time.perf_counter()
    n = G.order
    if (1 << n) > budget:
        raise BudgetExceededError(f"b+_rho scan needs 2^{n} subsets, budget {budget}")
    if n == 1:
        return SearchReport(G, rho, "bt", 0, [], 2, time.perf_counter() - t0, "exhaustive")
    hits, nodes = _bt_masks(G, rho, require_generating)
    if not hits.size:
        return SearchReport(G, rho, "bt", 0, [], nodes, time.perf_counter() - t0, "exhaustive")
    sizes = batch.popcount(hits)
    value = int(sizes.max())
    best = sorted((DenseSubset(G, int(x)) for x in hits[sizes == value]), key=lambda A: A.indices())
    return SearchReport(G, rho, "bt", value, best[:WITNESS_CAP], nodes, time.perf_counter() - t0,
                        "exhaustive", hits=len(best),
                        extra={"rho": rho, "generating_required": require_generating})


def translation_lemma_prediction(G: GroupSpec, k: int, nk: int) -> int:
    """What ``b+_{k+1}(G)`` should be given ``N_k(G)``."""
    if is_prime(G.order) and k >= G.order - 1:
        return 0
    return nk


# ---------------------------------------------------------------------------
# M_k from N_k of quotients
# ---------------------------------------------------------------------------

@dataclass
class ReductionReport:
    group: GroupSpec
    k: int
    mk: int
    rhs: int
    best_subgroup: Subgroup
    terms: list[tuple[int, GroupSpec, int]]

    @property
    def holds(self) -> bool:
        return self.mk == self.rhs

    def to_json(self) -> dict:
        return {
            "group": self.group.literal(),
            "k": self.k,
            "mk": self.mk,
            "rhs": self.rhs,
            "holds": self.holds,
            "best_subgroup_order": self.best_subgroup.order,
            "terms": [{"H_order": h, "quotient": q.literal(), "nk": v} for h, q, v in self.terms],
        }


@lru_cache(maxsize=None)
def _nk_cached(G: GroupSpec, k: int) -> int:
    return nk_search(G, k).value


def reduction_identity_check(G: GroupSpec, k: int) -> ReductionReport:
    """Check ``M_k(G) = max_H |H| * N_k(G/H)`` with every term searched."""
    if G.order > batch.WORD:
        raise BudgetExceededError(f"reduction identity check needs |G| <= {batch.WORD}")
    mk = mk_bruteforce(G, k, descending=G.order > 16).value
    terms, best = [], None
    for H in enumerate_subgroups(G):
        Q, _ = quotient_map(G, H)
        v = _nk_cached(Q, k)
        terms.append((H.order, Q, v))
        if best is None or H.order * v > best[0]:
            best = (H.order * v, H)
    return ReductionReport(G, k, mk, best[0], best[1], terms)


def verify_nk_witness(A: DenseSubset, k: int) -> dict:
    """Independent re-check of a witness using the scalar kernels only."""
    G = A.group
    kA = k_fold_sumset(A, k)
    return {
        "aperiodic": period(A).mask == 1,
        "sumset_not_full": not kA.is_full(),
        "maximal": all(
            k_fold_sumset(A.add_element(g), k).is_full()
            for g in range(G.order) if g not in A
        ),
    }
