"""Randomized and exhaustive checks of structural statements about sets with 3A != G.

Every check returns a list of :class:`ViolationReport`; an empty list means no
counterexample was found.  Trials are seeded per index from
``(seed, trial)``, so results do not depend on how trials are split among
workers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import batch
from .groups import GroupSpec, all_groups, generated_subgroup, index5_kernels
from .parallel import ordered_map
from .sets import (
    DenseSubset,
    format_set_hex,
    index5_cosets,
    iter_bits,
    k_fold_sumset,
    parse_set,
    period,
    sumset,
    translate,
    two_coset_cover_exists,
)

SAMPLERS = ("uniform-size", "density-window", "construction-perturbation", "mixed")
KNESER_MAX_ORDER = 100


@dataclass(frozen=True)
class TrialConfig:
    group: Optional[GroupSpec]
    trials: int = 1000
    seed: int = 0
    sampler: str = "mixed"
    window: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}; choose from {SAMPLERS}")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        lo, hi = self.window
        if not 0 <= lo <= hi <= 1:
            raise ValueError("density window must satisfy 0 <= lo <= hi <= 1")

    def rng(self, trial: int) -> np.random.Generator:
        return np.random.default_rng([self.seed & (2 ** 64 - 1), trial])


@dataclass(frozen=True)
class ViolationReport:
    property_id: str
    witnesses: tuple[str, ...]
    observed: str
    required: str
    trial: int = -1
    detail: dict = field(default_factory=dict, compare=False)

    def replay(self) -> bool:
        """True if the stored witnesses still violate the property."""
        sets = [parse_set(w) for w in self.witnesses]
        return _PROPERTY_CHECKS[self.property_id](sets, self.detail) is not None

    def to_json(self) -> dict:
        return {
            "property": self.property_id,
            "witnesses": list(self.witnesses),
            "observed": self.observed,
            "required": self.required,
            "trial": self.trial,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# property predicates: each returns (observed, required) on violation, else None
# ---------------------------------------------------------------------------

def _kneser(sets, _detail):
    A, B = sets
    S = sumset(A, B)
    lhs, rhs = len(S), len(A) + len(B) - period(S).order
    return None if lhs >= rhs else (f"|A+B|={lhs}", f">= {rhs}")


def _union(sets, _detail):
    A, B = sets
    U = A | B
    lhs = len(U) + period(U).order
    rhs = min(len(A) + period(A).order, len(B) + period(B).order)
    return None if lhs >= rhs else (f"|A|B|+|pi|={lhs}", f">= {rhs}")


def _pigeonhole(sets, _detail):
    A, B = sets
    if sumset(A, B).is_full() or len(A) + len(B) <= A.group.order:
        return None
    return (f"|A|+|B|={len(A) + len(B)} with A+B != G", f"<= {A.group.order}")


def _quarter(sets, _detail):
    (A,) = sets
    if k_fold_sumset(A, 2).density() < Fraction(1, 2) and A.density() >= Fraction(1, 4):
        return (f"density(A)={A.density()}", "< 1/4")
    return None


@lru_cache(maxsize=None)
def _functional_masks(G: GroupSpec) -> dict:
    return {tuple(c): m for (c, _), (_, m) in zip(index5_kernels(G), index5_cosets(G))}


def _coset_counts(A: DenseSubset, functional) -> list[int]:
    masks = _functional_masks(A.group).get(tuple(functional))
    if masks is None:
        raise ValueError(f"unknown functional {functional}")
    return [(A.bits & m).bit_count() for m in masks]


def _hypothesis(A: DenseSubset) -> bool:
    return A.density() > Fraction(3, 10) and not k_fold_sumset(A, 3).is_full()


def _three_cosets(sets, detail):
    (A,) = sets
    counts = _coset_counts(A, detail["functional"])
    met = sum(1 for c in counts if c)
    if _hypothesis(A) and met == 3:
        return (f"meets exactly 3 cosets, counts={counts}", "not exactly 3")
    return None


def _dense_coset(sets, detail):
    (A,) = sets
    counts = _coset_counts(A, detail["functional"])
    h = A.group.order // 5
    met = sum(1 for c in counts if c)
    if _hypothesis(A) and any(2 * c > h for c in counts) and met > 3:
        return (f"meets {met} cosets with a coset above 1/2, counts={counts}", "<= 3 cosets")
    return None


def _density_cap(sets, detail):
    (A,) = sets
    counts = _coset_counts(A, detail["functional"])
    h = A.group.order // 5
    if not _hypothesis(A) or any(2 * c >= h for c in counts):
        return None
    above = sum(1 for c in counts if 5 * c > 2 * h)
    return None if above <= 1 else (f"{above} cosets above 2/5, counts={counts}", "<= 1")


def _triple_cover(sets, _detail):
    A, B, C = sets
    a, b, c = A.density(), B.density(), C.density()
    lo, hi = Fraction(2, 5), Fraction(1, 2)
    if not (lo < a < hi and lo < b < hi and a + b + 3 * c > Fraction(3, 2)):
        return None
    S = sumset(sumset(A, B), C)
    return None if S.is_full() else (f"|A+B+C|={len(S)}", f"= {A.group.order}")


def _stability(sets, _detail):
    (A,) = sets
    if k_fold_sumset(A, 3).is_full() or 2 * len(A) <= 3 * A.group.order // 5:
        return None
    return None if two_coset_cover_exists(A) else ("3A != G and no two-coset cover", "two-coset cover")


_PROPERTY_CHECKS = {
    "kneser": _kneser,
    "union": _union,
    "pigeonhole": _pigeonhole,
    "quarter-density": _quarter,
    "three-coset-exclusion": _three_cosets,
    "dense-coset-spread": _dense_coset,
    "coset-density-cap": _density_cap,
    "triple-sum-cover": _triple_cover,
    "stability": _stability,
}


def _check(pid: str, sets, trial: int, detail: Optional[dict] = None) -> Optional[ViolationReport]:
    detail = detail or {}
    hit = _PROPERTY_CHECKS[pid](sets, detail)
    if hit is None:
        return None
    return ViolationReport(pid, tuple(format_set_hex(S) for S in sets), hit[0], hit[1], trial, detail)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _random_subset(G: GroupSpec, size: int, rng: np.random.Generator, pool: Optional[list[int]] = None) -> int:
    pool = list(range(G.order)) if pool is None else pool
    size = max(0, min(size, len(pool)))
    bits = 0
    for i in rng.choice(len(pool), size=size, replace=False):
        bits |= 1 << pool[int(i)]
    return bits


def _perturb(G: GroupSpec, bits: int, rng: np.random.Generator, max_moves: int = 3) -> int:
    inside = list(iter_bits(bits))
    outside = list(iter_bits(G.full_mask & ~bits))
    d = int(rng.integers(0, max_moves + 1))
    e = int(rng.integers(0, max_moves + 1))
    if inside and d:
        for i in rng.choice(len(inside), size=min(d, len(inside)), replace=False):
            bits &= ~(1 << inside[int(i)])
    if outside and e:
        for i in rng.choice(len(outside), size=min(e, len(outside)), replace=False):
            bits |= 1 << outside[int(i)]
    return bits


def _structured(G: GroupSpec, rng: np.random.Generator) -> int:
    """Union of a few cosets of a random subgroup, then perturbed."""
    gens = [int(g) for g in rng.integers(0, G.order, size=int(rng.integers(0, 3)))]
    H = generated_subgroup(G, gens)
    ncos = G.order // H.order
    reps, seen = [], 0
    for g in range(G.order):
        if not seen >> g & 1:
            reps.append(g)
            seen |= translate(G, H.mask, g)
    r = int(rng.integers(1, ncos + 1))
    bits = 0
    for i in rng.choice(ncos, size=r, replace=False):
        bits |= translate(G, H.mask, reps[int(i)])
    return _perturb(G, bits, rng)


def _coset_union_z5(G: GroupSpec, rng: np.random.Generator, ncosets: Sequence[int] = (1, 2, 3)) -> int:
    cosets = index5_cosets(G)
    _F, masks = cosets[int(rng.integers(len(cosets)))]
    r = int(rng.choice(list(ncosets)))
    bits = 0
    for j in rng.choice(5, size=r, replace=False):
        bits |= masks[int(j)]
    return bits


def sample_subset(cfg: TrialConfig, G: GroupSpec, rng: np.random.Generator) -> DenseSubset:
    n = G.order
    kind = cfg.sampler
    if kind == "mixed":
        kind = ("uniform-size", "density-window", "construction-perturbation")[int(rng.integers(3))]
    if kind == "uniform-size":
        bits = _random_subset(G, int(rng.integers(0, n + 1)), rng)
    elif kind == "density-window":
        lo, hi = cfg.window
        smin, smax = int(np.ceil(lo * n)), int(np.floor(hi * n))
        if smin > smax:
            raise ValueError(f"no size of a subset of {G} has density in {cfg.window}")
        bits = _random_subset(G, int(rng.integers(smin, smax + 1)), rng)
    elif G.is_elementary(5) and G.rank:
        bits = _perturb(G, _coset_union_z5(G, rng), rng)
    else:
        bits = _structured(G, rng)
    return DenseSubset(G, bits)


@lru_cache(maxsize=None)
def _small_groups() -> tuple[GroupSpec, ...]:
    return tuple(G for G in all_groups(KNESER_MAX_ORDER) if G.order > 1)


# ---------------------------------------------------------------------------
# property suites
# ---------------------------------------------------------------------------

def _kneser_trial(args) -> list[ViolationReport]:
    cfg, t = args
    rng = cfg.rng(t)
    G = cfg.group
    if G is None:
        groups = _small_groups()
        G = groups[int(rng.integers(len(groups)))]
    A = sample_subset(cfg, G, rng)
    B = A if rng.random() < 0.1 else sample_subset(cfg, G, rng)
    out = []
    for pid in ("kneser", "union", "pigeonhole"):
        v = _check(pid, [A, B], t)
        if v:
            out.append(v)
    hits = {"pairs": 1, "nonfull_sumset": int(not sumset(A, B).is_full())}
    return out, hits


def _run(fn, cfg: TrialConfig, workers: int, stats: Optional[dict]) -> list[ViolationReport]:
    """Run trials in index order; ``stats`` (if given) accumulates how often
    each property's hypothesis was actually met."""
    out: list[ViolationReport] = []
    for vs, hits in ordered_map(fn, [(cfg, t) for t in range(cfg.trials)], workers):
        out.extend(vs)
        if stats is not None:
            for key, v in hits.items():
                stats[key] = stats.get(key, 0) + v
    return out


def check_kneser_suite(cfg: TrialConfig, workers: int = 1, stats: Optional[dict] = None) -> list[ViolationReport]:
    """Kneser's inequality, the union lemma and the pigeonhole bound on random pairs.

    With ``cfg.group`` left as ``None`` each trial draws a group of order at
    most 100.
    """
    return _run(_kneser_trial, cfg, workers, stats)


def _require_z5(G: Optional[GroupSpec]) -> GroupSpec:
    if G is None or not G.rank or not G.is_elementary(5):
        raise ValueError("this check runs over Z_5^n")
    return G


def _quarter_trial(args) -> list[ViolationReport]:
    cfg, t = args
    rng = cfg.rng(t)
    A = sample_subset(cfg, cfg.group, rng)
    v = _check("quarter-density", [A], t)
    hits = {"sets": 1, "small_doubling": int(k_fold_sumset(A, 2).density() < Fraction(1, 2))}
    return ([v] if v else []), hits


def check_lemma_0_25(cfg: TrialConfig, workers: int = 1, stats: Optional[dict] = None) -> list[ViolationReport]:
    """If ``2A`` has density below 1/2 then A has density below 1/4."""
    _require_z5(cfg.group)
    return _run(_quarter_trial, cfg, workers, stats)


def _dense_nonfull_sample(G: GroupSpec, rng: np.random.Generator) -> DenseSubset:
    """A set of density above 0.3 biased towards ``3A != G``."""
    n = G.order
    smin = 3 * n // 10 + 1
    style = int(rng.integers(4))
    if style == 0:
        # subset of a two-coset union, possibly with a stray element
        base = _coset_union_z5(G, rng, (2,))
        size = int(rng.integers(smin, base.bit_count() + 1))
        bits = _random_subset(G, size, rng, list(iter_bits(base)))
        if rng.random() < 0.5:
            bits = _perturb(G, bits, rng, 1)
    elif style == 1:
        # a dense coset plus scattered mass elsewhere
        base = _coset_union_z5(G, rng, (1,))
        bits = base | _random_subset(G, int(rng.integers(1, max(2, n // 5))), rng)
    elif style == 2:
        bits = _perturb(G, _coset_union_z5(G, rng, (2, 3)), rng)
    else:
        bits = _random_subset(G, int(rng.integers(smin, n // 2 + 1)), rng)
    while bits.bit_count() < smin:
        bits |= 1 << int(rng.integers(n))
    return DenseSubset(G, bits)


def _props_trial(args) -> list[ViolationReport]:
    cfg, t = args
    G = cfg.group
    rng = cfg.rng(t)
    out = []
    hits = {"sets": 1, "dense_nonfull": 0, "triples": 0}
    A = _dense_nonfull_sample(G, rng)
    # density exactly 3/10 lies outside the hypothesis and is skipped by _hypothesis
    if _hypothesis(A):
        hits["dense_nonfull"] = 1
        for c, _F in index5_kernels(G):
            for pid in ("three-coset-exclusion", "dense-coset-spread", "coset-density-cap"):
                v = _check(pid, [A], t, {"functional": list(c)})
                if v:
                    out.append(v)
    # triple lemma
    n = G.order
    lo, hi = 2 * n // 5 + 1, (n - 1) // 2
    if lo <= hi:
        sa, sb = int(rng.integers(lo, hi + 1)), int(rng.integers(lo, hi + 1))
        need = Fraction(3, 2) - Fraction(sa + sb, n)
        sc = min(n, int(need * n / 3) + 1 + int(rng.integers(0, 2)))
        sets = []
        for s in (sa, sb, sc):
            if rng.random() < 0.5:
                base = _coset_union_z5(G, rng, (3,))
                pool = list(iter_bits(base))
                bits = _random_subset(G, min(s, len(pool)), rng, pool)
                while bits.bit_count() < s:
                    bits |= 1 << int(rng.integers(n))
            else:
                bits = _random_subset(G, s, rng)
            sets.append(DenseSubset(G, bits))
        hits["triples"] = 1
        v = _check("triple-sum-cover", sets, t)
        if v:
            out.append(v)
    return out, hits


def check_propositions(cfg: TrialConfig, workers: int = 1, stats: Optional[dict] = None) -> list[ViolationReport]:
    """Coset-structure statements for dense sets with ``3A != G``, plus the
    triple-sum covering lemma, on sampled sets in Z_5^n (n <= 3)."""
    G = _require_z5(cfg.group)
    if G.rank > 3:
        raise ValueError("proposition checks are limited to n <= 3")
    return _run(_props_trial, cfg, workers, stats)


# ---------------------------------------------------------------------------
# exhaustive stability scan at n = 2
# ---------------------------------------------------------------------------

@dataclass
class StabilityReport:
    n: int
    sizes: tuple[int, ...]
    checked: dict
    survivors: dict
    violations: list
    automorphism_check: dict
    elapsed: float

    @property
    def ok(self) -> bool:
        return not self.violations and all(self.automorphism_check.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sizes": list(self.sizes),
            "checked": {str(k): v for k, v in self.checked.items()},
            "survivors": {str(k): v for k, v in self.survivors.items()},
            "violations": [v.to_json() for v in self.violations],
            "automorphism_invariant": {str(k): v for k, v in self.automorphism_check.items()},
            "elapsed_ms": round(self.elapsed * 1000, 1),
        }


@lru_cache(maxsize=None)
def _union_masks(G: GroupSpec) -> np.ndarray:
    out = []
    for _F, masks in index5_cosets(G):
        for i in range(5):
            for j in range(i + 1, 5):
                out.append(masks[i] | masks[j])
    return tuple(sorted(set(out)))


def _stability_chunk(args):
    factors, X = args
    G = GroupSpec(tuple(factors))
    full = np.uint64(G.full_mask)
    S2 = batch.sumset_batch(G, X, X)
    S3 = batch.sumset_batch(G, S2, X)
    surv = X[S3 != full]
    covered = np.zeros(surv.shape, dtype=bool)
    for u in _union_masks(G):
        covered |= (surv & ~np.uint64(u)) == 0
    return int(X.size), surv, surv[~covered]


def _linear_map(G: GroupSpec, M: np.ndarray) -> list[int]:
    return [G.encode(tuple(int(v) for v in (M @ np.array(x)) % 5)) for x in G.coords_table]


def _random_automorphism(G: GroupSpec, rng: np.random.Generator) -> list[int]:
    n = G.rank
    while True:
        M = rng.integers(0, 5, size=(n, n))
        if round(np.linalg.det(M)) % 5:
            return _linear_map(G, M)


def _apply_map(perm: list[int], bits: int) -> int:
    out = 0
    for i in iter_bits(bits):
        out |= 1 << perm[i]
    return out


def verify_stability_exhaustive(
    n: int = 2,
    sizes: Sequence[int] = (8, 9, 10, 11),
    workers: int = 1,
    seed: int = 0,
    automorphisms: int = 3,
) -> StabilityReport:
    """Every ``A`` in Z_5^n of the given sizes with ``3A != G`` must lie in a
    union of two cosets of an index-5 subgroup."""
    if n < 1:
        raise ValueError("n must be positive")
    G = GroupSpec((5,) * n)
    batch.check_order(G)
    start = time.perf_counter()
    checked, survivors, violations, auto = {}, {}, [], {}
    rng = np.random.default_rng(seed)
    perms = [_random_automorphism(G, rng) for _ in range(automorphisms)]
    for s in sizes:
        total, kept = 0, []
        jobs = ((G.factors, X) for X in batch.combination_chunks(G.order, s))
        for cnt, surv, bad in ordered_map(_stability_chunk, jobs, workers):
            total += cnt
            kept.append(surv)
            for b in bad:
                A = DenseSubset(G, int(b))
                violations.append(ViolationReport("stability", (format_set_hex(A),),
                                                  "3A != G and no two-coset cover", "two-coset cover"))
        checked[s] = total
        surv_set = {int(x) for arr in kept for x in arr}
        survivors[s] = len(surv_set)
        auto[s] = all({_apply_map(p, b) for b in surv_set} == surv_set for p in perms)
    return StabilityReport(n, tuple(sizes), checked, survivors, violations, auto,
                           time.perf_counter() - start)


# ---------------------------------------------------------------------------
# stochastic falsifier for n >= 3
# ---------------------------------------------------------------------------

@dataclass
class FalsifierReport:
    n: int
    restarts: int
    seed: int
    start_size: int
    evaluations: int
    nonfull_states: int
    violations: list
    elapsed: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "restarts": self.restarts,
            "seed": self.seed,
            "start_size": self.start_size,
            "evaluations": self.evaluations,
            "nonfull_states_reached": self.nonfull_states,
            "violations": [v.to_json() for v in self.violations],
            "elapsed_ms": round(self.elapsed * 1000, 1),
        }


class _Scorer:
    """Scores batches of indicator vectors in Z_5^n.

    The score, compared lexicographically and maximized, is
    (number of elements missing from 3A, minus the smallest representation
    count, distance to the nearest two-coset union).
    """

    def __init__(self, G: GroupSpec):
        self.G = G
        self.shape = tuple(reversed(G.factors))
        self.unions = np.array([[(int(u) >> i) & 1 for i in range(G.order)] for u in _union_masks(G)],
                               dtype=np.int32)

    def score(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        b = X.shape[0]
        F = np.fft.fftn(X.reshape((b,) + self.shape).astype(float), axes=tuple(range(1, len(self.shape) + 1)))
        r = np.fft.ifftn(F ** 3, axes=tuple(range(1, len(self.shape) + 1))).real.reshape(b, -1)
        r = np.rint(r).astype(np.int64)
        missing = (r == 0).sum(axis=1)
        minrep = r.min(axis=1)
        dist = (X.astype(np.int32) @ (1 - self.unions).T).min(axis=1)
        return missing, minrep, dist


def _key(missing, minrep, dist, i):
    return (int(missing[i]), -int(minrep[i]), int(dist[i]))


def _climb(args):
    G_factors, seed, restart, size, steps, batch_size, plateau, escapes = args
    G = GroupSpec(tuple(G_factors))
    rng = np.random.default_rng([seed, restart])
    sc = _Scorer(G)
    N = G.order
    while True:
        x = np.zeros(N, dtype=np.int8)
        x[rng.choice(N, size=size, replace=False)] = 1
        m, r, d = sc.score(x[None])
        if d[0] > 0:
            break
    cur = _key(m, r, d, 0)
    evals, stale, kicks = 1, 0, 0
    nonfull, violations = 0, []
    for _ in range(steps):
        ins = np.flatnonzero(x)
        outs = np.flatnonzero(x == 0)
        a = ins[rng.integers(len(ins), size=batch_size)]
        b = outs[rng.integers(len(outs), size=batch_size)]
        cand = np.repeat(x[None], batch_size, axis=0)
        cand[np.arange(batch_size), a] = 0
        cand[np.arange(batch_size), b] = 1
        m, r, d = sc.score(cand)
        evals += batch_size
        keys = [_key(m, r, d, i) for i in range(batch_size)]
        best = max(range(batch_size), key=lambda i: (keys[i], -i))
        if keys[best] > cur:
            x, cur, stale = cand[best], keys[best], 0
            if cur[0] > 0:
                nonfull += 1
                bits = sum(1 << int(i) for i in np.flatnonzero(x))
                v = _check("stability", [DenseSubset(G, bits)], restart)
                if v:
                    violations.append(v)
        else:
            stale += 1
        if stale >= plateau:
            if kicks >= escapes:
                break
            kicks += 1
            stale = 0
            for _k in range(3):
                ins, outs = np.flatnonzero(x), np.flatnonzero(x == 0)
                x = x.copy()
                x[ins[rng.integers(len(ins))]] = 0
                x[outs[rng.integers(len(outs))]] = 1
            m, r, d = sc.score(x[None])
            cur = _key(m, r, d, 0)
    return evals, nonfull, violations


def falsify_stability_stochastic(
    n: int = 3,
    restarts: int = 1000,
    seed: int = 1,
    steps: int = 200,
    batch_size: int = 32,
    plateau: int = 50,
    escapes: int = 2,
    workers: int = 1,
    size: Optional[int] = None,
) -> FalsifierReport:
    """Hill-climb towards ``3A != G`` from sets just above the stability
    threshold that are not inside a two-coset union; any non-full state
    without a two-coset cover is reported."""
    if n < 1:
        raise ValueError("n must be positive")
    G = GroupSpec((5,) * n)
    size = 3 * 5 ** (n - 1) // 2 + 1 if size is None else size
    start = time.perf_counter()
    jobs = [(G.factors, seed, t, size, steps, batch_size, plateau, escapes) for t in range(restarts)]
    evals, nonfull, violations = 0, 0, []
    for e, nf, vs in ordered_map(_climb, jobs, workers):
        evals += e
        nonfull += nf
        violations.extend(vs)
    return FalsifierReport(n, restarts, seed, size, evals, nonfull, violations, time.perf_counter() - start)
