"""Vectorized set kernels for groups of order <= 64.

A batch is a ``uint64`` array with one subset per entry, in the same bit
layout as :mod:`sumsetlab.sets`.  Exhaustive searches stream combinations
through these kernels in lexicographic order.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterator

import numpy as np

from .groups import GroupSpec
from .sets import rotation_masks

WORD = 64
U64 = np.uint64


def check_order(G: GroupSpec) -> None:
    if G.order > WORD:
        raise ValueError(f"batch kernels need |G| <= {WORD}, got {G.order}")


@lru_cache(maxsize=None)
def _np_rotations(G: GroupSpec):
    return tuple(
        tuple((U64(sl), U64(lo), U64(sr), U64(hi)) for sl, lo, sr, hi in per_coord)
        for per_coord in rotation_masks(G)
    )


def _rotate(X: np.ndarray, op) -> np.ndarray:
    sl, lo, sr, hi = op
    return ((X << sl) & lo) | ((X >> sr) & hi)


def translate_batch(G: GroupSpec, X: np.ndarray, g: int) -> np.ndarray:
    rot = _np_rotations(G)
    for i, c in enumerate(G.coords_table[g]):
        if c:
            X = _rotate(X, rot[i][c])
    return X


def all_translates(G: GroupSpec, X: np.ndarray) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(g, X + g)`` for every element index ``g``.

    Rotations along the slow coordinates are shared between translates, so
    the order is slowest coordinate outermost.
    """
    rot = _np_rotations(G)
    r = G.rank

    def walk(level, Y, offset):
        if level < 0:
            yield offset, Y
            return
        m, s = G.factors[level], G.strides[level]
        for c in range(m):
            Z = Y if c == 0 else _rotate(Y, rot[level][c])
            yield from walk(level - 1, Z, offset + c * s)

    if r == 0:
        yield 0, X
        return
    yield from walk(r - 1, X, 0)


def bit(X: np.ndarray, i: int) -> np.ndarray:
    """All-ones where bit ``i`` is set, zero elsewhere."""
    return U64(0) - ((X >> U64(i)) & U64(1))


def sumset_batch(G: GroupSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Elementwise ``X[t] + Y[t]``."""
    out = np.zeros_like(X)
    for a, Ya in all_translates(G, Y):
        out |= Ya & bit(X, a)
    return out


def partial_sumsets_batch(G: GroupSpec, X: np.ndarray, k: int) -> list[np.ndarray]:
    """``[0X, 1X, ..., kX]`` elementwise."""
    out = [np.ones_like(X), X]
    for _ in range(k - 1):
        out.append(sumset_batch(G, out[-1], X))
    return out[: k + 1]


def periodic_batch(G: GroupSpec, X: np.ndarray) -> np.ndarray:
    """True where the set has a nonzero period (the empty set counts as periodic)."""
    hit = np.zeros(X.shape, dtype=bool)
    for g, Xg in all_translates(G, X):
        if g:
            hit |= Xg == X
    return hit


def maximal_batch(G: GroupSpec, X: np.ndarray, parts: list[np.ndarray]) -> np.ndarray:
    """For sets with ``kX != G``: does adding any outside element fill G?"""
    k = len(parts) - 1
    full = U64(G.full_mask)
    ok = np.ones(X.shape, dtype=bool)
    for g in range(G.order):
        outside = ((X >> U64(g)) & U64(1)) == 0
        if not outside.any():
            continue
        u = parts[k].copy()
        jg = 0
        for j in range(1, k + 1):
            jg = G.add(jg, g)
            u |= translate_batch(G, parts[k - j], jg)
        ok &= ~outside | (u == full)
    return ok


def closure_batch(G: GroupSpec, X: np.ndarray) -> np.ndarray:
    """Subgroup generated by each set."""
    C = np.ones_like(X)
    B = X | U64(1)
    while True:
        nxt = sumset_batch(G, C, B)
        if np.array_equal(nxt, C):
            return C
        C = nxt


def popcount(X: np.ndarray) -> np.ndarray:
    return np.bitwise_count(X)


# ---------------------------------------------------------------------------
# combinations in lexicographic order
# ---------------------------------------------------------------------------

SUFFIX_LIMIT = 1 << 20


@lru_cache(maxsize=None)
def _combos(L: int, r: int) -> np.ndarray:
    """All ``r``-subsets of ``range(L)`` as masks, lexicographic by sorted tuple."""
    if r == 0:
        return np.zeros(1, dtype=U64)
    parts = []
    for i in range(L - r + 1):
        tail = _combos(L - i - 1, r - 1)
        if r > 1:
            tail = tail << U64(i + 1)
        parts.append(tail | U64(1 << i))
    if not parts:
        return np.zeros(0, dtype=U64)
    return np.concatenate(parts)


def combination_chunks(n: int, s: int, chunk: int = SUFFIX_LIMIT) -> Iterator[np.ndarray]:
    """All ``s``-subsets of ``range(n)`` in lexicographic order, in chunks.

    A prefix of the smallest elements is fixed by plain iteration; the
    remaining elements come from a cached table of combinations.
    """
    if s < 0 or s > n:
        return
    r = s
    while r > 0 and comb(n, r) > chunk:
        r -= 1
    p = s - r
    pending, size = [], 0

    def prefixes(start, depth, mask, last):
        if depth == 0:
            yield mask, last
            return
        for i in range(start, n - (depth - 1) - r):
            yield from prefixes(i + 1, depth - 1, mask | (1 << i), i)

    for mask, last in prefixes(0, p, 0, -1):
        tail = _combos(n - last - 1, r)
        if r:
            tail = tail << U64(last + 1) if last >= 0 else tail
        block = tail | U64(mask)
        pending.append(block)
        size += block.size
        if size >= chunk:
            yield np.concatenate(pending)
            pending, size = [], 0
    if pending:
        yield np.concatenate(pending)


def all_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=U64)
