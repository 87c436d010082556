"""Slow, obviously-correct reference implementations on tuples.

Nothing here uses the package's bit layout, so agreement with it is an
independent check.
"""

from __future__ import annotations

from itertools import combinations, product


def elements(factors):
    return [tuple(reversed(t)) for t in product(*(range(m) for m in reversed(factors)))]


def add(x, y, factors):
    return tuple((a + b) % m for a, b, m in zip(x, y, factors))


def neg(x, factors):
    return tuple((-a) % m for a, m in zip(x, factors))


def sumset(A, B, factors):
    return {add(a, b, factors) for a in A for b in B}


def kfold(A, k, factors):
    S = set(A)
    for _ in range(k - 1):
        S = sumset(S, A, factors)
    return S


def period(A, factors):
    G = elements(factors)
    if not A:
        return set(G)
    return {g for g in G if {add(a, g, factors) for a in A} == set(A)}


def order(factors):
    n = 1
    for m in factors:
        n *= m
    return n


def nk(factors, k):
    """Largest aperiodic A with kA != G, maximal with that property."""
    G = elements(factors)
    n = len(G)
    for s in range(n, -1, -1):
        for A in combinations(G, s):
            A = set(A)
            if len(kfold(A, k, factors)) == n or len(period(A, factors)) != 1:
                continue
            if all(len(kfold(A | {g}, k, factors)) == n for g in G if g not in A):
                return s
    return 0


def mk(factors, k):
    G = elements(factors)
    n = len(G)
    for s in range(n, -1, -1):
        for A in combinations(G, s):
            if len(kfold(set(A), k, factors)) < n:
                return s
    return 0


def subgroup_count(factors):
    G = elements(factors)
    subs = set()
    for r in range(0, len(factors) + 1):
        for gens in combinations(G, r):
            H = {tuple(0 for _ in factors)}
            while True:
                nxt = H | {add(h, g, factors) for h in H for g in gens}
                if nxt == H:
                    break
                H = nxt
            subs.add(frozenset(H))
    return len(subs)
