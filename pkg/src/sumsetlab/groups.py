"""Finite abelian groups given by invariant factors.

Elements are addressed by a mixed-radix index with the first factor varying
fastest: ``index = x_1 + m_1*x_2 + m_1*m_2*x_3 + ...``.  Every bit-packed set
in the package uses this layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, prod
from typing import Iterable, Sequence


class InvalidFactorError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    """An exhaustive computation was refused because it is too large."""


class DimensionMismatchError(ValueError):
    pass


class NotASubgroupError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer Smith normal form (left transform only)
# ---------------------------------------------------------------------------

def smith_left(matrix: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]]]:
    """Diagonalize an integer matrix, tracking the row operations.

    Returns ``(diag, P)`` where ``P`` is unimodular and ``P @ M @ Q`` is the
    Smith form for some unimodular ``Q``; ``diag`` holds the nonnegative
    diagonal entries ``d_1 | d_2 | ...`` (one per row; rows past the rank get
    0).  The map ``x -> (P x)_i mod d_i`` is then an isomorphism from
    ``Z^r / colspan(M)`` onto ``Z/d_1 + ... + Z/d_r``.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    M = [list(r) for r in matrix]
    P = [[int(i == j) for j in range(rows)] for i in range(rows)]

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        P[i], P[j] = P[j], P[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        if c:
            M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]
            P[dst] = [a + c * b for a, b in zip(P[dst], P[src])]

    def swap_cols(i, j):
        for r in M:
            r[i], r[j] = r[j], r[i]

    def add_col(dst, src, c):
        if c:
            for r in M:
                r[dst] += c * r[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(M[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if M[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, rows):
                if M[i][t]:
                    q = M[i][t] // M[t][t]
                    add_row(i, t, -q)
                    if M[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if M[t][j]:
                    q = M[t][j] // M[t][t]
                    add_col(j, t, -q)
                    if M[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # pivot must divide the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                 if M[i][j] % M[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if M[t][t] < 0:
            M[t] = [-a for a in M[t]]
            P[t] = [-a for a in P[t]]
        t += 1
    diag = [M[i][i] if i < cols else 0 for i in range(rows)]
    return diag, P


# ---------------------------------------------------------------------------
# groups and elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    """Z/m_1 + ... + Z/m_r with m_1 | m_2 | ... | m_r, every m_i >= 2."""

    factors: tuple[int, ...]

    def __post_init__(self):
        f = tuple(int(m) for m in self.factors)
        object.__setattr__(self, "factors", f)
        for m in f:
            if m < 2:
                raise InvalidFactorError(f"factor {m} must be >= 2")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise InvalidFactorError(f"{f} is not a divisibility chain")

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for m in self.factors:
            out.append(s)
            s *= m
        return tuple(out)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def is_elementary(self, p: int) -> bool:
        return all(m == p for m in self.factors)

    def encode(self, coords: Sequence[int]) -> int:
        if len(coords) != self.rank:
            raise DimensionMismatchError(f"{len(coords)} coordinates for rank {self.rank}")
        return sum((c % m) * s for c, m, s in zip(coords, self.factors, self.strides))

    def decode(self, index: int) -> tuple[int, ...]:
        out = []
        for m in self.factors:
            index, c = divmod(index, m)
            out.append(c)
        return tuple(out)

    @cached_property
    def coords_table(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.decode(i) for i in range(self.order))

    def add(self, i: int, j: int) -> int:
        """Index of the sum of the elements with indices ``i`` and ``j``."""
        a, b = self.coords_table[i], self.coords_table[j]
        return self.encode([x + y for x, y in zip(a, b)])

    def neg(self, i: int) -> int:
        return self.encode([-x for x in self.coords_table[i]])

    def scale(self, c: int, i: int) -> int:
        return self.encode([c * x for x in self.coords_table[i]])

    def element_order(self, i: int) -> int:
        o = 1
        for x, m in zip(self.coords_table[i], self.factors):
            o = o * (m // gcd(x, m)) // gcd(o, m // gcd(x, m))
        return o

    def literal(self) -> str:
        return ",".join(map(str, self.factors))

    def __str__(self):
        if not self.factors:
            return "trivial"
        return "+".join(f"Z{m}" for m in self.factors)


@dataclass(frozen=True)
class GroupElement:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @classmethod
    def zero(cls, G: GroupSpec) -> "GroupElement":
        return cls((0,) * G.rank)

    @classmethod
    def from_index(cls, G: GroupSpec, index: int) -> "GroupElement":
        return cls(G.decode(index))

    def reduced(self, G: GroupSpec) -> "GroupElement":
        if len(self.coords) != G.rank:
            raise DimensionMismatchError(f"{self.coords} does not live in {G}")
        return GroupElement(tuple(c % m for c, m in zip(self.coords, G.factors)))

    def index(self, G: GroupSpec) -> int:
        return G.encode(self.coords)

    def __str__(self):
        return "(" + ",".join(map(str, self.coords)) + ")"


def element_add(g: GroupElement, h: GroupElement, G: GroupSpec) -> GroupElement:
    if len(g.coords) != G.rank or len(h.coords) != G.rank:
        raise DimensionMismatchError(f"{g} + {h} in {G}")
    return GroupElement(tuple((a + b) % m for a, b, m in zip(g.coords, h.coords, G.factors)))


def embed_cyclic_sum(factors: Iterable[int]) -> tuple[GroupSpec, list[GroupElement]]:
    """Normalize Z/f_1 + ... + Z/f_t and locate its standard generators.

    Returns the invariant-factor group together with the images of the
    standard basis vectors under an explicit isomorphism, so callers can work
    with a decomposition of their own choosing inside the canonical group.
    """
    fs = [int(f) for f in factors]
    for f in fs:
        if f < 2:
            raise InvalidFactorError(f"factor {f} must be >= 2")
    if not fs:
        return GroupSpec(()), []
    diag, P = smith_left([[fs[i] if i == j else 0 for j in range(len(fs))] for i in range(len(fs))])
    keep = [i for i, d in enumerate(diag) if d != 1]
    G = GroupSpec(tuple(diag[i] for i in keep))
    gens = [
        GroupElement(tuple(P[i][j] % diag[i] for i in keep))
        for j in range(len(fs))
    ]
    return G, gens


def normalize_spec(factors: Iterable[int]) -> GroupSpec:
    """Invariant-factor form of a direct sum of cyclic groups.

    >>> normalize_spec([4, 6]).factors
    (2, 12)
    """
    return embed_cyclic_sum(factors)[0]


def parse_group(text: str) -> GroupSpec:
    text = text.strip()
    if text in ("", "1", "trivial"):
        return GroupSpec(())
    return normalize_spec(int(t) for t in text.split(","))


def diam_plus(G: GroupSpec) -> int:
    return sum(m - 1 for m in G.factors)


def diam_plus_bruteforce(G: GroupSpec, max_order: int = 12) -> int:
    """``diam+`` straight from the definition: the largest, over generating
    sets A, of the least k with ``k(A | {0}) = G``.  Enumerates ``2^|G|`` sets."""
    from .sets import DenseSubset, min_cover_k

    if G.order > max_order:
        raise BudgetExceededError(f"|G| = {G.order} exceeds the enumeration bound {max_order}")
    best = 0
    for bits in range(1 << G.order):
        k = min_cover_k(DenseSubset(G, bits))
        if k is not None and k > best:
            best = k
    return best


def all_groups(max_order: int) -> list[GroupSpec]:
    """Every abelian group of order <= max_order, once up to isomorphism."""

    def chains(n, d):
        # m_1 | m_2 | ... with product n and d | m_1
        if n == 1:
            yield ()
            return
        for first in range(max(d, 2), n + 1):
            if n % first == 0 and first % d == 0:
                for rest in chains(n // first, first):
                    yield (first,) + rest

    return [GroupSpec(c) for n in range(1, max_order + 1) for c in chains(n, 1)]


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    group: GroupSpec
    mask: int
    generators: tuple[int, ...] = field(default=())

    @property
    def order(self) -> int:
        return self.mask.bit_count()

    @property
    def index(self) -> int:
        return self.group.order // self.order

    def members(self) -> list[int]:
        return [i for i in range(self.group.order) if self.mask >> i & 1]

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def is_closed(self) -> bool:
        from .sets import translate

        G = self.group
        if not self.mask & 1:
            return False
        return all(translate(G, self.mask, g) == self.mask for g in self.members())


def trivial_subgroup(G: GroupSpec) -> Subgroup:
    return Subgroup(G, 1, ())


def whole_group(G: GroupSpec) -> Subgroup:
    return Subgroup(G, G.full_mask, ())


def join(G: GroupSpec, mask: int, g: int) -> int:
    """Mask of the subgroup generated by the subgroup ``mask`` and ``g``."""
    from .sets import translate

    out, cur = mask, g
    while not mask >> cur & 1:
        out |= translate(G, mask, cur)
        cur = G.add(cur, g)
    return out


def generated_subgroup(G: GroupSpec, elements: Iterable[int]) -> Subgroup:
    mask, gens = 1, []
    for g in elements:
        if not mask >> g & 1:
            mask = join(G, mask, g)
            gens.append(g)
    return Subgroup(G, mask, tuple(gens))


def enumerate_subgroups(G: GroupSpec, max_order: int = 64) -> list[Subgroup]:
    """All subgroups, found by closing under one more generator at a time.

    Sorted by order, then by the sorted member indices.
    """
    if G.order > max_order:
        raise BudgetExceededError(f"|G| = {G.order} exceeds subgroup enumeration bound {max_order}")
    found = {1: ()}
    frontier = [1]
    while frontier:
        nxt = []
        for mask in frontier:
            for g in range(G.order):
                if mask >> g & 1:
                    continue
                m2 = join(G, mask, g)
                if m2 not in found:
                    found[m2] = found[mask] + (g,)
                    nxt.append(m2)
        frontier = nxt
    subs = [Subgroup(G, m, gens) for m, gens in found.items()]
    subs.sort(key=lambda H: (H.order, H.members()))
    return subs


def index5_subgroups(G: GroupSpec) -> list[Subgroup]:
    """Index-5 subgroups of Z_5^n, one per nonzero functional up to scalars."""
    return [F for _, F in index5_kernels(G)]


def index5_kernels(G: GroupSpec) -> list[tuple[tuple[int, ...], Subgroup]]:
    """Pairs (functional, kernel) over Z_5^n.

    A functional is kept when its first nonzero coefficient is 1, which picks
    one representative per line of the dual space.
    """
    if not G.is_elementary(5):
        raise ValueError(f"{G} is not an elementary abelian 5-group")
    out = []
    for c in functionals_mod_scalar(G.rank):
        mask = 0
        for i, x in enumerate(G.coords_table):
            if sum(a * b for a, b in zip(c, x)) % 5 == 0:
                mask |= 1 << i
        out.append((c, Subgroup(G, mask, ())))
    return out


def functionals_mod_scalar(n: int) -> list[tuple[int, ...]]:
    out = []
    for idx in range(1, 5 ** n):
        c = []
        for _ in range(n):
            idx, r = divmod(idx, 5)
            c.append(r)
        if next(x for x in c if x) == 1:
            out.append(tuple(c))
    return out


# ---------------------------------------------------------------------------
# quotients
# ---------------------------------------------------------------------------

def quotient_map(G: GroupSpec, H: Subgroup) -> tuple[GroupSpec, list[int]]:
    """Canonical homomorphism onto G/H, with G/H in invariant-factor form.

    Returns ``(Q, table)`` with ``table[g]`` the index in ``Q`` of the coset
    ``g + H``.
    """
    if H.group != G or not H.is_closed():
        raise NotASubgroupError("H is not a subgroup of G")
    gens = list(H.generators) or [g for g in H.members() if g]
    if not G.rank:
        return G, [0]
    relations = [[m if i == j else 0 for j in range(G.rank)] for i, m in enumerate(G.factors)]
    for g in gens:
        x = G.coords_table[g]
        for i in range(G.rank):
            relations[i].append(x[i])
    diag, P = smith_left(relations)
    keep = [i for i, d in enumerate(diag) if d != 1]
    Q = GroupSpec(tuple(diag[i] for i in keep))
    table = []
    for x in G.coords_table:
        table.append(Q.encode([sum(P[i][j] * x[j] for j in range(G.rank)) for i in keep]))
    return Q, table
