"""Bit-packed subsets of a finite abelian group and the sumset kernels.

A subset is a Python ``int`` whose bit ``i`` says whether the element with
mixed-radix index ``i`` belongs to it.  Translating by ``g`` rotates, for each
coordinate, every block of ``stride*m`` bits by ``g_i*stride`` positions; that
is two shifts and two masks per nonzero coordinate of ``g``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .groups import (
    GroupElement,
    GroupSpec,
    Subgroup,
    generated_subgroup,
    index5_kernels,
    parse_group,
)

MAX_ORDER = 1 << 20


class GroupMismatchError(ValueError):
    pass


@lru_cache(maxsize=None)
def rotation_masks(G: GroupSpec) -> tuple[tuple[tuple[int, int, int, int], ...], ...]:
    """Per coordinate and shift ``t``: (left shift, mask, right shift, mask)."""
    if G.order > MAX_ORDER:
        raise ValueError(f"|G| = {G.order} exceeds the hard cap {MAX_ORDER}")
    out = []
    for m, s in zip(G.factors, G.strides):
        per_t = [(0, 0, 0, 0)]
        for t in range(1, m):
            lo = hi = 0
            for idx, x in enumerate(G.coords_table):
                c = x[len(out)]
                if c >= t:
                    lo |= 1 << idx
                else:
                    hi |= 1 << idx
            per_t.append((t * s, lo, (m - t) * s, hi))
        out.append(tuple(per_t))
    return tuple(out)


@lru_cache(maxsize=None)
def _element_ops(G: GroupSpec) -> tuple[tuple[tuple[int, int, int, int], ...], ...]:
    rot = rotation_masks(G)
    return tuple(
        tuple(rot[i][c] for i, c in enumerate(x) if c)
        for x in G.coords_table
    )


def translate(G: GroupSpec, bits: int, g: int) -> int:
    """Bits of ``A + g`` for ``A`` given by ``bits`` and ``g`` an element index."""
    for sl, lo, sr, hi in _element_ops(G)[g]:
        bits = ((bits << sl) & lo) | ((bits >> sr) & hi)
    return bits


def iter_bits(bits: int) -> Iterable[int]:
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def sumset_bits(G: GroupSpec, a: int, b: int) -> int:
    if a.bit_count() > b.bit_count():
        a, b = b, a
    out = 0
    for i in iter_bits(a):
        out |= translate(G, b, i)
    return out


@dataclass(frozen=True)
class DenseSubset:
    group: GroupSpec
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.group.order:
            raise ValueError("bits outside the group")

    @classmethod
    def from_indices(cls, G: GroupSpec, indices: Iterable[int]) -> "DenseSubset":
        bits = 0
        for i in indices:
            bits |= 1 << i
        return cls(G, bits)

    @classmethod
    def from_elements(cls, G: GroupSpec, elements: Iterable) -> "DenseSubset":
        return cls.from_indices(G, (G.encode(getattr(e, "coords", e)) for e in elements))

    @classmethod
    def full(cls, G: GroupSpec) -> "DenseSubset":
        return cls(G, G.full_mask)

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def __len__(self):
        return self.cardinality

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self.group.decode(i)) for i in iter_bits(self.bits)]

    def density(self) -> Fraction:
        return Fraction(self.cardinality, self.group.order)

    def is_full(self) -> bool:
        return self.bits == self.group.full_mask

    def _same(self, other: "DenseSubset") -> None:
        if self.group != other.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")

    def __or__(self, other):
        self._same(other)
        return DenseSubset(self.group, self.bits | other.bits)

    def __and__(self, other):
        self._same(other)
        return DenseSubset(self.group, self.bits & other.bits)

    def __sub__(self, other):
        self._same(other)
        return DenseSubset(self.group, self.bits & ~other.bits)

    def __le__(self, other):
        self._same(other)
        return not self.bits & ~other.bits

    def complement(self) -> "DenseSubset":
        return DenseSubset(self.group, self.group.full_mask & ~self.bits)

    def add_element(self, g: int) -> "DenseSubset":
        return DenseSubset(self.group, self.bits | 1 << g)

    def translate(self, g: int) -> "DenseSubset":
        return DenseSubset(self.group, translate(self.group, self.bits, g))

    def negate(self) -> "DenseSubset":
        return DenseSubset.from_indices(self.group, (self.group.neg(i) for i in iter_bits(self.bits)))

    def literal(self) -> str:
        return format_set(self)

    def __str__(self):
        return format_set(self)


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------

def format_set(A: DenseSubset) -> str:
    return "{" + ",".join(str(e) for e in A.elements()) + "}"


def format_set_hex(A: DenseSubset) -> str:
    return f"hex:{A.group.literal()}:{A.bits:x}"


_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_set(text: str, G: Optional[GroupSpec] = None) -> DenseSubset:
    """Parse ``{(a,b),(c,d)}`` (needs ``G``) or ``hex:<factors>:<hexbits>``.

    In a cyclic group bare integers ``{1,4}`` are accepted as well.
    """
    text = text.strip()
    if text.startswith("hex:"):
        _, glit, hexbits = text.split(":", 2)
        H = parse_group(glit)
        if G is not None and G != H:
            raise GroupMismatchError(f"literal is over {H}, expected {G}")
        return DenseSubset(H, int(hexbits or "0", 16))
    if G is None:
        raise ValueError("a group is required to parse a coordinate set literal")
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"not a set literal: {text!r}")
    body = text[1:-1].strip()
    coords = []
    if "(" in body:
        for m in _TUPLE.finditer(body):
            inner = m.group(1).strip()
            coords.append(tuple(int(t) for t in inner.split(",")) if inner else ())
    elif body:
        coords = [(int(t),) for t in body.split(",")]
    for c in coords:
        if len(c) != G.rank:
            raise ValueError(f"element {c} does not have {G.rank} coordinates")
        for x, m in zip(c, G.factors):
            if not 0 <= x < m:
                raise ValueError(f"coordinate {x} out of range for Z{m}")
    return DenseSubset.from_indices(G, (G.encode(c) for c in coords))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def sumset(A: DenseSubset, B: DenseSubset) -> DenseSubset:
    A._same(B)
    return DenseSubset(A.group, sumset_bits(A.group, A.bits, B.bits))


def k_fold_sumset(A: DenseSubset, k: int) -> DenseSubset:
    """``kA`` by repeated doubling."""
    if k < 1:
        raise ValueError("k must be positive")
    G = A.group
    result, power = None, A.bits
    while k:
        if k & 1:
            result = power if result is None else sumset_bits(G, result, power)
        k >>= 1
        if k:
            power = sumset_bits(G, power, power)
    return DenseSubset(G, result)


def partial_sumsets(A: DenseSubset, k: int) -> list[int]:
    """Bits of ``0A = {0}, A, 2A, ..., kA``."""
    G = A.group
    out = [1, A.bits]
    for _ in range(k - 1):
        out.append(sumset_bits(G, out[-1], A.bits))
    return out[: k + 1]


def period(A: DenseSubset) -> Subgroup:
    """Stabilizer ``{g : A + g = A}``; the empty set is stabilized by all of G."""
    G = A.group
    if not A.bits:
        return Subgroup(G, G.full_mask, ())
    a0 = (A.bits & -A.bits).bit_length() - 1
    na0 = G.neg(a0)
    mask = 0
    for a in iter_bits(A.bits):
        g = G.add(a, na0)
        if translate(G, A.bits, g) == A.bits:
            mask |= 1 << g
    return Subgroup(G, mask, ())


def is_aperiodic(A: DenseSubset) -> bool:
    return period(A).mask == 1


def is_maximal_nonfull(A: DenseSubset, k: int) -> bool:
    """``kA != G`` while ``k(A | {g}) == G`` for every ``g`` outside A.

    Uses ``k(A+g) = kA | ((k-1)A + g) | ... | (0A + kg)`` with the partial
    sumsets of A computed once.
    """
    G = A.group
    full = G.full_mask
    parts = partial_sumsets(A, k)
    if parts[k] == full:
        return False
    for g in iter_bits(full & ~A.bits):
        u, jg = parts[k], 0
        for j in range(1, k + 1):
            jg = G.add(jg, g)
            u |= translate(G, parts[k - j], jg)
            if u == full:
                break
        if u != full:
            return False
    return True


def generates(A: DenseSubset) -> bool:
    return generated_subgroup(A.group, A.indices()).mask == A.group.full_mask


def min_cover_k(A: DenseSubset) -> Optional[int]:
    """Least ``k`` with ``k(A | {0}) = G``; ``None`` if A does not generate."""
    G = A.group
    if not generates(A):
        return None
    B = A.bits | 1
    cur, k = 1, 0
    while cur != G.full_mask:
        cur = sumset_bits(G, cur, B)
        k += 1
    return k


@dataclass(frozen=True)
class CosetProfile:
    subgroup: Subgroup
    direction: int
    densities: tuple[Fraction, ...]
    counts: tuple[int, ...]


def coset_profile(A: DenseSubset, F: Subgroup, e: int) -> CosetProfile:
    G = A.group
    if F.index != 5:
        raise ValueError(f"subgroup has index {F.index}, expected 5")
    if e in F:
        raise ValueError("direction lies in the subgroup")
    counts, shift = [], 0
    for _ in range(5):
        counts.append((A.bits & translate(G, F.mask, shift)).bit_count())
        shift = G.add(shift, e)
    return CosetProfile(F, e, tuple(Fraction(c, F.order) for c in counts), tuple(counts))


@lru_cache(maxsize=None)
def index5_cosets(G: GroupSpec) -> tuple[tuple[Subgroup, tuple[int, ...]], ...]:
    """Each index-5 subgroup of Z_5^n with its five coset masks.

    Coset ``j`` is where the defining functional takes the value ``j``.
    """
    out = []
    for c, F in index5_kernels(G):
        masks = [0] * 5
        for i, x in enumerate(G.coords_table):
            masks[sum(a * b for a, b in zip(c, x)) % 5] |= 1 << i
        out.append((F, tuple(masks)))
    return tuple(out)


def two_coset_cover_exists(A: DenseSubset) -> Optional[tuple[Subgroup, tuple[int, int]]]:
    """An index-5 subgroup and two of its cosets whose union contains A."""
    G = A.group
    if not G.is_elementary(5):
        raise ValueError(f"{G} is not of exponent 5")
    for F, masks in index5_cosets(G):
        for i in range(5):
            for j in range(i + 1, 5):
                if not A.bits & ~(masks[i] | masks[j]):
                    return F, (i, j)
    return None
