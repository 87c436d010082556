"""Explicit large sets with ``3A != G`` and a mechanical check of each claim.

Choices left open by the mathematics are fixed canonically so that builds
are reproducible: the direction is the first generator of the requested
decomposition, and every "one element from each pair" choice takes the
element with the smaller index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .groups import (
    GroupSpec,
    Subgroup,
    embed_cyclic_sum,
    enumerate_subgroups,
    generated_subgroup,
    index5_kernels,
)
from .sets import (
    DenseSubset,
    format_set,
    is_maximal_nonfull,
    iter_bits,
    k_fold_sumset,
    period,
    sumset_bits,
    translate,
)


class ConstructionError(ValueError):
    pass


@dataclass
class ConstructionRecipe:
    kind: str
    group: GroupSpec
    output: DenseSubset
    parameters: dict = field(default_factory=dict)
    expected_size: Optional[Fraction] = None
    expected_missing: Optional[list[int]] = None
    checks: dict = field(default_factory=dict)
    # facts computed alongside but not claimed for this kind of set
    info: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_json(self) -> dict:
        G = self.group
        return {
            "kind": self.kind,
            "group": G.literal(),
            "size": self.output.cardinality,
            "set": format_set(self.output),
            "parameters": self.parameters,
            "missing_from_3A": [_elem(G, i) for i in (self.expected_missing or [])],
            "checks": self.checks,
            "info": self.info,
            "verified": self.verified,
        }


def _elem(G: GroupSpec, i: int) -> str:
    return "(" + ",".join(map(str, G.decode(i))) + ")"


def verify(recipe: ConstructionRecipe, k: int = 3) -> ConstructionRecipe:
    """Re-derive each claimed property of ``recipe.output`` from scratch."""
    A = recipe.output
    G = A.group
    kA = k_fold_sumset(A, k)
    checks = {"sumset_not_full": not kA.is_full()}
    if recipe.expected_size is not None:
        checks["size"] = A.cardinality == recipe.expected_size
    if recipe.expected_missing is not None:
        missing = sorted(iter_bits(G.full_mask & ~kA.bits))
        checks["missing_exact"] = missing == sorted(recipe.expected_missing)
        target = recipe.expected_missing[0]
        checks["maximal_for_missing"] = all(
            k_fold_sumset(A.add_element(g), k).bits >> target & 1
            for g in range(G.order) if g not in A
        )
    checks["maximal"] = is_maximal_nonfull(A, k)
    checks["aperiodic"] = period(A).mask == 1
    recipe.checks = checks
    return recipe


# ---------------------------------------------------------------------------
# one representative from each pair
# ---------------------------------------------------------------------------

def pair_representatives(G: GroupSpec, H: Subgroup, partner) -> list[int]:
    """Smaller-index element of each pair ``{h, partner(h)}`` with ``h != partner(h)``."""
    out, seen = [], set()
    for h in H.members():
        p = partner(h)
        if h == p or h in seen:
            continue
        seen.update((h, p))
        out.append(min(h, p))
    return sorted(out)


# ---------------------------------------------------------------------------
# direct sums of cyclic groups of order 1 mod 3
# ---------------------------------------------------------------------------

def build_decomp(factors: Sequence[int] | GroupSpec) -> ConstructionRecipe:
    """``H | (e+H) | ... | ((m-1)e+H) | (me+S)`` applied recursively.

    ``factors`` lists the cyclic orders of the decomposition, each = 1 mod 3;
    the first summand carries the direction ``e`` and ``S`` is the set built
    for the remaining summands (empty on the trivial group).
    """
    if isinstance(factors, GroupSpec):
        factors = factors.factors
    factors = [int(f) for f in factors]
    if not factors:
        raise ConstructionError("need at least one cyclic summand")
    for f in factors:
        if f % 3 != 1:
            raise ConstructionError(f"summand order {f} is not 1 mod 3")
    G, gens = embed_cyclic_sum(factors)
    gen_idx = [g.index(G) for g in gens]
    S = 0
    for j in range(len(factors) - 1, -1, -1):
        m = (factors[j] - 1) // 3
        H = generated_subgroup(G, gen_idx[j + 1:]).mask
        e = gen_idx[j]
        A, shift = 0, 0
        for _ in range(m):
            A |= translate(G, H, shift)
            shift = G.add(shift, e)
        A |= translate(G, S, shift)
        S = A
    out = DenseSubset(G, S)
    recipe = ConstructionRecipe(
        "decomp", G, out,
        parameters={"summands": factors, "directions": [_elem(G, i) for i in gen_idx]},
        expected_size=Fraction(G.order - 1, 3),
    )
    verify(recipe)
    recipe.checks["coprime_to_order"] = gcd(out.cardinality, G.order) == 1
    return recipe


# ---------------------------------------------------------------------------
# two cosets of an index-5 subgroup of Z_5^n
# ---------------------------------------------------------------------------

def build_two_coset(n: int, functional: Optional[Sequence[int]] = None,
                    cosets: tuple[int, int] = (0, 1)) -> ConstructionRecipe:
    """Union of the cosets ``{x : c.x = i}`` and ``{x : c.x = j}``."""
    if n < 1:
        raise ConstructionError("n must be >= 1")
    i, j = cosets
    if i == j or not (0 <= i < 5 and 0 <= j < 5):
        raise ConstructionError(f"need two distinct coset labels in [0,5), got {cosets}")
    G = GroupSpec((5,) * n)
    if functional is None:
        c = index5_kernels(G)[0][0]
    else:
        c = tuple(int(x) % 5 for x in functional)
        if len(c) != n or not any(c):
            raise ConstructionError(f"functional {functional} does not define an index-5 subgroup")
    bits = 0
    for idx, x in enumerate(G.coords_table):
        if sum(a * b for a, b in zip(c, x)) % 5 in (i, j):
            bits |= 1 << idx
    recipe = ConstructionRecipe(
        "two_coset", G, DenseSubset(G, bits),
        parameters={"functional": list(c), "cosets": [i, j]},
        expected_size=Fraction(2 * 5 ** (n - 1)),
    )
    verify(recipe)
    # a union of cosets is periodic; that is not a claim of the example
    recipe.info["aperiodic"] = recipe.checks.pop("aperiodic")
    return recipe


# ---------------------------------------------------------------------------
# the (3*5^(n-1) - 1)/2 set
# ---------------------------------------------------------------------------

def build_x22(n: int, S: Optional[Iterable[int]] = None) -> ConstructionRecipe:
    """``(H \\ {0}) | (e + S) | {2e}`` with ``e = (1,0,...,0)``, ``H = {x_1 = 0}``.

    ``S`` defaults to one element from each pair ``{h, -h}``; a supplied ``S``
    (element indices) must have ``(|H|-1)/2`` elements of H and ``0 not in 2S``.
    """
    if n < 2:
        raise ConstructionError("n must be >= 2")
    G = GroupSpec((5,) * n)
    e = G.encode((1,) + (0,) * (n - 1))
    H = Subgroup(G, sum(1 << i for i, x in enumerate(G.coords_table) if x[0] == 0))
    if S is None:
        S = pair_representatives(G, H, G.neg)
    S = sorted(set(S))
    if any(s not in H for s in S):
        raise ConstructionError("S must lie in H")
    if len(S) != (H.order - 1) // 2:
        raise ConstructionError(f"|S| must be {(H.order - 1) // 2}")
    Sbits = sum(1 << s for s in S)
    if sumset_bits(G, Sbits, Sbits) & 1:
        raise ConstructionError("0 lies in 2S")
    two_e = G.scale(2, e)
    bits = (H.mask & ~1) | translate(G, Sbits, e) | (1 << two_e)
    recipe = ConstructionRecipe(
        "x22", G, DenseSubset(G, bits),
        parameters={"direction": _elem(G, e), "S": [_elem(G, s) for s in S]},
        expected_size=Fraction(3 * 5 ** (n - 1) - 1, 2),
        expected_missing=[G.scale(4, e)],
    )
    return verify(recipe)


# ---------------------------------------------------------------------------
# a summand of order 2 mod 3
# ---------------------------------------------------------------------------

def find_direct_summand(G: GroupSpec, order: int) -> tuple[int, Subgroup]:
    """Least-index ``e`` of the given order with a complement ``H``.

    Returns ``(e, H)`` with ``G = <e> + H`` a direct sum.
    """
    if G.order % order:
        raise ConstructionError(f"{order} does not divide |G| = {G.order}")
    want = G.order // order
    subs = [H for H in enumerate_subgroups(G) if H.order == want]
    for e in range(G.order):
        if G.element_order(e) != order:
            continue
        cyc = generated_subgroup(G, [e]).mask
        for H in subs:
            if H.mask & cyc == 1:
                return e, H
    raise ConstructionError(f"{G} has no cyclic direct summand of order {order}")


def build_mod3(G: GroupSpec | Sequence[int], g1_order: Optional[int] = None,
               parity: Optional[str] = None) -> ConstructionRecipe:
    """The mod-3 set for ``G = G_1 + H`` with ``|G_1| = 3m + 2``.

    ``G`` is either a list of cyclic orders whose first entry is ``|G_1|``,
    or a group together with ``g1_order`` (a summand is then searched for).
    """
    if isinstance(G, GroupSpec):
        if g1_order is None:
            raise ConstructionError("g1_order is required when G is a GroupSpec")
        if G.order % g1_order:
            raise ConstructionError(f"no summand of order {g1_order} in {G}")
        e, H = find_direct_summand(G, g1_order)
        factors = None
    else:
        factors = [int(f) for f in G]
        if not factors:
            raise ConstructionError("need the summand orders")
        if g1_order is not None and g1_order != factors[0]:
            raise ConstructionError("g1_order must match the first listed summand")
        g1_order = factors[0]
        G, gens = embed_cyclic_sum(factors)
        idx = [g.index(G) for g in gens]
        e, H = idx[0], generated_subgroup(G, idx[1:])
    if g1_order % 3 != 2 or g1_order < 5:
        raise ConstructionError(f"summand order {g1_order} is not 3m+2 with m >= 1")
    m = (g1_order - 2) // 3
    odd = H.order % 2 == 1
    if parity is not None and parity != ("odd" if odd else "even"):
        raise ConstructionError(f"|H| = {H.order} does not have parity {parity}")

    if odd:
        g = 0
        S = pair_representatives(G, H, G.neg)
    else:
        doubles = {G.add(h, h) for h in H.members()}
        outside = [h for h in H.members() if h not in doubles]
        if not outside:
            raise ConstructionError("2H = H, no valid g")
        g = outside[0]
        S = pair_representatives(G, H, lambda h: G.add(g, G.neg(h)))
    Sbits = sum(1 << s for s in S)

    bits, shift = 0, 0
    for _ in range(m - 1):
        bits |= translate(G, H.mask, shift)
        shift = G.add(shift, e)
    bits |= translate(G, H.mask & ~(1 << g), shift)       # (m-1)e + (H \ {g})
    shift = G.add(shift, e)
    bits |= translate(G, Sbits, shift)                    # me + S
    shift = G.add(shift, e)
    bits |= 1 << shift                                    # (m+1)e
    target = G.add(G.scale(3 * m + 1, e), g)

    size = Fraction(2 * m + 1, 6 * m + 4) * G.order - (Fraction(1, 2) if odd else 0)
    params = {"m": m, "parity": "odd" if odd else "even", "direction": _elem(G, e),
              "H_order": H.order, "S": [_elem(G, s) for s in S]}
    if factors is not None:
        params["summands"] = factors
    if not odd:
        params["g"] = _elem(G, g)
    recipe = ConstructionRecipe("mod3_odd" if odd else "mod3_even", G, DenseSubset(G, bits),
                                parameters=params, expected_size=size)
    verify(recipe)
    # the claim is maximality for the target element only; 3A may miss more
    recipe.info["maximal_nonfull"] = recipe.checks.pop("maximal")
    A = recipe.output
    kA = k_fold_sumset(A, 3)
    recipe.expected_missing = sorted(iter_bits(G.full_mask & ~kA.bits))
    recipe.checks["target_missing"] = not kA.bits >> target & 1
    recipe.checks["maximal_for_target"] = all(
        k_fold_sumset(A.add_element(x), 3).bits >> target & 1
        for x in range(G.order) if x not in A
    )
    recipe.parameters["target"] = _elem(G, target)
    if H.order == 1:
        recipe.info["note"] = "H is trivial, so G_1 is not a proper summand"
    return recipe


BUILDERS = {
    "decomp": build_decomp,
    "two_coset": build_two_coset,
    "x22": build_x22,
    "mod3": build_mod3,
}
