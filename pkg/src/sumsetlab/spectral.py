"""Fourier analysis of subsets of Z_5^n.

Characters are indexed like group elements: ``chi_c(x) = w^(c.x)`` with
``w = exp(2 pi i / 5)``, and ``c`` decoded from the character index with the
group's mixed-radix layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .groups import GroupSpec, Subgroup
from .sets import CosetProfile, DenseSubset, coset_profile, iter_bits, k_fold_sumset

mpmath.mp.dps = 50
_TAU = 2 * mpmath.pi

ROOTS5 = np.array([complex(mpmath.expjpi(mpmath.mpf(2 * j) / 5)) for j in range(5)])
# exp(2 pi i t/3) for t = 0, 1, 2
CUBE_ROOTS = np.array([complex(mpmath.expjpi(mpmath.mpf(2 * t) / 3)) for t in range(3)])


class NotExponentFiveError(ValueError):
    pass


class ZeroInTripleSumError(ValueError):
    pass


def _require_z5n(G: GroupSpec) -> int:
    if not G.rank or not G.is_elementary(5):
        raise NotExponentFiveError(f"{G} is not Z_5^n")
    return G.rank


@dataclass(frozen=True)
class Character:
    coeffs: tuple[int, ...]

    @property
    def is_principal(self) -> bool:
        return not any(self.coeffs)

    def exponent(self, x) -> int:
        return sum(c * v for c, v in zip(self.coeffs, x)) % 5

    def __call__(self, x) -> complex:
        return ROOTS5[self.exponent(x)]

    def conjugate(self) -> "Character":
        return Character(tuple((-c) % 5 for c in self.coeffs))

    def index(self, G: GroupSpec) -> int:
        return G.encode(self.coeffs)

    def kernel(self, G: GroupSpec) -> Subgroup:
        mask = 0
        for i, x in enumerate(G.coords_table):
            if self.exponent(x) == 0:
                mask |= 1 << i
        return Subgroup(G, mask)

    def unit_direction(self, G: GroupSpec) -> int:
        """An element ``e`` with ``chi(e) = exp(2 pi i / 5)``."""
        j = next(i for i, c in enumerate(self.coeffs) if c)
        inv = pow(self.coeffs[j], -1, 5)
        coords = [0] * len(self.coeffs)
        coords[j] = inv
        return G.encode(coords)


@lru_cache(maxsize=None)
def _coords(G: GroupSpec) -> np.ndarray:
    return np.array(G.coords_table, dtype=np.int64).reshape(G.order, G.rank)


def coefficients(A: DenseSubset) -> np.ndarray:
    """``5^-n * sum_{a in A} chi(a)`` for every character, by character index."""
    G = A.group
    n = _require_z5n(G)
    C = _coords(G)
    idx = np.fromiter(iter_bits(A.bits), dtype=np.int64)
    if not idx.size:
        return np.zeros(G.order, dtype=complex)
    expo = (C @ C[idx].T) % 5
    return ROOTS5[expo].sum(axis=1) / 5 ** n


def fourier_coefficient(A: DenseSubset, chi: Character) -> complex:
    G = A.group
    n = _require_z5n(G)
    return sum(chi(x) for x in (G.coords_table[i] for i in iter_bits(A.bits))) / 5 ** n


def cubic_sum(A: DenseSubset) -> complex:
    c = coefficients(A)
    return complex((c ** 3).sum())


def zero_triples(A: DenseSubset) -> int:
    """``#{(a, b, c) in A^3 : a + b + c = 0}`` by direct counting."""
    G = A.group
    members = list(iter_bits(A.bits))
    count = 0
    for a in members:
        for b in members:
            if A.bits >> G.neg(G.add(a, b)) & 1:
                count += 1
    return count


def cubic_sum_oracle(A: DenseSubset) -> Fraction:
    n = _require_z5n(A.group)
    return Fraction(zero_triples(A), 5 ** (2 * n))


def parseval_offprincipal(A: DenseSubset) -> float:
    c = coefficients(A)
    return math.fsum(float(abs(v) ** 2) for v in c[1:])


def choose_zeta(coef: complex) -> int:
    """Exponent ``t`` of the cube root ``exp(2 pi i t / 3)`` that turns
    ``-coef * zeta`` closest to the positive real axis; ties go to ``t = 0``."""
    best, best_t = None, 0
    for t in range(3):
        z = -coef * CUBE_ROOTS[t]
        d = abs(math.atan2(z.imag, z.real)) if z != 0 else 0.0
        if best is None or d < best - 1e-15:
            best, best_t = d, t
    return best_t


@dataclass(frozen=True)
class SpectralWitness:
    character: Character
    coefficient: complex
    zeta_exponent: int
    z: complex
    alpha: Fraction
    profile: CosetProfile

    @property
    def zeta(self) -> complex:
        return CUBE_ROOTS[self.zeta_exponent]

    @property
    def realpart(self) -> float:
        return self.z.real

    @property
    def bound(self) -> float:
        a = float(self.alpha)
        return a * a / (1 - a)

    def lp_objective(self) -> float:
        """``5 Re(coef * zeta)``, the quantity the linear programs minimize."""
        return 5 * (self.coefficient * self.zeta).real

    def profile_objective(self) -> float:
        """The same quantity rebuilt from coset densities."""
        delta = self.zeta_exponent / 3
        return math.fsum(
            float(a) * math.cos(2 * math.pi * (delta + j / 5))
            for j, a in enumerate(self.profile.densities)
        )

    def to_json(self) -> dict:
        return {
            "character": list(self.character.coeffs),
            "coefficient": [self.coefficient.real, self.coefficient.imag],
            "zeta": "1" if self.zeta_exponent == 0 else "exp(2pi i/3)",
            "re_z": self.realpart,
            "bound": self.bound,
            "profile": [str(a) for a in self.profile.densities],
            "direction": list(self.profile.subgroup.group.decode(self.profile.direction)),
        }


def avoid_zero_translate(A: DenseSubset) -> DenseSubset:
    """A translate of A with ``0 not in 3A`` (A must have ``3A != G``)."""
    G = A.group
    _require_z5n(G)
    miss = G.full_mask & ~k_fold_sumset(A, 3).bits
    if not miss:
        raise ZeroInTripleSumError("3A = G, no translate avoids 0")
    x = (miss & -miss).bit_length() - 1
    # 3(A + 3x) = 3A + 9x = 3A - x, which misses 0
    return A.translate(G.scale(3, x))


def find_witness(A: DenseSubset) -> SpectralWitness:
    """Non-principal character maximizing ``Re(z)``, ``z = -coef * zeta``.

    The character is conjugated when needed so that ``zeta`` is 1 or
    ``exp(2 pi i / 3)``.  Ties in ``Re(z)`` go to the smaller character index.
    """
    G = A.group
    _require_z5n(G)
    if k_fold_sumset(A, 3).bits & 1:
        raise ZeroInTripleSumError("0 lies in 3A")
    if not A.bits:
        raise ValueError("A is empty")
    coefs = coefficients(A)
    best = None
    for idx in range(1, G.order):
        t = choose_zeta(coefs[idx])
        z = -coefs[idx] * CUBE_ROOTS[t]
        if best is None or z.real > best[0] + 1e-13:
            best = (z.real, idx, t)
    _, idx, t = best
    chi = Character(G.decode(idx))
    coef = coefs[idx]
    if t == 2:
        chi, coef, t = chi.conjugate(), coef.conjugate(), 1
    z = -coef * CUBE_ROOTS[t]
    F = chi.kernel(G)
    e = chi.unit_direction(G)
    return SpectralWitness(chi, complex(coef), t, complex(z), A.density(), coset_profile(A, F, e))


def spectral_report(A: DenseSubset) -> dict:
    out = {
        "alpha": float(A.density()),
        "cubic_sum": [cubic_sum(A).real, cubic_sum(A).imag],
        "cubic_sum_oracle": str(cubic_sum_oracle(A)),
        "parseval": parseval_offprincipal(A),
        "parseval_expected": float(A.density() * (1 - A.density())),
    }
    B = A
    if k_fold_sumset(A, 3).bits & 1 and not k_fold_sumset(A, 3).is_full():
        B = avoid_zero_translate(A)
        out["translated_by"] = "shifted so that 0 is not in 3A"
    if B.bits and not k_fold_sumset(B, 3).bits & 1:
        out["witness"] = find_witness(B).to_json()
    else:
        out["witness"] = None
    return out
