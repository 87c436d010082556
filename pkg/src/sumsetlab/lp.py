"""The ten small linear programs over coset densities, solved two ways.

Each instance minimizes ``sum_j c_j a_j`` with ``c_j = cos(2 pi (delta + j/5))``
subject to ``sum a_j >= 3/2``, ``0 <= a_k <= 1/2`` for one relaxed index ``k``
and ``0 <= a_j <= 2/5`` otherwise.  ``delta`` is 0 (case I) or 1/3 (case II).
The certified claim is that every minimum exceeds ``-9/14``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

THRESHOLD = Fraction(-9, 14)
TOTAL = Fraction(3, 2)
CAP = Fraction(2, 5)
RELAXED_CAP = Fraction(1, 2)
DIGITS = 50
UNIT_ROUNDOFF = Fraction(1, 2 ** 53)


class CertificationFailed(AssertionError):
    pass


class Infeasible(ValueError):
    pass


def exact_cosines(delta: Fraction) -> list[mpmath.mpf]:
    with mpmath.workdps(DIGITS):
        return [mpmath.cos(2 * mpmath.pi * (mpmath.mpf(delta.numerator) / delta.denominator
                                            + mpmath.mpf(j) / 5)) for j in range(5)]


@dataclass(frozen=True)
class LpInstance:
    case: str
    relaxed: int
    coefficients: tuple[float, ...]
    upper: tuple[Fraction, ...]
    total: Fraction = TOTAL
    # |float coefficient - true coefficient|, rounded up
    coefficient_error: tuple[Fraction, ...] = ()
    high_precision: tuple = ()

    @classmethod
    def standard(cls, case: str, relaxed: int) -> "LpInstance":
        if case not in ("I", "II"):
            raise ValueError("case is 'I' or 'II'")
        if not 0 <= relaxed <= 4:
            raise ValueError("relaxed index must lie in [0, 4]")
        delta = Fraction(0) if case == "I" else Fraction(1, 3)
        hp = exact_cosines(delta)
        coeffs = tuple(float(c) for c in hp)
        with mpmath.workdps(DIGITS):
            err = tuple(
                Fraction(str(mpmath.nstr(abs(mpmath.mpf(f) - c), 5, min_fixed=-100, max_fixed=100)))
                + Fraction(1, 10 ** (DIGITS - 5))
                for f, c in zip(coeffs, hp)
            )
        upper = tuple(RELAXED_CAP if j == relaxed else CAP for j in range(5))
        return cls(case, relaxed, coeffs, upper, TOTAL, err, tuple(hp))

    @classmethod
    def generic(cls, coefficients: Sequence[float], upper: Sequence[Fraction],
                total: Fraction = TOTAL) -> "LpInstance":
        return cls("custom", -1, tuple(float(c) for c in coefficients),
                   tuple(Fraction(u) for u in upper), Fraction(total),
                   tuple(Fraction(0) for _ in coefficients))

    def objective(self, point: Sequence[Fraction]) -> float:
        return math.fsum(c * float(a) for c, a in zip(self.coefficients, point))

    def objective_exact(self, point: Sequence[Fraction]) -> Fraction:
        """Objective with the float coefficients taken as exact rationals."""
        return sum((Fraction(c) * a for c, a in zip(self.coefficients, point)), Fraction(0))

    def feasible(self, point: Sequence[Fraction]) -> bool:
        return (sum(point) >= self.total
                and all(0 <= a <= u for a, u in zip(point, self.upper)))


def solve_greedy(inst: LpInstance) -> tuple[float, tuple[Fraction, ...]]:
    """Continuous knapsack: negatives at their caps, then fill the cheapest."""
    if sum(inst.upper) < inst.total:
        raise Infeasible("caps cannot reach the required total")
    x = [Fraction(0)] * len(inst.coefficients)
    for j, c in enumerate(inst.coefficients):
        if c < 0:
            x[j] = inst.upper[j]
    need = inst.total - sum(x)
    for j in sorted((j for j, c in enumerate(inst.coefficients) if c >= 0),
                    key=lambda j: (inst.coefficients[j], j)):
        if need <= 0:
            break
        x[j] = min(inst.upper[j], need)
        need -= x[j]
    point = tuple(x)
    return inst.objective(point), point


def vertices(inst: LpInstance) -> list[tuple[Fraction, ...]]:
    """All vertices of the feasible polytope, in exact arithmetic.

    A vertex has ``d`` linearly independent active constraints among
    ``sum = total``, ``a_j = 0`` and ``a_j = u_j``.  Two bounds on the same
    variable are never independent, so the nonsingular active sets are:
    every variable at a bound, or the sum row plus bounds on all but one
    variable, which the sum then determines.
    """
    d = len(inst.coefficients)
    out = set()
    choices = [(Fraction(0), u) for u in inst.upper]
    for point in itertools.product(*choices):
        if inst.feasible(point):
            out.add(tuple(point))
    for free in range(d):
        others = [choices[j] for j in range(d) if j != free]
        for fixed in itertools.product(*others):
            rest = inst.total - sum(fixed)
            point = list(fixed)
            point.insert(free, rest)
            if inst.feasible(point):
                out.add(tuple(point))
    return sorted(out)


def solve_vertices(inst: LpInstance) -> tuple[float, tuple[Fraction, ...]]:
    best = None
    for v in vertices(inst):
        val = inst.objective(v)
        if best is None or val < best[0]:
            best = (val, v)
    if best is None:
        raise Infeasible("no feasible vertex")
    return best


@dataclass(frozen=True)
class LpCertificate:
    instance: LpInstance
    minimum: float
    argmin: tuple[Fraction, ...]
    error_bound: Fraction
    vertex_minimum: float
    vertex_argmin: tuple[Fraction, ...]

    @property
    def margin(self) -> float:
        return self.minimum - float(THRESHOLD)

    @property
    def method_agreement(self) -> float:
        return abs(self.minimum - self.vertex_minimum)

    @property
    def certified(self) -> bool:
        return Fraction(self.minimum) - self.error_bound > THRESHOLD

    def to_json(self) -> dict:
        inst = self.instance
        return {
            "case": inst.case,
            "k": inst.relaxed,
            "coefficients": [mpmath.nstr(c, 30) for c in inst.high_precision]
            or [repr(c) for c in inst.coefficients],
            "coefficient_error": [str(float(e)) for e in inst.coefficient_error],
            "minimum": self.minimum,
            "error_bound": float(self.error_bound),
            "argmin": [str(a) for a in self.argmin],
            "margin": self.margin,
            "method_agreement": self.method_agreement,
            "verdict": "certified" if self.certified else "failed",
        }


def certify(inst: LpInstance) -> LpCertificate:
    minimum, argmin = solve_greedy(inst)
    vmin, varg = solve_vertices(inst)
    # Coefficient rounding can move the optimum anywhere in the box, so it is
    # bounded with the caps; then the float evaluation error at the argmin.
    exact = inst.objective_exact(argmin)
    err = sum((u * e for u, e in zip(inst.upper, inst.coefficient_error)), Fraction(0))
    err += abs(Fraction(minimum) - exact)
    err += 2 * len(argmin) * UNIT_ROUNDOFF * sum(
        (abs(Fraction(c)) * a for c, a in zip(inst.coefficients, argmin)), Fraction(0))
    return LpCertificate(inst, minimum, argmin, err, vmin, varg)


def certify_all() -> list[LpCertificate]:
    certs = [certify(LpInstance.standard(case, k)) for case in ("I", "II") for k in range(5)]
    bad = [c for c in certs if not c.certified]
    if bad:
        raise CertificationFailed(
            "minimum not above -9/14 for " + ", ".join(f"case {c.instance.case} k={c.instance.relaxed}" for c in bad)
        )
    return certs


def high_precision_objective(cert: LpCertificate) -> mpmath.mpf:
    with mpmath.workdps(DIGITS):
        return mpmath.fsum(c * mpmath.mpf(a.numerator) / a.denominator
                           for c, a in zip(cert.instance.high_precision, cert.argmin))
