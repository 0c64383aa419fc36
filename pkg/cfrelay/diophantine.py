"""
The linear Diophantine equation a1 x1 + a2 x2 = lambda.

With g = gcd(a1, a2) and a Bezout pair a1 u1 + a2 u2 = g, every integer
solution is

    x1 = (u1/g) lambda + (a2/g) k
    x2 = (u2/g) lambda - (a1/g) k,    k in Z.

All arithmetic here is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cfrelay.errors import InvalidInputError, NoSolutionError


@dataclass(frozen=True)
class EquationCoeffs:
    a1: int
    a2: int
    g: int
    u1: int
    u2: int

    def __post_init__(self):
        if self.a1 == 0 and self.a2 == 0:
            raise InvalidInputError("coefficients (0, 0) define no equation")
        if self.g <= 0 or self.a1 % self.g or self.a2 % self.g:
            raise InvalidInputError(f"g={self.g} does not divide ({self.a1}, {self.a2})")
        if self.a1 * self.u1 + self.a2 * self.u2 != self.g:
            raise InvalidInputError(
                f"Bezout identity fails: {self.a1}*{self.u1} + {self.a2}*{self.u2} != {self.g}"
            )

    @property
    def homogeneous_step(self) -> tuple[int, int]:
        """Change of (x1, x2) per unit step of k."""
        return self.a2 // self.g, -(self.a1 // self.g)

    def shifted(self, t: int) -> "EquationCoeffs":
        """Same equation with the Bezout pair moved t steps along the homogeneous solutions."""
        p, q = self.homogeneous_step
        return EquationCoeffs(self.a1, self.a2, self.g, self.u1 + t * p, self.u2 + t * q)

    def negated(self) -> "EquationCoeffs":
        return EquationCoeffs(-self.a1, -self.a2, self.g, -self.u1, -self.u2)


@dataclass(frozen=True)
class Constellation:
    """Integer symbols S = {-s_m, ..., s_m}."""

    s_m: int

    def __post_init__(self):
        if int(self.s_m) != self.s_m or self.s_m < 1:
            raise InvalidInputError(f"s_m must be a positive integer, got {self.s_m}")

    @property
    def avg_energy(self) -> float:
        # Mean square of the uniform distribution on S
        return self.s_m * (self.s_m + 1) / 3.0

    @property
    def symbols(self) -> tuple[int, ...]:
        return tuple(range(-self.s_m, self.s_m + 1))

    @property
    def size(self) -> int:
        return 2 * self.s_m + 1

    def __contains__(self, x) -> bool:
        try:
            return int(x) == x and abs(x) <= self.s_m
        except (TypeError, ValueError, OverflowError):
            return False


def extended_gcd(a1: int, a2: int) -> EquationCoeffs:
    """gcd g > 0 and a Bezout pair (u1, u2) with a1 u1 + a2 u2 = g."""
    a1, a2 = int(a1), int(a2)
    if a1 == 0 and a2 == 0:
        raise InvalidInputError("extended_gcd(0, 0) is undefined")

    old_r, r = a1, a2
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t

    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return EquationCoeffs(a1, a2, old_r, old_s, old_t)


def _check_divisible(coeffs: EquationCoeffs, lam: int):
    if lam % coeffs.g:
        raise NoSolutionError(
            f"{coeffs.a1} x1 + {coeffs.a2} x2 = {lam} has no integer solution (gcd {coeffs.g})"
        )


def solution_family(coeffs: EquationCoeffs, lam: int, k: int) -> tuple[int, int]:
    """The k-th member of the solution family of a1 x1 + a2 x2 = lam."""
    lam, k = int(lam), int(k)
    _check_divisible(coeffs, lam)
    scaled = lam // coeffs.g
    p, q = coeffs.homogeneous_step
    return coeffs.u1 * scaled + p * k, coeffs.u2 * scaled + q * k


def _ceil_div(num: int, den: int) -> int:
    return -((-num) // den)


def _k_interval(base: int, step: int, s_m: int):
    """Integers k with -s_m <= base + step*k <= s_m; None means unconstrained."""
    if step == 0:
        return None if abs(base) <= s_m else (1, 0)
    if step > 0:
        return _ceil_div(-s_m - base, step), (s_m - base) // step
    return _ceil_div(s_m - base, step), (-s_m - base) // step


def feasible_k_range(coeffs: EquationCoeffs, lam: int, cons: Constellation) -> range:
    """All k whose solution (x1, x2) lies in S x S, as a (possibly empty) range."""
    x1, x2 = solution_family(coeffs, lam, 0)
    p, q = coeffs.homogeneous_step

    lo, hi = None, None
    for interval in (_k_interval(x1, p, cons.s_m), _k_interval(x2, q, cons.s_m)):
        if interval is None:
            continue
        lo = interval[0] if lo is None else max(lo, interval[0])
        hi = interval[1] if hi is None else min(hi, interval[1])
    # p and q are never both zero, so at least one interval applies
    return range(lo, max(lo, hi + 1))


def lambda_alphabet(coeffs: EquationCoeffs, cons: Constellation) -> list[int]:
    """Every value a1 x1 + a2 x2 with (x1, x2) in S x S, ascending."""
    s = np.arange(-cons.s_m, cons.s_m + 1, dtype=np.int64)
    values = np.add.outer(coeffs.a1 * s, coeffs.a2 * s)
    return [int(v) for v in np.unique(values)]
