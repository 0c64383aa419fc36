import math

import numpy as np
import pytest

from cfrelay.diophantine import (
    Constellation,
    EquationCoeffs,
    extended_gcd,
    feasible_k_range,
    lambda_alphabet,
    solution_family,
)
from cfrelay.errors import InvalidInputError, NoSolutionError


def scan_k(coeffs, lam, cons, window=200):
    """Brute-force list of k whose solution lies in S x S."""
    return [k for k in range(-window, window + 1) if all(x in cons for x in solution_family(coeffs, lam, k))]


# ----------------------------------------------------------------------------
# extended_gcd
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("a1, a2, g", [(2, -1, 1), (4, 6, 2), (0, -5, 5), (-7, 0, 7), (-12, -18, 6), (1, 0, 1)])
def test_extended_gcd_identity(a1, a2, g):
    c = extended_gcd(a1, a2)
    assert c.g == g
    assert a1 * c.u1 + a2 * c.u2 == g


def test_extended_gcd_axis_cases():
    c = extended_gcd(0, -5)
    assert (c.g, c.u1, c.u2) == (5, 0, -1)
    c = extended_gcd(-3, 0)
    assert (c.g, c.u1, c.u2) == (3, -1, 0)


def test_extended_gcd_rejects_zero_pair():
    with pytest.raises(InvalidInputError):
        extended_gcd(0, 0)


def test_bezout_identity_random_large(rng):
    for _ in range(20000):
        a1, a2 = (int(v) for v in rng.integers(-10 ** 6, 10 ** 6 + 1, size=2))
        if a1 == 0 and a2 == 0:
            continue
        c = extended_gcd(a1, a2)
        assert c.g == math.gcd(a1, a2)
        assert a1 * c.u1 + a2 * c.u2 == c.g


def test_equation_coeffs_validates_bezout_pair():
    with pytest.raises(InvalidInputError):
        EquationCoeffs(2, -1, 1, 1, 0)
    with pytest.raises(InvalidInputError):
        EquationCoeffs(4, 6, 3, 1, 0)


def test_shifted_and_negated_keep_identity():
    c = extended_gcd(4, 6)
    for t in (-3, 1, 5):
        s = c.shifted(t)
        assert 4 * s.u1 + 6 * s.u2 == 2
    n = c.negated()
    assert (n.a1, n.a2) == (-4, -6)
    assert n.a1 * n.u1 + n.a2 * n.u2 == n.g


# ----------------------------------------------------------------------------
# Constellation
# ----------------------------------------------------------------------------

def test_constellation_membership_and_energy():
    cons = Constellation(2)
    assert cons.symbols == (-2, -1, 0, 1, 2)
    assert cons.size == 5
    assert cons.avg_energy == pytest.approx(np.mean(np.square(cons.symbols)))
    assert 2 in cons and -2 in cons
    assert 3 not in cons and 1.5 not in cons and "x" not in cons


def test_constellation_rejects_non_positive():
    with pytest.raises(InvalidInputError):
        Constellation(0)


# ----------------------------------------------------------------------------
# solution_family
# ----------------------------------------------------------------------------

def test_solution_family_golden_symbols():
    c = EquationCoeffs(2, -1, 1, 1, 1)
    assert solution_family(c, -7, -5) == (-2, 3)


def test_solution_family_zero():
    assert solution_family(extended_gcd(3, 5), 0, 0) == (0, 0)


def test_solution_family_substitution(rng):
    c = extended_gcd(4, 6)
    x1, x2 = solution_family(c, 10, 1)
    assert 4 * x1 + 6 * x2 == 10

    for _ in range(2000):
        a1, a2 = (int(v) for v in rng.integers(-20, 21, size=2))
        if a1 == 0 and a2 == 0:
            continue
        c = extended_gcd(a1, a2)
        lam = c.g * int(rng.integers(-50, 51))
        k = int(rng.integers(-50, 51))
        x1, x2 = solution_family(c, lam, k)
        assert a1 * x1 + a2 * x2 == lam


def test_solution_family_requires_divisibility():
    with pytest.raises(NoSolutionError):
        solution_family(extended_gcd(4, 6), 3, 0)
    with pytest.raises(NoSolutionError):
        feasible_k_range(extended_gcd(4, 6), 3, Constellation(3))


def test_solution_family_is_complete():
    for s_m in range(1, 6):
        cons = Constellation(s_m)
        for a1 in range(-5, 6):
            for a2 in range(-5, 6):
                if a1 == 0 and a2 == 0:
                    continue
                c = extended_gcd(a1, a2)
                for x1 in cons.symbols:
                    for x2 in cons.symbols:
                        lam = a1 * x1 + a2 * x2
                        family = {solution_family(c, lam, k) for k in feasible_k_range(c, lam, cons)}
                        assert (x1, x2) in family


# ----------------------------------------------------------------------------
# feasible_k_range
# ----------------------------------------------------------------------------

def test_feasible_k_range_contains_golden_k():
    c = EquationCoeffs(2, -1, 1, 1, 1)
    assert -5 in feasible_k_range(c, -7, Constellation(5))


def test_feasible_k_range_ternary_zero():
    c = extended_gcd(1, 1)
    cons = Constellation(1)
    solutions = sorted(solution_family(c, 0, k) for k in feasible_k_range(c, 0, cons))
    assert solutions == [(-1, 1), (0, 0), (1, -1)]


def test_feasible_k_range_corner_is_unique():
    cons = Constellation(4)
    c = extended_gcd(3, 2)
    ks = feasible_k_range(c, 3 * 4 + 2 * 4, cons)
    assert len(ks) == 1
    assert solution_family(c, 20, ks[0]) == (4, 4)


def test_feasible_k_range_empty_outside_alphabet():
    c = extended_gcd(1, 1)
    assert len(feasible_k_range(c, 7, Constellation(2))) == 0


def test_feasible_k_range_matches_scan():
    for s_m in (1, 2, 5):
        cons = Constellation(s_m)
        for a1 in range(-6, 7):
            for a2 in range(-6, 7):
                if a1 == 0 and a2 == 0:
                    continue
                c = extended_gcd(a1, a2)
                bound = (abs(a1) + abs(a2)) * s_m
                for lam in range(-bound - 2, bound + 3):
                    if lam % c.g:
                        continue
                    assert list(feasible_k_range(c, lam, cons)) == scan_k(c, lam, cons)


# ----------------------------------------------------------------------------
# lambda_alphabet
# ----------------------------------------------------------------------------

def test_lambda_alphabet_examples():
    assert lambda_alphabet(extended_gcd(1, 0), Constellation(2)) == [-2, -1, 0, 1, 2]
    assert lambda_alphabet(extended_gcd(1, 1), Constellation(1)) == [-2, -1, 0, 1, 2]

    values = lambda_alphabet(extended_gcd(2, -1), Constellation(5))
    assert -7 in values
    assert min(values) >= -15 and max(values) <= 15


def test_lambda_alphabet_exhaustive():
    for s_m in (1, 3):
        cons = Constellation(s_m)
        for a1 in range(-4, 5):
            for a2 in range(-4, 5):
                if a1 == 0 and a2 == 0:
                    continue
                c = extended_gcd(a1, a2)
                expected = sorted({a1 * x1 + a2 * x2 for x1 in cons.symbols for x2 in cons.symbols})
                values = lambda_alphabet(c, cons)
                assert values == expected
                assert len(values) <= cons.size ** 2
                assert all(v % c.g == 0 for v in values)
