import math

import numpy as np
import pytest

from cfrelay.errors import InvalidInputError, NumericalError
from cfrelay.lattice_core import (
    ChannelState,
    GramLattice,
    best_coefficients,
    build_gram,
    canonical_sign,
    clamped_rate,
    computation_rate,
    shortest_vector,
)

from tests.conftest import GOLDEN_CHANNEL, GOLDEN_SNR


def brute_force_minimum(g, bound):
    """Smallest a^T G a over the box [-bound, bound]^N without the origin."""
    n = g.shape[0]
    axes = [np.arange(-bound, bound + 1)] * n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    grid = grid[np.any(grid != 0, axis=1)].astype(float)
    forms = np.einsum("ij,jk,ik->i", grid, g, grid)
    best = int(np.argmin(forms))
    return forms[best], grid[best].astype(int)


def exact_box_bound(g):
    """Every vector beating the best unit vector lies in this box."""
    return int(math.ceil(math.sqrt(np.min(np.diag(g)) / np.linalg.eigvalsh(g)[0])))


# ----------------------------------------------------------------------------
# ChannelState / build_gram
# ----------------------------------------------------------------------------

@pytest.mark.parametrize("h, snr, noise", [
    ([1.0], 1.0, 1.0),
    ([1.0, float("inf")], 1.0, 1.0),
    ([1.0, float("nan")], 1.0, 1.0),
    ([1.0, 0.0], 0.0, 1.0),
    ([1.0, 0.0], -1.0, 1.0),
    ([1.0, 0.0], 1.0, 0.0),
])
def test_channel_state_rejects_invalid_input(h, snr, noise):
    with pytest.raises(InvalidInputError):
        ChannelState(h, snr, noise)


def test_from_db_converts_to_linear():
    ch = ChannelState.from_db([1.0, 2.0], 40.0)
    assert ch.snr == pytest.approx(1e4, rel=1e-12)
    assert ch.noise_variance == 1.0


def test_at_snr_scales_noise_not_gram():
    ch = ChannelState.at_snr(GOLDEN_CHANNEL, 1e4)
    assert ch.snr == 1e4
    assert ch.noise_variance == pytest.approx(1e-4, rel=1e-15)
    assert np.array_equal(build_gram(ch).g_matrix, build_gram(ChannelState(GOLDEN_CHANNEL, 1e4)).g_matrix)
    with pytest.raises(InvalidInputError):
        ChannelState.at_snr(GOLDEN_CHANNEL, 0.0)


def test_gram_tends_to_identity_at_zero_snr():
    lat = build_gram(ChannelState([1.0, 0.0], 1e-12))
    assert np.allclose(lat.g_matrix, np.eye(2), atol=1e-6)


def test_gram_closed_form_for_equal_gains():
    lat = build_gram(ChannelState([1.0, 1.0], 1.0))
    expected = np.array([[2 / 3, -1 / 3], [-1 / 3, 2 / 3]])
    assert np.allclose(lat.g_matrix, expected, rtol=0, atol=1e-15)


def test_gram_golden_channel_entries():
    h1, h2 = GOLDEN_CHANNEL
    norm = h1 ** 2 + h2 ** 2
    scale = GOLDEN_SNR / (1 + GOLDEN_SNR * norm)
    lat = build_gram(ChannelState(GOLDEN_CHANNEL, GOLDEN_SNR))

    assert lat.g_matrix[0, 0] == pytest.approx(1 - 1e4 * 1.274 ** 2 / (1 + 1e4 * 1.98548), rel=1e-12)
    assert lat.g_matrix[1, 1] == pytest.approx(1 - scale * h2 ** 2, rel=1e-12)
    assert lat.g_matrix[0, 1] == pytest.approx(-scale * h1 * h2, rel=1e-12)
    assert lat.g_matrix[0, 1] == lat.g_matrix[1, 0]


def test_gram_is_symmetric_positive_definite(rng):
    for _ in range(2000):
        n = int(rng.integers(2, 5))
        ch = ChannelState(rng.standard_normal(n), 10 ** rng.uniform(-3, 5))
        g = build_gram(ch).g_matrix
        assert np.array_equal(g, g.T)
        np.linalg.cholesky(g)


@pytest.mark.slow
def test_gram_positive_definite_million_draws(rng):
    for _ in range(10 ** 6):
        ch = ChannelState(rng.standard_normal(2), 10 ** rng.uniform(-3, 5))
        np.linalg.cholesky(build_gram(ch).g_matrix)


def test_gram_lattice_rejects_bad_shapes():
    with pytest.raises(InvalidInputError):
        GramLattice(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        GramLattice(np.array([[1.0, 0.5], [0.0, 1.0]]))


# ----------------------------------------------------------------------------
# computation_rate
# ----------------------------------------------------------------------------

def test_rate_vanishes_at_zero_snr():
    assert abs(computation_rate(ChannelState([1.0, 0.0], 1e-12), [1, 0])) < 1e-6


def test_rate_equal_gains():
    assert computation_rate(ChannelState([1.0, 1.0], 1.0), [1, 1]) == pytest.approx(math.log2(1.5), rel=1e-12)


def test_rate_golden_channel_exceeds_eight_bits():
    assert computation_rate(ChannelState(GOLDEN_CHANNEL, GOLDEN_SNR), [2, -1]) > 8


def test_rate_may_be_negative_and_clamps_to_zero():
    rate = computation_rate(ChannelState([1.0, 0.0], 1.0), [3, 4])
    assert rate < 0
    assert clamped_rate(rate) == 0.0
    assert clamped_rate(1.5) == 1.5


def test_rate_rejects_zero_and_malformed_vectors():
    ch = ChannelState([1.0, 0.5], 10.0)
    with pytest.raises(InvalidInputError):
        computation_rate(ch, [0, 0])
    with pytest.raises(InvalidInputError):
        computation_rate(ch, [1, 0, 0])
    with pytest.raises(InvalidInputError):
        computation_rate(ch, [0.5, 1])


def test_rate_matches_gram_quadratic_form(rng):
    for _ in range(500):
        n = int(rng.integers(2, 4))
        ch = ChannelState(rng.standard_normal(n), 10 ** rng.uniform(-1, 4))
        a = rng.integers(-6, 7, size=n)
        if not a.any():
            continue
        expected = -math.log2(build_gram(ch).quadratic_form(a))
        assert computation_rate(ch, a) == pytest.approx(expected, rel=1e-9, abs=1e-9)


# ----------------------------------------------------------------------------
# shortest_vector / best_coefficients
# ----------------------------------------------------------------------------

def test_identity_ties_break_to_first_unit_vector():
    result = shortest_vector(GramLattice(np.eye(2)))
    assert result.a == (1, 0)
    assert result.quadratic_form == 1.0

    assert shortest_vector(GramLattice(np.eye(3))).a == (1, 0, 0)


def test_canonical_sign():
    assert canonical_sign([-2, 1]) == (2, -1)
    assert canonical_sign([0, -3, 1]) == (0, 3, -1)
    assert canonical_sign([0, 2]) == (0, 2)


def test_golden_channel_selects_two_minus_one():
    result = shortest_vector(build_gram(ChannelState(GOLDEN_CHANNEL, GOLDEN_SNR)))
    assert result.a == (2, -1)
    assert best_coefficients(ChannelState(GOLDEN_CHANNEL, GOLDEN_SNR)).a == (2, -1)


def test_non_positive_definite_raises_numerical_error():
    with pytest.raises(NumericalError):
        shortest_vector(GramLattice(np.array([[1.0, 2.0], [2.0, 1.0]])))


def test_shortest_vector_matches_brute_force_2d(rng):
    for _ in range(1000):
        ch = ChannelState(rng.standard_normal(2), 10 ** rng.uniform(0, 3))
        lat = build_gram(ch)
        result = shortest_vector(lat)
        oracle, _ = brute_force_minimum(lat.g_matrix, exact_box_bound(lat.g_matrix))

        assert result.quadratic_form == pytest.approx(oracle, rel=1e-9)
        assert result.quadratic_form == pytest.approx(lat.quadratic_form(result.a), rel=1e-9)
        assert canonical_sign(result.a) == result.a


def test_shortest_vector_matches_brute_force_3d(rng):
    for _ in range(100):
        ch = ChannelState(rng.standard_normal(3), 10 ** rng.uniform(0, 2))
        lat = build_gram(ch)
        result = shortest_vector(lat)
        oracle, _ = brute_force_minimum(lat.g_matrix, exact_box_bound(lat.g_matrix))
        assert result.quadratic_form == pytest.approx(oracle, rel=1e-9)


def test_shortest_vector_random_positive_definite_matrices(rng):
    for _ in range(200):
        basis = rng.standard_normal((2, 2))
        g = basis @ basis.T + 1e-3 * np.eye(2)
        result = shortest_vector(GramLattice(g))
        oracle, _ = brute_force_minimum(g, min(exact_box_bound(g), 50))
        assert result.quadratic_form <= oracle * (1 + 1e-9)


def test_sign_symmetry_of_quadratic_form(rng):
    lat = build_gram(ChannelState(rng.standard_normal(3), 50.0))
    for _ in range(50):
        a = rng.integers(-5, 6, size=3)
        assert lat.quadratic_form(a) == lat.quadratic_form(-a)
        assert lat.quadratic_form(canonical_sign(a)) == lat.quadratic_form(a)


def test_best_coefficients_unit_vector_channel():
    for snr in (1e-6, 1.0, 1e4):
        assert best_coefficients(ChannelState([1.0, 0.0], snr)).a == (1, 0)


def test_best_coefficients_maximizes_rate_over_box():
    ch = ChannelState([0.5, 0.5], 100.0)
    result = best_coefficients(ch)

    s = np.arange(-30, 31)
    a1, a2 = np.meshgrid(s, s, indexing="ij")
    norm = a1 ** 2 + a2 ** 2
    forms = norm - 100.0 * (0.5 * a1 + 0.5 * a2) ** 2 / (1 + 100.0 * 0.5)
    forms = np.where(norm == 0, np.inf, forms)
    i, j = np.unravel_index(np.argmin(forms), forms.shape)

    assert result.a == canonical_sign((int(a1[i, j]), int(a2[i, j])))
    assert result.rate_bits == pytest.approx(-math.log2(forms[i, j]), rel=1e-9)


def test_best_coefficients_unit_vector_at_vanishing_snr(rng):
    for _ in range(50):
        result = best_coefficients(ChannelState(rng.standard_normal(2), 1e-9))
        assert sorted(abs(v) for v in result.a) == [0, 1]
