"""
Coefficient selection for compute-and-forward.

The relay picks the integer vector a maximizing the computation rate

    R(h, a) = log2( 1 / (|a|^2 - SNR (h.a)^2 / (1 + SNR |h|^2)) )

which is the same as minimizing a^T G a over nonzero integer vectors, with

    G = I - SNR / (1 + SNR |h|^2) * h h^T.

G is positive definite, so this is a shortest vector problem for the lattice
whose Gram matrix is G. It is solved exactly by Fincke-Pohst enumeration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from cfrelay import config
from cfrelay.errors import InvalidInputError, NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChannelState:
    """Real channel gains seen by the relay, with the SNR and noise variance."""

    h: np.ndarray
    snr: float
    noise_variance: float = 1.0

    def __post_init__(self):
        try:
            h = np.array(self.h, dtype=float).reshape(-1)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"channel gains must be real numbers: {self.h!r}") from exc
        if h.size < 2:
            raise InvalidInputError(f"need at least 2 channel gains, got {h.size}")
        if not np.all(np.isfinite(h)):
            raise InvalidInputError(f"channel gains must be finite: {h.tolist()}")
        if not (math.isfinite(self.snr) and self.snr > 0):
            raise InvalidInputError(f"snr must be a finite positive ratio, got {self.snr}")
        if not (math.isfinite(self.noise_variance) and self.noise_variance > 0):
            raise InvalidInputError(f"noise variance must be positive, got {self.noise_variance}")

        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "snr", float(self.snr))
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @classmethod
    def from_db(cls, h, snr_db: float, noise_variance: float = 1.0) -> "ChannelState":
        return cls(h, 10.0 ** (snr_db / 10.0), noise_variance)

    @classmethod
    def at_snr(cls, h, snr: float) -> "ChannelState":
        """
        Channel for unit-spaced integer symbols at this SNR.

        The received signal is y = sqrt(SNR) h.x + z with z ~ N(0, 1); dividing
        by sqrt(SNR) leaves the symbols on the integer grid and the noise at
        variance 1/SNR. The Gram matrix takes SNR unchanged.
        """
        if not (math.isfinite(snr) and snr > 0):
            raise InvalidInputError(f"snr must be a finite positive ratio, got {snr}")
        return cls(h, snr, 1.0 / snr)

    @property
    def dimension(self) -> int:
        return self.h.size


@dataclass(frozen=True, eq=False)
class GramLattice:
    """Gram matrix of the lattice whose shortest vector is the best coefficient vector."""

    g_matrix: np.ndarray
    dimension: int = field(init=False)

    def __post_init__(self):
        g = np.array(self.g_matrix, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidInputError(f"Gram matrix must be square, got shape {g.shape}")
        scale = max(float(np.max(np.abs(g))), 1.0)
        if not np.allclose(g, g.T, rtol=0.0, atol=config.GRAM_SYMMETRY_RTOL * scale):
            raise InvalidInputError("Gram matrix is not symmetric")

        g.setflags(write=False)
        object.__setattr__(self, "g_matrix", g)
        object.__setattr__(self, "dimension", g.shape[0])

    def quadratic_form(self, a) -> float:
        vec = np.asarray(a, dtype=float)
        return float(vec @ self.g_matrix @ vec)


@dataclass(frozen=True)
class CoeffResult:
    """Chosen coefficient vector with its quadratic form a^T G a and rate in bits."""

    a: tuple[int, ...]
    quadratic_form: float
    rate_bits: float


def build_gram(ch: ChannelState) -> GramLattice:
    """G = I - snr / (1 + snr |h|^2) h h^T."""
    h = ch.h
    scale = ch.snr / (1.0 + ch.snr * float(h @ h))
    return GramLattice(np.eye(h.size) - scale * np.outer(h, h))


def _as_coefficients(a, dimension: int) -> np.ndarray:
    vec = np.asarray(a)
    if vec.shape != (dimension,):
        raise InvalidInputError(f"coefficient vector must have length {dimension}, got {vec.shape}")
    if not np.all(np.equal(np.mod(vec, 1), 0)):
        raise InvalidInputError(f"coefficients must be integers: {vec.tolist()}")
    if not np.any(vec):
        raise InvalidInputError("coefficient vector must be nonzero")
    return vec.astype(np.int64)


def computation_rate(ch: ChannelState, a: Sequence[int]) -> float:
    """Raw computation rate in bits; negative when a^T G a > 1."""
    vec = _as_coefficients(a, ch.dimension).astype(float)
    h = ch.h
    form = float(vec @ vec) - ch.snr * float(h @ vec) ** 2 / (1.0 + ch.snr * float(h @ h))
    if form <= 0:
        raise NumericalError(f"quadratic form is not positive ({form}) for a={vec.tolist()}")
    return -math.log2(form)


def clamped_rate(rate_bits: float) -> float:
    """Achievable rate for reporting: negative rates mean nothing is achievable."""
    return max(0.0, rate_bits)


def canonical_sign(a: Sequence[int]) -> tuple[int, ...]:
    """Flip a so that its first nonzero component is positive."""
    vec = tuple(int(v) for v in a)
    for v in vec:
        if v:
            return vec if v > 0 else tuple(-x for x in vec)
    return vec


def shortest_vector(lat: GramLattice) -> CoeffResult:
    """
    Nonzero integer vector minimizing a^T G a (Fincke-Pohst enumeration).

    Each level visits integers outward from its center, so a level stops at
    the first value outside the radius. The search starts with radius
    min_i G_ii, so the best unit vector is always inside it, and shrinks the
    radius to the best form found so far.

    Forms tied within SVP_TIE_RTOL resolve to the lexicographically GREATEST
    sign-canonical vector, so G = I gives [1, 0] and not [0, 1].
    """
    g = lat.g_matrix
    n = lat.dimension
    try:
        upper = np.linalg.cholesky(g).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Gram matrix is not numerically positive definite") from exc

    pivots = np.diag(upper)
    diag = pivots ** 2
    mu = upper / pivots[:, None]

    tie = config.SVP_TIE_RTOL
    best = float(np.min(np.diag(g)))
    bound = best * (1.0 + tie)
    coords = np.zeros(n, dtype=np.int64)
    candidates: dict[tuple[int, ...], float] = {}

    def zigzag(center):
        """Integers in order of distance from center."""
        nearest = round(center)
        yield nearest
        step = 1 if center >= nearest else -1
        offset = 1
        while True:
            yield nearest + step * offset
            yield nearest - step * offset
            offset += 1

    def descend(level, partial):
        nonlocal best, bound
        center = -float(mu[level, level + 1:] @ coords[level + 1:])
        for value in zigzag(center):
            total = partial + diag[level] * (value - center) ** 2
            if total > bound * (1.0 + 1e-9):
                break
            coords[level] = value
            if level > 0:
                descend(level - 1, total)
                continue
            if not coords.any():
                continue
            form = lat.quadratic_form(coords)
            if form > bound:
                continue
            candidates[canonical_sign(coords)] = form
            if form < best:
                best = form
                bound = best * (1.0 + tie)
        coords[level] = 0

    descend(n - 1, 0.0)

    tied = [vec for vec, form in candidates.items() if form <= bound]
    if not tied:
        raise NumericalError("enumeration found no nonzero lattice vector")
    a = max(tied)
    logger.debug("shortest vector %s from %d candidates (%d tied)", a, len(candidates), len(tied))

    form = candidates[a]
    return CoeffResult(a=a, quadratic_form=form, rate_bits=-math.log2(form))


def best_coefficients(ch: ChannelState) -> CoeffResult:
    """Rate-maximizing coefficient vector for the channel."""
    result = shortest_vector(build_gram(ch))
    return CoeffResult(
        a=result.a,
        quadratic_form=result.quadratic_form,
        rate_bits=computation_rate(ch, result.a),
    )
