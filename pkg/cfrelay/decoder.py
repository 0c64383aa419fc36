"""
Recovering the equation value lambda = a1 x1 + a2 x2 from y = h1 x1 + h2 x2 + z.

Substituting the Diophantine solution family into y gives

    y - h1 x1 - h2 x2 = y - beta*lambda + k*alpha
    beta  = (h1 u1 + h2 u2) / g
    alpha = (h2 a1 - h1 a2) / g

so every hypothesis is a pair (lambda, k) with k restricted to the values
keeping both symbols inside the constellation. The exact ML decoder sums the
Gaussian likelihood over k; the IDA decoder keeps only the best (lambda, k).
Both search the finite feasible set exhaustively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cfrelay import config
from cfrelay.diophantine import (
    Constellation,
    EquationCoeffs,
    extended_gcd,
    feasible_k_range,
    lambda_alphabet,
)
from cfrelay.errors import InvalidInputError, NumericalError
from cfrelay.lattice_core import ChannelState, best_coefficients


@dataclass(frozen=True, eq=False)
class DecoderSetup:
    """Everything the relay derives before seeing y."""

    ch: ChannelState
    coeffs: EquationCoeffs
    cons: Constellation
    alpha: float
    beta: float
    xi: tuple[float, float]

    @classmethod
    def create(cls, ch: ChannelState, coeffs: EquationCoeffs, cons: Constellation) -> "DecoderSetup":
        if ch.dimension != 2:
            raise InvalidInputError(f"decoding handles two sources, channel has {ch.dimension}")
        h1, h2 = (float(v) for v in ch.h)
        c = coeffs
        return cls(
            ch=ch,
            coeffs=c,
            cons=cons,
            alpha=(h2 * c.a1 - h1 * c.a2) / c.g,
            beta=(h1 * c.u1 + h2 * c.u2) / c.g,
            xi=(h1 - c.a1, h2 - c.a2),
        )

    @property
    def alpha_prime(self) -> float:
        if self.beta == 0:
            raise NumericalError("beta is zero, the normalized IDA form is undefined")
        return self.alpha / self.beta

    def y_prime(self, y: float) -> float:
        if self.beta == 0:
            raise NumericalError("beta is zero, the normalized IDA form is undefined")
        return y / self.beta

    @cached_property
    def hypotheses(self) -> "_Hypotheses":
        return _Hypotheses.build(self)


@dataclass(frozen=True, eq=False)
class _Hypotheses:
    """Feasible (lambda, k) pairs grouped by lambda, with their noiseless outputs."""

    alphabet: np.ndarray  # ascending lambda values
    starts: np.ndarray  # first pair index of each lambda
    lam: np.ndarray
    k: np.ndarray
    center: np.ndarray  # beta*lambda - k*alpha = h1 x1 + h2 x2

    @classmethod
    def build(cls, setup: DecoderSetup) -> "_Hypotheses":
        alphabet = lambda_alphabet(setup.coeffs, setup.cons)
        lam_parts, k_parts, starts = [], [], []
        count = 0
        for lam in alphabet:
            ks = feasible_k_range(setup.coeffs, lam, setup.cons)
            starts.append(count)
            count += len(ks)
            k_parts.append(np.arange(ks.start, ks.stop, dtype=np.int64))
            lam_parts.append(np.full(len(ks), lam, dtype=np.int64))
        lam_arr = np.concatenate(lam_parts)
        k_arr = np.concatenate(k_parts)
        return cls(
            alphabet=np.asarray(alphabet, dtype=np.int64),
            starts=np.asarray(starts, dtype=np.int64),
            lam=lam_arr,
            k=k_arr,
            center=setup.beta * lam_arr - k_arr * setup.alpha,
        )


@dataclass(frozen=True)
class DecodeResult:
    lambda_hat: int
    metric: float
    k_hat: int
    ambiguous: bool
    runner_up_gap: float


def _check_noise(setup: DecoderSetup):
    if not setup.ch.noise_variance > 0:
        raise InvalidInputError("noise variance must be positive")


def _exponents(setup: DecoderSetup, y: float) -> np.ndarray:
    hyp = setup.hypotheses
    return -((y - hyp.center) ** 2) / (2.0 * setup.ch.noise_variance)


def likelihood_profile(setup: DecoderSetup, y: float) -> list[tuple[int, float]]:
    """Unnormalized p(y | lambda) for every lambda, summed over feasible k."""
    _check_noise(setup)
    hyp = setup.hypotheses
    scores = np.add.reduceat(np.exp(_exponents(setup, y)), hyp.starts)
    return list(zip(hyp.alphabet.tolist(), scores.tolist()))


def _log_profile(setup: DecoderSetup, y: float) -> np.ndarray:
    hyp = setup.hypotheses
    exponents = _exponents(setup, y)
    peaks = np.maximum.reduceat(exponents, hyp.starts)
    spread = np.repeat(peaks, np.diff(np.append(hyp.starts, exponents.size)))
    return peaks + np.log(np.add.reduceat(np.exp(exponents - spread), hyp.starts))


def ida_profile(setup: DecoderSetup, y: float) -> list[tuple[int, float]]:
    """Best achievable |y - beta*lambda + k*alpha| for every lambda."""
    hyp = setup.hypotheses
    metrics = np.minimum.reduceat(np.abs(y - hyp.center), hyp.starts)
    return list(zip(hyp.alphabet.tolist(), metrics.tolist()))


def _best_k(setup: DecoderSetup, y: float, index: int) -> tuple[int, float]:
    hyp = setup.hypotheses
    start = hyp.starts[index]
    stop = hyp.starts[index + 1] if index + 1 < hyp.starts.size else hyp.k.size
    metrics = np.abs(y - hyp.center[start:stop])
    ks = hyp.k[start:stop]
    tied = np.flatnonzero(metrics <= metrics.min() + config.IDA_TIE_ATOL)
    pick = min(tied, key=lambda i: (abs(int(ks[i])), int(ks[i])))
    return int(ks[pick]), float(metrics[pick])


def _tie_key(lam):
    return abs(int(lam)), int(lam)


def decode_ml(setup: DecoderSetup, y: float) -> DecodeResult:
    """Exact maximum likelihood estimate of lambda."""
    _check_noise(setup)
    hyp = setup.hypotheses
    log_scores = _log_profile(setup, y)
    top = log_scores.max()

    # 1 - score/top < ML_TIE_RTOL, computed in the log domain
    tied = np.flatnonzero(-np.expm1(log_scores - top) < config.ML_TIE_RTOL)
    index = min(tied, key=lambda i: _tie_key(hyp.alphabet[i]))
    others = np.delete(log_scores, index)

    gap = math.inf if others.size == 0 else max(0.0, float(log_scores[index] - others.max()))
    ambiguous = bool(tied.size > 1)
    k_hat, metric = _best_k(setup, y, index)
    return DecodeResult(
        lambda_hat=int(hyp.alphabet[index]),
        metric=metric,
        k_hat=k_hat,
        ambiguous=ambiguous,
        runner_up_gap=gap,
    )


def decode_ida(setup: DecoderSetup, y: float) -> DecodeResult:
    """The (lambda, k) pair minimizing |y - beta*lambda + k*alpha| over the feasible set."""
    _check_noise(setup)
    hyp = setup.hypotheses
    metrics = np.abs(y - hyp.center)
    best = metrics.min()

    tied = np.flatnonzero(metrics <= best + config.IDA_TIE_ATOL)
    pick = min(tied, key=lambda i: (*_tie_key(hyp.lam[i]), abs(int(hyp.k[i])), int(hyp.k[i])))
    lam_hat = int(hyp.lam[pick])

    rivals = metrics[hyp.lam != lam_hat]
    gap = math.inf if rivals.size == 0 else max(0.0, float(rivals.min() - metrics[pick]))
    return DecodeResult(
        lambda_hat=lam_hat,
        metric=float(metrics[pick]),
        k_hat=int(hyp.k[pick]),
        ambiguous=bool(gap < config.IDA_TIE_ATOL),
        runner_up_gap=gap,
    )


def decode_joint(setup: DecoderSetup, y: float) -> tuple[int, int]:
    """Decode both symbols: argmin of (y - h1 x1 - h2 x2)^2 over S x S."""
    _check_noise(setup)
    h1, h2 = (float(v) for v in setup.ch.h)
    s = np.arange(-setup.cons.s_m, setup.cons.s_m + 1)
    # Row-major over (x1, x2), so argmin returns the lexicographically first minimizer
    residual = (y - np.add.outer(h1 * s, h2 * s)) ** 2
    i, j = np.unravel_index(int(np.argmin(residual)), residual.shape)
    return int(s[i]), int(s[j])


def normalized_metric(setup: DecoderSetup, y: float, lam: int, k: int) -> float:
    """F(k, lambda) = |k alpha' - lambda + y'|."""
    return abs(k * setup.alpha_prime - lam + setup.y_prime(y))


def best_approximations(setup: DecoderSetup, y: float) -> list[tuple[int, int, float]]:
    """
    Best inhomogeneous approximations (k, lambda, F) in order of growing |k|.

    A feasible pair is kept when its F value beats every pair with a smaller
    or equal |k|. F is the unnormalized metric divided by |beta|, so the last
    record is the IDA decision up to ties.
    """
    hyp = setup.hypotheses
    if setup.beta == 0:
        raise NumericalError("beta is zero, the normalized IDA form is undefined")
    scores = np.abs(y - hyp.center) / abs(setup.beta)
    order = np.lexsort((hyp.lam, hyp.k, np.abs(hyp.k)))

    records = []
    best = math.inf
    i = 0
    while i < order.size:
        # all pairs sharing the same |k| compete together
        level = abs(int(hyp.k[order[i]]))
        j = i
        while j < order.size and abs(int(hyp.k[order[j]])) == level:
            j += 1
        group = order[i:j]
        winner = group[int(np.argmin(scores[group]))]
        if scores[winner] < best:
            best = float(scores[winner])
            records.append((int(hyp.k[winner]), int(hyp.lam[winner]), best))
        i = j
    return records


def setup_for_channel(ch: ChannelState, cons: Constellation) -> DecoderSetup:
    """The relay procedure: best coefficients, then a Bezout pair, then alpha and beta."""
    choice = best_coefficients(ch)
    a1, a2 = choice.a
    return DecoderSetup.create(ch, extended_gcd(a1, a2), cons)
