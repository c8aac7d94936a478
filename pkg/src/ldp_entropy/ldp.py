"""Local differential privacy primitives.

Channels are described by an analytic row-stochastic matrix ``P[x, o]`` so
that the privacy ratio can be checked exactly, and by a vectorised sampler
used by the simulated users.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _siphash
from .distributions import CategoricalDistribution


@dataclass(frozen=True)
class PrivacyBudget:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


def _alpha(budget) -> float:
    a = budget.alpha if isinstance(budget, PrivacyBudget) else float(budget)
    if not a > 0:
        raise ValueError("alpha must be positive")
    return a


def bits_for(k: int) -> int:
    """Bits needed to send one symbol out of ``k``."""
    return max(1, math.ceil(math.log2(k))) if k > 1 else 0


class Channel:
    """A user-side randomiser over the symbols ``0..k_in-1``."""

    k_in: int
    k_out: int

    @property
    def bits(self) -> int:
        return bits_for(self.k_out)

    def matrix(self) -> np.ndarray:
        raise NotImplementedError

    def apply(self, symbols: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class KRandomizedResponse(Channel):
    """Keep the symbol with probability e^a / (e^a + k - 1), otherwise report
    one of the other k - 1 symbols uniformly."""

    def __init__(self, k: int, alpha: float):
        if k < 2:
            raise ValueError("randomized response needs k >= 2")
        self.k_in = self.k_out = int(k)
        self.alpha = _alpha(alpha)
        if math.isinf(self.alpha):
            self.keep = 1.0
        else:
            ea = math.exp(self.alpha)
            self.keep = ea / (ea + k - 1)
        self.other = (1.0 - self.keep) / (k - 1)

    def matrix(self) -> np.ndarray:
        m = np.full((self.k_in, self.k_out), self.other)
        np.fill_diagonal(m, self.keep)
        return m

    def apply(self, symbols, rng):
        symbols = np.asarray(symbols, dtype=np.int64)
        if self.keep == 1.0:
            return symbols.copy()
        flip = rng.random(symbols.shape) >= self.keep
        shift = rng.integers(1, self.k_in, size=symbols.shape)
        return np.where(flip, (symbols + shift) % self.k_in, symbols)

    def invert(self, counts) -> CategoricalDistribution:
        return rr_invert_frequencies(counts, self.k_in, self.alpha)


class IdentityChannel(KRandomizedResponse):
    """No privacy: the symbol is reported as is."""

    def __init__(self, k: int):
        super().__init__(k, math.inf)


def k_randomized_response(value: int, k: int, budget, rng: np.random.Generator) -> int:
    if not 0 <= value < k:
        raise ValueError("value out of range")
    return int(KRandomizedResponse(k, _alpha(budget)).apply(np.array([value]), rng)[0])


def project_to_simplex(p: np.ndarray) -> np.ndarray:
    """Clamp negative mass to zero and renormalise."""
    q = np.clip(np.asarray(p, dtype=float), 0.0, None)
    s = q.sum()
    if s <= 0:
        return np.full(q.size, 1.0 / q.size)
    return q / s


def rr_invert_frequencies(reports, k: int, budget) -> CategoricalDistribution:
    """Unbiased inversion of k-ary randomized response on a report histogram,
    followed by projection onto the simplex."""
    counts = np.asarray(reports, dtype=float).ravel()
    if counts.size != k:
        raise ValueError("histogram length must equal k")
    n = counts.sum()
    if n < 1:
        raise ValueError("need at least one report")
    freq = counts / n
    ch = KRandomizedResponse(k, _alpha(budget))
    raw = (freq - ch.other) / (ch.keep - ch.other)
    return CategoricalDistribution(project_to_simplex(raw))


def verify_ldp_ratio(mechanism) -> float:
    """max over outputs o and inputs x, x' of P(o | x) / P(o | x').

    Accepts a ``Channel`` or a row-stochastic matrix. Returns ``inf`` when some
    output is possible under one input and impossible under another.
    """
    m = mechanism.matrix() if hasattr(mechanism, "matrix") else np.asarray(mechanism, float)
    hi = m.max(axis=0)
    lo = m.min(axis=0)
    live = hi > 0
    if np.any(lo[live] == 0):
        return math.inf
    return float(np.max(hi[live] / lo[live]))


# ---------------------------------------------------------------------------
# Salted hash channel


def hash_lambda(b: int, alpha: float) -> float:
    """Retention probability (e^a - 1) / (2^b + e^a - 1)."""
    if math.isinf(alpha):
        return 1.0
    ea = math.exp(alpha)
    return (ea - 1.0) / (2**b + ea - 1.0)


@dataclass(frozen=True)
class HashChannelParams:
    b: int
    alpha: float
    hash_seed: int

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("b must be a positive integer")
        _alpha(self.alpha)

    @property
    def lam(self) -> float:
        return hash_lambda(self.b, self.alpha)

    @property
    def key(self) -> tuple[int, int]:
        k0, k1 = np.random.SeedSequence(self.hash_seed).generate_state(2, dtype=np.uint64)
        return int(k0), int(k1)


class LambdaResponse(Channel):
    """Keep the b-bit value with probability lam, else redraw it uniformly
    from all 2^b values."""

    def __init__(self, b: int, lam: float):
        self.b = int(b)
        self.lam = float(lam)
        self.k_in = self.k_out = 2**self.b

    @property
    def bits(self) -> int:
        return self.b

    def matrix(self) -> np.ndarray:
        k = self.k_in
        m = np.full((k, k), (1.0 - self.lam) / k)
        m[np.diag_indices(k)] += self.lam
        return m

    def apply(self, symbols, rng):
        symbols = np.asarray(symbols, dtype=np.int64)
        if self.lam == 1.0:
            return symbols.copy()
        keep = rng.random(symbols.shape) < self.lam
        noise = rng.integers(0, self.k_in, size=symbols.shape)
        return np.where(keep, symbols, noise)


def hash_channel(params: HashChannelParams) -> LambdaResponse:
    return LambdaResponse(params.b, params.lam)


def encode_pair(x: bytes, y: bytes) -> bytes:
    """Unambiguous <x, y>: 8-byte little-endian length of x, x, then y."""
    return len(x).to_bytes(8, "little") + x + y


def int_bytes(v: int) -> bytes:
    return int(v).to_bytes(8, "little", signed=False)


def keyed_hash(params: HashChannelParams, q: int, sample: bytes) -> int:
    """b-bit salted hash h(<q, sample>)."""
    k0, k1 = params.key
    h = _siphash.siphash24(k0, k1, encode_pair(int_bytes(q), sample))
    return h & ((1 << params.b) - 1)


def keyed_hash_ints(params: HashChannelParams, q, samples) -> np.ndarray:
    """Vectorised ``keyed_hash`` for nonnegative integer samples."""
    k0, k1 = params.key
    h = _siphash.siphash24_words(k0, k1, np.uint64(8), q, samples)
    return (h & np.uint64((1 << params.b) - 1)).astype(np.int64)


def hash_response(
    sample: bytes, q: int, params: HashChannelParams, rng: np.random.Generator
) -> int:
    """One user's privatised b-bit report for pair index ``q``."""
    v = keyed_hash(params, q, sample)
    return int(hash_channel(params).apply(np.array([v]), rng)[0])
