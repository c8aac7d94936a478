"""Non-interactive Gini and collision entropy estimation from salted hashes.

Users are paired; each hashes its sample salted with its pair index down to
``b`` bits, randomises the hash, and sends it. The server only counts pairs
whose two reports agree and removes the bias introduced by hashing and
randomisation. The line-10 quantity estimates the collision probability
Pr[X = X'], so the Gini estimate is its complement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ldp import HashChannelParams, bits_for, hash_channel, keyed_hash, keyed_hash_ints
from .protocol import NON_INTERACTIVE, EstimateReport, ProtocolError


@dataclass(frozen=True)
class PairingPlan:
    pairs: np.ndarray  # (m, 2) user offsets
    q: np.ndarray  # pair index per paired user offset, -1 when unpaired

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "PairingPlan":
        m = n // 2
        perm = rng.permutation(n)[: 2 * m]
        pairs = perm.reshape(m, 2)
        q = np.full(n, -1, dtype=np.int64)
        q[pairs[:, 0]] = np.arange(m)
        q[pairs[:, 1]] = np.arange(m)
        return cls(pairs=pairs, q=q)


@dataclass(frozen=True)
class CollisionTally:
    m: int
    collisions: int

    @property
    def c_bar(self) -> float:
        return self.collisions / self.m

    @classmethod
    def from_reports(cls, reports: np.ndarray, pairs: np.ndarray) -> "CollisionTally":
        hits = int(np.count_nonzero(reports[pairs[:, 0]] == reports[pairs[:, 1]]))
        return cls(m=len(pairs), collisions=hits)


def expected_collision_rate(g_bar: float, b: int, lam: float) -> float:
    """E[c_q] = lam^2 (1 - 2^-b) g_bar + 2^-b."""
    return lam**2 * (1 - 2.0**-b) * g_bar + 2.0**-b


def collision_prob_from_rate(c_bar: float, b: int, lam: float) -> float:
    """Bias-corrected collision probability (2^b c - 1) / (lam^2 (2^b - 1))."""
    return (2**b * c_bar - 1) / (lam**2 * (2**b - 1))


def bias_correction_roundtrip(g_bar: float, b: int, lam: float) -> float:
    return collision_prob_from_rate(expected_collision_rate(g_bar, b, lam), b, lam)


def entropies_from_collision_prob(cp: float) -> tuple[float, float, str | None]:
    """(gini, collision entropy, saturation flag) from a collision probability."""
    gini = 1.0 - cp
    if cp <= 0:
        return gini, math.inf, "nonpositive_collision_prob"
    if cp >= 1:
        return gini, 0.0, "collision_prob_at_least_one"
    return gini, float(-math.log2(cp)), None


def _user_hashes(params: HashChannelParams, q: np.ndarray, samples) -> np.ndarray:
    samples = np.asarray(samples)
    if samples.dtype.kind in "iu":
        return keyed_hash_ints(params, q.astype(np.uint64), samples.astype(np.uint64))
    return np.array([keyed_hash(params, int(qi), bytes(s)) for qi, s in zip(q, samples)])


def run_gini_collision(pool, b: int, alpha: float, hash_seed: int, rng: np.random.Generator, seed=None) -> EstimateReport:
    """One concurrent round over every remaining user of a non-interactive pool."""
    if pool.mode != NON_INTERACTIVE:
        raise ProtocolError("the hash protocol runs in a single non-interactive round")
    if pool.sealed:
        raise ProtocolError("the non-interactive round is sealed")
    n = pool.remaining
    if n < 2:
        raise ValueError("need at least two users")
    since = pool.cursor
    params = HashChannelParams(b, alpha, hash_seed)
    lam = params.lam
    channel = hash_channel(params)
    plan = PairingPlan.random(2 * (n // 2), rng)

    def respond(samples, user_index):
        q = plan.q[user_index - since]
        return channel.apply(_user_hashes(params, q, samples), pool.rng)

    reports = pool.collect(2 * (n // 2), respond, bits=b, tag="hash")
    pool.seal()
    tally = CollisionTally.from_reports(reports, plan.pairs)
    cp = collision_prob_from_rate(tally.c_bar, b, lam)
    gini, c_hat, flag = entropies_from_collision_prob(cp)
    return pool.report(
        gini,
        since,
        seed=seed,
        n=2 * tally.m,
        b=b,
        alpha=alpha,
        lam=lam,
        c_bar=tally.c_bar,
        collisions=tally.collisions,
        collision_prob_hat=cp,
        gini_hat=gini,
        C_hat=c_hat,
        saturated=flag,
        bits_total=b * 2 * tally.m,
        server_state_bits=bits_for(tally.m + 1),
    )


def skorski_baseline(pool, k: int, rng: np.random.Generator | None = None, seed=None) -> EstimateReport:
    """Non-private collision counting over disjoint pairs of raw samples."""
    n = pool.remaining
    if n < 2:
        raise ValueError("need at least two users")
    since = pool.cursor
    width = bits_for(k)
    plan = PairingPlan.random(2 * (n // 2), rng if rng is not None else np.random.default_rng(seed))
    reports = pool.collect(2 * (n // 2), lambda s, idx: np.asarray(s), bits=width, tag="raw")
    if pool.mode == NON_INTERACTIVE:
        pool.seal()
    tally = CollisionTally.from_reports(reports, plan.pairs)
    cp = tally.c_bar
    _, c_hat, flag = entropies_from_collision_prob(cp)
    return pool.report(
        c_hat,
        since,
        seed=seed,
        n=2 * tally.m,
        c_bar=cp,
        collision_prob_hat=cp,
        C_hat=c_hat,
        saturated=flag,
        bits_total=width * 2 * tally.m,
    )
