"""Simulated users and server-side accounting.

A :class:`UserPool` hands out users strictly in index order, each at most
once. Every query records which users answered and how many bits each sent,
so sample complexity, communication complexity and round counts can be read
back with :meth:`UserPool.audit`.

Samples are either stored up front (``ArraySource``) or drawn lazily when a
user is first contacted (``TreeSource``, ``DistributionSource``). Lazy
sources only materialise the coordinates a query reveals, drawn from their
exact joint law, which is equivalent for single-use users and keeps
large experiments cheap.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .distributions import CategoricalDistribution, TreeModel, sample_full
from .ldp import Channel

SEQUENTIAL = "sequential"
NON_INTERACTIVE = "non_interactive"

POOL_MAGIC = b"LDPPOOL\x01"


class InsufficientUsers(RuntimeError):
    """The pool cannot supply the users a query needs."""


class ProtocolError(RuntimeError):
    """A query violates the pool's round structure."""


# ---------------------------------------------------------------------------
# sample sources


class ArraySource:
    def __init__(self, samples: np.ndarray):
        self.samples = np.asarray(samples)

    def __len__(self):
        return self.samples.shape[0]

    @property
    def d(self) -> int | None:
        return self.samples.shape[1] if self.samples.ndim == 2 else None

    def draw(self, coords, start, count, rng):
        block = self.samples[start : start + count]
        return block if coords is None else block[:, list(coords)]

    exact_marginal = None


class TreeSource:
    def __init__(self, model: TreeModel):
        self.model = model
        self._marginals: dict[tuple[int, ...], np.ndarray] = {}

    @property
    def d(self) -> int:
        return self.model.d

    def exact_marginal(self, coords) -> np.ndarray:
        key = tuple(coords)
        if key not in self._marginals:
            self._marginals[key] = self.model.marginal(key).ravel()
        return self._marginals[key]

    def draw(self, coords, start, count, rng):
        if coords is None:
            return sample_full(self.model, rng, count)
        flat = rng.choice(2 ** len(coords), size=count, p=self.exact_marginal(coords))
        return np.stack(np.unravel_index(flat, (2,) * len(coords)), axis=1).astype(np.uint8)


class DistributionSource:
    def __init__(self, dist: CategoricalDistribution):
        self.dist = dist

    d = None

    def exact_marginal(self, coords) -> np.ndarray:
        return self.dist.probs

    def draw(self, coords, start, count, rng):
        return self.dist.sample(count, rng)


# ---------------------------------------------------------------------------


@dataclass
class Segment:
    start: int
    count: int
    bits: int
    tag: str


@dataclass
class EstimateReport:
    value: float
    users_consumed: int
    max_bits_per_user: int
    rounds: int
    seed: int | None = None
    extras: dict = field(default_factory=dict)


def flatten_symbols(block: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    """Row-major index of each row of ``block`` in the product alphabet."""
    if block.ndim == 1:
        return block.astype(np.int64)
    return np.ravel_multi_index(tuple(block.T.astype(np.int64)), tuple(sizes))


class UserPool:
    """``n`` single-use users with exact accounting.

    ``rng`` supplies every user-side random draw (lazy samples and channel
    noise). ``aggregate`` lets histogram queries on lazy sources draw the
    report histogram from its exact multinomial law instead of user by user.
    """

    def __init__(
        self,
        n: int,
        source,
        mode: str = SEQUENTIAL,
        rng: np.random.Generator | None = None,
        seed: int | None = None,
        alphabet: int = 2,
        aggregate: bool | None = None,
    ):
        if n < 1:
            raise ValueError("a pool needs at least one user")
        if mode not in (SEQUENTIAL, NON_INTERACTIVE):
            raise ValueError(f"unknown mode {mode!r}")
        self.n = int(n)
        self.source = source
        self.mode = mode
        self.seed = seed
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.alphabet = alphabet
        if aggregate is None:
            aggregate = not isinstance(source, ArraySource)
        self.aggregate = aggregate
        self.cursor = 0
        self.segments: list[Segment] = []
        self.sealed = False
        self._round_open = False

    # -- bookkeeping -------------------------------------------------------

    @property
    def d(self):
        return self.source.d

    @property
    def remaining(self) -> int:
        return self.n - self.cursor

    def _take(self, count: int, bits: int, tag: str) -> int:
        if self.sealed:
            raise ProtocolError("the non-interactive round is sealed")
        if count < 1:
            raise ValueError("count must be positive")
        if count > self.remaining:
            raise InsufficientUsers(f"need {count} users, {self.remaining} left")
        if self.mode == NON_INTERACTIVE:
            self._round_open = True
        start = self.cursor
        self.cursor += count
        self.segments.append(Segment(start, count, bits, tag))
        return start

    def seal(self):
        """Close the single round of a non-interactive pool."""
        if self.mode != NON_INTERACTIVE:
            raise ProtocolError("only non-interactive pools have a sealable round")
        self.sealed = True

    @property
    def consumed(self) -> np.ndarray:
        flags = np.zeros(self.n, dtype=bool)
        flags[: self.cursor] = True
        return flags

    @property
    def bits_sent(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        for s in self.segments:
            out[s.start : s.start + s.count] += s.bits
        return out

    def audit(self, since: int = 0) -> dict:
        """Accounting summary for users with index >= ``since``."""
        segs = [s for s in self.segments if s.start >= since]
        users = sum(s.count for s in segs)
        per_tag: dict[str, dict] = {}
        for s in segs:
            t = per_tag.setdefault(s.tag, {"users": 0, "bits": 0, "queries": 0})
            t["users"] += s.count
            t["bits"] += s.count * s.bits
            t["queries"] += 1
        expected = since
        single_use = True
        for s in segs:
            single_use &= s.start == expected
            expected = s.start + s.count
        if self.mode == NON_INTERACTIVE:
            rounds = 1 if users else 0
        else:
            rounds = users
        return {
            "users_consumed": users,
            "max_bits_per_user": max((s.bits for s in segs), default=0),
            "total_bits": sum(s.count * s.bits for s in segs),
            "rounds": rounds,
            "single_use": bool(single_use),
            "per_tag": per_tag,
        }

    def report(self, value: float, since: int, seed=None, **extras) -> EstimateReport:
        a = self.audit(since)
        return EstimateReport(
            value=float(value),
            users_consumed=a["users_consumed"],
            max_bits_per_user=a["max_bits_per_user"],
            rounds=a["rounds"],
            seed=seed,
            extras={**extras, "audit": a},
        )

    # -- queries -------------------------------------------------------------

    def _check_coords(self, coords):
        d = self.source.d
        if d is None:
            raise ProtocolError("coordinate queries need vector samples")
        if len(set(coords)) != len(coords) or any(not 0 <= c < d for c in coords):
            raise ValueError(f"bad coordinates {coords}")

    def request(self, coords: Sequence[int], channel: Channel, count: int = 1, tag: str = "query"):
        """Privatised product-alphabet symbols of ``count`` fresh users.

        Each user reveals only ``coords`` (flattened row-major in the given
        order) through ``channel``.
        """
        coords = tuple(int(c) for c in coords)
        self._check_coords(coords)
        sizes = (self.alphabet,) * len(coords)
        if channel.k_in != math.prod(sizes):
            raise ValueError("channel alphabet does not match the queried coordinates")
        start = self._take(count, channel.bits, tag)
        block = self.source.draw(coords, start, count, self.rng)
        return channel.apply(flatten_symbols(block, sizes), self.rng)

    def request_pair(self, i: int, j: int, channel: Channel) -> int:
        return int(self.request((i, j), channel, 1, tag="pair")[0])

    def request_triplet(self, i: int, j: int, k: int, channel: Channel) -> int:
        return int(self.request((i, j, k), channel, 1, tag="triplet")[0])

    def request_histogram(
        self, coords: Sequence[int], channel: Channel, count: int, tag: str = "query"
    ) -> np.ndarray:
        """Histogram of ``count`` privatised reports on ``coords``."""
        coords = tuple(int(c) for c in coords)
        if self.aggregate and self.source.exact_marginal is not None:
            self._check_coords(coords)
            self._take(count, channel.bits, tag)
            law = self.source.exact_marginal(coords) @ channel.matrix()
            return self.rng.multinomial(count, law / law.sum())
        reports = self.request(coords, channel, count, tag)
        return np.bincount(reports, minlength=channel.k_out)

    def collect(
        self,
        count: int,
        respond: Callable[[np.ndarray, np.ndarray], np.ndarray],
        bits: int,
        tag: str = "collect",
    ) -> np.ndarray:
        """Send a broadcast to ``count`` fresh users and gather one reply each.

        ``respond(samples, user_index)`` runs user-side and must return one
        ``bits``-wide message per user.
        """
        start = self._take(count, bits, tag)
        samples = self.source.draw(None, start, count, self.rng)
        return np.asarray(respond(samples, np.arange(start, start + count)))


# ---------------------------------------------------------------------------
# constructors and fixtures


def pool_from_tree(
    model: TreeModel,
    n: int,
    rng: np.random.Generator,
    lazy: bool = False,
    mode: str = SEQUENTIAL,
    seed: int | None = None,
) -> UserPool:
    """``n`` users with i.i.d. samples from ``model``."""
    if n < 1:
        raise ValueError("a pool needs at least one user")
    if lazy:
        return UserPool(n, TreeSource(model), mode=mode, rng=rng, seed=seed)
    return UserPool(n, ArraySource(sample_full(model, rng, n)), mode=mode, rng=rng, seed=seed)


def pool_from_distribution(
    dist: CategoricalDistribution,
    n: int,
    rng: np.random.Generator,
    lazy: bool = True,
    mode: str = NON_INTERACTIVE,
    seed: int | None = None,
) -> UserPool:
    if n < 1:
        raise ValueError("a pool needs at least one user")
    source = DistributionSource(dist) if lazy else ArraySource(dist.sample(n, rng))
    return UserPool(n, source, mode=mode, rng=rng, seed=seed, alphabet=dist.k)


def save_pool(pool: UserPool, path) -> None:
    """Write a Boolean array-backed pool: 32-byte header then packed rows."""
    src = pool.source
    if not isinstance(src, ArraySource) or src.samples.ndim != 2:
        raise ValueError("only stored Boolean vector pools can be saved")
    bits = np.packbits(src.samples.astype(np.uint8), axis=1)
    header = POOL_MAGIC + struct.pack("<QQQ", pool.n, src.samples.shape[1], pool.seed or 0)
    Path(path).write_bytes(header + bits.tobytes())


def load_pool(path, rng: np.random.Generator | None = None, mode: str = SEQUENTIAL) -> UserPool:
    raw = Path(path).read_bytes()
    if raw[:8] != POOL_MAGIC:
        raise ValueError("not a pool file")
    n, d, seed = struct.unpack("<QQQ", raw[8:32])
    row = (d + 7) // 8
    packed = np.frombuffer(raw[32:], dtype=np.uint8)
    if packed.size != n * row:
        raise ValueError("truncated pool file")
    samples = np.unpackbits(packed.reshape(n, row), axis=1)[:, :d]
    return UserPool(n, ArraySource(samples), mode=mode, rng=rng, seed=seed)
