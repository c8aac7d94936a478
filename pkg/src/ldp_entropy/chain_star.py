"""Shannon entropy of chain- and star-structured distributions.

Chains are recovered by inserting variables one at a time. A conditional
mutual information near zero identifies the conditioning variable as lying
between the other two, so each insertion is decided by head/tail tests or by
a bisection over the current chain. Stars are recovered by one Prim step
followed by comparing two mutual-information sums. Both finish with the
plug-in of marginal entropies minus edge mutual informations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .plugin import (
    SAMPLE_CONSTANT,
    good_cmi_estimate,
    good_entropy_estimate,
    good_mi_estimate,
    good_spec,
)
from .protocol import EstimateReport


class ChainAssumptionViolated(RuntimeError):
    """No seed triplet shows the conditional dependence a chain requires."""


@dataclass(frozen=True)
class CmiTestConfig:
    epsilon: float
    alpha: float
    delta: float
    K: float = SAMPLE_CONSTANT

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass
class ChainOrder:
    order: list[int]
    tests: list = field(default_factory=list)

    def __len__(self):
        return len(self.order)


def per_test_delta(delta: float, d: int, c0: float = 3.0) -> float:
    """Per-test confidence so a union bound covers all O(d log d) tests."""
    return delta / (c0 * d * max(1.0, math.log2(d)))


class _PrivateCmi:
    def __init__(self, pool, cfg: CmiTestConfig, d: int):
        self.pool = pool
        self.spec = good_spec(cfg.alpha, min(cfg.epsilon, 0.5), per_test_delta(cfg.delta, d), 3, K=cfg.K)

    def __call__(self, i, j, k) -> float:
        return good_cmi_estimate(self.pool, (i, j, k), self.spec)


def cmi_exceeds(pool, i: int, j: int, k: int, cfg: CmiTestConfig, d: int | None = None) -> bool:
    """True when the private estimate of I(X_i; X_j | X_k) exceeds epsilon."""
    if len({i, j, k}) != 3:
        raise ValueError("indices must be distinct")
    d = d if d is not None else pool.d
    return _PrivateCmi(pool, cfg, d)(i, j, k) > cfg.epsilon


def _run_test(cmi, chain: ChainOrder, i, j, k, epsilon) -> float:
    v = float(cmi(i, j, k))
    chain.tests.append((i, j, k, v, v > epsilon))
    return v


def ternary_search(chain: ChainOrder, lo: int, hi: int, j: int, cmi, epsilon: float) -> int:
    """Position ``l`` such that ``j`` belongs between ``order[l]`` and ``order[l+1]``.

    Requires ``j`` to lie strictly between ``order[lo]`` and ``order[hi]``.
    """
    while lo < hi - 1:
        mid = (lo + hi + 1) // 2
        v = _run_test(cmi, chain, chain.order[lo], chain.order[mid], j, epsilon)
        if v <= epsilon:
            hi = mid
        else:
            lo = mid
    return lo


def recover_chain(d: int, cmi: Callable[[int, int, int], float], epsilon: float, insert_order=None) -> ChainOrder:
    """Chain order (up to reversal) from a CMI oracle ``cmi(i, j, k)``."""
    if d < 3:
        raise ValueError("chain recovery needs d >= 3")
    items = list(range(d)) if insert_order is None else [int(x) for x in insert_order]
    i, j, k = items[:3]
    chain = ChainOrder(order=[])
    seeds = [
        (_run_test(cmi, chain, i, j, k, epsilon), (i, k, j)),
        (_run_test(cmi, chain, i, k, j, epsilon), (i, j, k)),
        (_run_test(cmi, chain, k, j, i, epsilon), (j, i, k)),
    ]
    if not any(v > epsilon for v, _ in seeds):
        raise ChainAssumptionViolated("no seed triplet test exceeds epsilon")
    # the conditioning variable of the smallest CMI sits in the middle
    best = min(range(3), key=lambda t: (seeds[t][0], t))
    chain.order = list(seeds[best][1])

    for j in items[3:]:
        head, tail = chain.order[0], chain.order[-1]
        if _run_test(cmi, chain, j, tail, head, epsilon) <= epsilon:
            chain.order.insert(0, j)
        elif _run_test(cmi, chain, head, j, tail, epsilon) <= epsilon:
            chain.order.append(j)
        else:
            pos = ternary_search(chain, 0, len(chain.order) - 1, j, cmi, epsilon)
            chain.order.insert(pos + 1, j)
    return chain


def _tree_plugin(pool, d, edges, alpha, epsilon, delta, K) -> tuple[float, float, float]:
    """Sum of marginal entropies minus edge MIs, each term epsilon/2-accurate."""
    terms = d + len(edges)
    h_spec = good_spec(alpha, epsilon / 2, delta / terms, 1, K=K)
    i_spec = good_spec(alpha, epsilon / 2, delta / terms, 2, K=K)
    s = sum(good_entropy_estimate(pool, (i,), h_spec) for i in range(d))
    w = sum(good_mi_estimate(pool, e, i_spec) for e in edges)
    return s - w, s, w


def estimate_chain_entropy(pool, d: int, cfg: CmiTestConfig, insert_order=None, seed=None) -> EstimateReport:
    since = pool.cursor
    cmi = _PrivateCmi(pool, cfg, d)
    chain = recover_chain(d, cmi, cfg.epsilon, insert_order)
    edges = list(zip(chain.order[:-1], chain.order[1:]))
    h, s, w = _tree_plugin(pool, d, edges, cfg.alpha, min(cfg.epsilon, 0.5), cfg.delta, cfg.K)
    return pool.report(
        h,
        since,
        seed=seed,
        order=chain.order,
        test_count=len(chain.tests),
        tests=[list(t) for t in chain.tests],
        S_hat=s,
        W_hat=w,
        estimates=len(chain.tests) + d + len(edges),
    )


def identify_star_center(d: int, mi: Callable[[int, int], float], rng: np.random.Generator) -> dict:
    """One Prim step from a random node, then pick the endpoint with the
    larger mutual-information sum."""
    cache: dict[tuple[int, int], float] = {}

    def w(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            cache[key] = float(mi(*key))
        return cache[key]

    i = int(rng.integers(d))
    others = [j for j in range(d) if j != i]
    from_i = np.array([w(i, j) for j in others])
    k = others[int(np.argmax(from_i))]
    from_k = np.array([w(k, j) for j in range(d) if j != k])
    center = i if from_i.sum() > from_k.sum() else k
    return {"start": i, "neighbor": k, "center": center, "mi_estimates": len(cache)}


def estimate_star_entropy(pool, d: int, cfg: CmiTestConfig, rng: np.random.Generator, seed=None) -> EstimateReport:
    since = pool.cursor
    spec = good_spec(cfg.alpha, min(cfg.epsilon, 0.5), cfg.delta / (6 * d), 2, K=cfg.K)
    found = identify_star_center(d, lambda a, b: good_mi_estimate(pool, (a, b), spec), rng)
    c = found["center"]
    edges = [(c, j) for j in range(d) if j != c]
    h, s, w = _tree_plugin(pool, d, edges, cfg.alpha, min(cfg.epsilon, 0.5), cfg.delta, cfg.K)
    return pool.report(
        h,
        since,
        seed=seed,
        S_hat=s,
        W_hat=w,
        estimates=found["mi_estimates"] + d + len(edges),
        **found,
    )
