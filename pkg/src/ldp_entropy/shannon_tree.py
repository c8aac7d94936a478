"""Shannon entropy of tree-structured distributions via sublinear
maximum-spanning-tree weight estimation.

The joint entropy equals the sum of marginal entropies minus the weight of
the maximum spanning tree over pairwise mutual informations. The tree weight
is recovered from connected-component counts of thresholded graphs, and
those counts are estimated with randomly started, size-capped breadth-first
searches that only query the edges they touch.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .distributions import maximum_spanning_tree
from .plugin import InvalidEpsilon, SAMPLE_CONSTANT, good_entropy_estimate, good_mi_estimate, good_spec
from .protocol import EstimateReport


def sample_threshold(rng: np.random.Generator) -> int:
    """Positive integer Z with Pr[Z >= z] = 1/z, as floor(1/U), U ~ U(0, 1]."""
    u = 1.0 - rng.random()
    return int(math.floor(1.0 / u))


@dataclass
class MstEstimatorState:
    M: int
    R: int
    edge_cache: dict = field(default_factory=dict)
    pair_log: list = field(default_factory=list)
    gamma: np.ndarray | None = None
    eta_hat: np.ndarray | None = None
    W_hat: float = 0.0
    S_hat: float = 0.0
    H_hat: float = 0.0
    max_queue: int = 0


def _levels(c: int, epsilon: float, delta: float) -> tuple[int, int]:
    M = math.ceil(2 * math.log2(c) / epsilon)
    R = math.ceil(math.log(1 / delta) / epsilon**2)
    return M, R


def estimate_tree_entropy(
    pool,
    d: int,
    alpha: float,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
    c: int = 2,
    K: float = SAMPLE_CONSTANT,
    seed: int | None = None,
) -> EstimateReport:
    """Sequentially interactive private estimate of H(X_1..X_d).

    Edge estimates are cached for the whole run, so every unordered pair is
    queried at most once. ``extras`` carries the audit record.
    """
    if not 0 < epsilon <= 0.5:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1/2], got {epsilon}")
    since = pool.cursor
    M, R = _levels(c, epsilon, delta)
    size_cap = math.ceil(2 / epsilon)
    mi_spec = good_spec(alpha, epsilon / 2, delta / d**2, 2, alphabet=c, K=K)
    st = MstEstimatorState(M=M, R=R, gamma=np.zeros((M, R), dtype=np.int8))

    def weight(i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        if key not in st.edge_cache:
            st.edge_cache[key] = good_mi_estimate(pool, key, mi_spec)
            st.pair_log.append(key)
        return st.edge_cache[key]

    for m in range(1, M + 1):
        threshold = epsilon * m
        for r in range(R):
            z = sample_threshold(rng)
            start = int(rng.integers(d))
            cap = min(size_cap, z)
            queue = deque([start])
            found = {start}
            exhausted = True
            while queue and exhausted:
                i = queue.popleft()
                for j in range(d):
                    if j in found or weight(i, j) < threshold:
                        continue
                    found.add(j)
                    queue.append(j)
                    if len(found) > cap:
                        exhausted = False
                        break
                assert len(queue) <= cap
                st.max_queue = max(st.max_queue, len(queue))
            st.gamma[m - 1, r] = exhausted
    st.eta_hat = d / R * st.gamma.sum(axis=1)
    st.W_hat = epsilon * M * d - epsilon * float(st.eta_hat.sum())

    h_spec = good_spec(alpha, epsilon, delta / d, 1, alphabet=c, K=K)
    st.S_hat = sum(good_entropy_estimate(pool, (i,), h_spec) for i in range(d))
    st.H_hat = st.S_hat - st.W_hat

    return pool.report(
        st.H_hat,
        since,
        seed=seed,
        distinct_pairs=len(st.edge_cache),
        pairs=list(st.pair_log),
        M=M,
        R=R,
        gamma_shape=list(st.gamma.shape),
        eta_hat=st.eta_hat.tolist(),
        W_hat=st.W_hat,
        S_hat=st.S_hat,
        max_queue=st.max_queue,
        size_cap=size_cap,
        mi_samples=mi_spec.n_samples,
        entropy_samples=h_spec.n_samples,
    )


def component_counts(levels: np.ndarray, M: int) -> np.ndarray:
    """eta_m = number of connected components using edges of level >= m."""
    lv = np.asarray(levels)
    out = np.empty(M, dtype=np.int64)
    for m in range(1, M + 1):
        adj = csr_matrix((lv >= m).astype(np.int8))
        out[m - 1] = connected_components(adj, directed=False)[0]
    return out


def mst_weight_identity_check(levels: np.ndarray, epsilon: float, M: int) -> tuple[float, float]:
    """Compare the maximum spanning tree weight with the component-count form.

    ``levels[i, j]`` in ``{1..M}`` is the discretised weight of edge (i, j) in
    units of ``epsilon``; 0 marks a missing edge. Returns ``(lhs, rhs)`` with
    ``lhs`` from Kruskal and ``rhs = eps*M*d - eps*sum(eta_m)``.
    """
    lv = np.array(levels, dtype=np.int64)
    d = lv.shape[0]
    if lv.shape != (d, d) or np.any(lv != lv.T):
        raise ValueError("levels must be a symmetric square matrix")
    np.fill_diagonal(lv, 0)
    if np.any((lv < 0) | (lv > M)):
        raise ValueError("levels must lie in 0..M")
    eta = component_counts(lv, M)
    if eta[0] != 1:
        raise ValueError("graph is disconnected")
    w = np.where(lv > 0, lv, np.nan).astype(float)
    tree = maximum_spanning_tree(w)
    lhs_units = int(sum(lv[a, b] for a, b in tree))
    rhs_units = int(M * d - eta.sum())
    return epsilon * lhs_units, epsilon * rhs_units
