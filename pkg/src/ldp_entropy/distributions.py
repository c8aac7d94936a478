"""Ground-truth distributions, exact information measures and samplers.

All logarithms are base 2 and ``0 log 0`` is taken to be 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PROB_TOL = 1e-12


def _as_probs(dist) -> np.ndarray:
    if isinstance(dist, CategoricalDistribution):
        return dist.probs
    if isinstance(dist, JointTable):
        return dist.mass.ravel()
    return np.asarray(dist, dtype=float).ravel()


@dataclass(frozen=True)
class CategoricalDistribution:
    """Probability vector over the support ``{0, ..., k-1}``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size < 1:
            raise ValueError("support size must be at least 1")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def k(self) -> int:
        return self.probs.size

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.k, size=n, p=self.probs)


@dataclass(frozen=True)
class JointTable:
    """Dense joint probability table; axis ``a`` has ``dims[a]`` states."""

    mass: np.ndarray

    def __post_init__(self):
        m = np.array(self.mass, dtype=float)
        if np.any(m < -PROB_TOL) or abs(m.sum() - 1.0) > PROB_TOL:
            raise ValueError("joint mass must be nonnegative and sum to 1")
        m = np.clip(m, 0.0, None)
        m.flags.writeable = False
        object.__setattr__(self, "mass", m)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.mass.shape

    def marginal(self, axes: Sequence[int]) -> np.ndarray:
        drop = tuple(a for a in range(self.mass.ndim) if a not in axes)
        return self.mass.sum(axis=drop)


def _entropy_of_mass(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def shannon_entropy(dist) -> float:
    """Shannon entropy in bits."""
    return _entropy_of_mass(_as_probs(dist))


def gini_entropy(dist) -> float:
    p = _as_probs(dist)
    return float(1.0 - np.dot(p, p))


def collision_probability(dist) -> float:
    p = _as_probs(dist)
    return float(np.dot(p, p))


def collision_entropy(dist) -> float:
    """Renyi entropy of order 2 in bits, computed as ``-log2(1 - gini)``."""
    return float(-np.log2(1.0 - gini_entropy(dist)))


def _table(joint, ndim: int) -> np.ndarray:
    mass = joint.mass if isinstance(joint, JointTable) else np.asarray(joint, dtype=float)
    if mass.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional joint table, got {mass.ndim}")
    return mass


def mutual_information(joint) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y) for a 2-D joint table."""
    m = _table(joint, 2)
    return (
        _entropy_of_mass(m.sum(axis=1))
        + _entropy_of_mass(m.sum(axis=0))
        - _entropy_of_mass(m)
    )


def conditional_mutual_information(joint) -> float:
    """I(X;Y|Z) = H(X,Z) + H(Y,Z) - H(X,Y,Z) - H(Z); axes are (X, Y, Z)."""
    m = _table(joint, 3)
    return (
        _entropy_of_mass(m.sum(axis=1))
        + _entropy_of_mass(m.sum(axis=0))
        - _entropy_of_mass(m)
        - _entropy_of_mass(m.sum(axis=(0, 1)))
    )


def exponential_distribution(k: int) -> CategoricalDistribution:
    """p_i proportional to exp(-i) for i = 1..k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    w = np.exp(-np.arange(k, dtype=float))
    return CategoricalDistribution(w / w.sum())


# ---------------------------------------------------------------------------
# Tree-structured Boolean models


def pair_cells(p_i: float, p_j: float, r: float) -> np.ndarray:
    """2x2 table P(X_i = a, X_j = b) keeping the marginals p_i, p_j."""
    return np.array(
        [
            [(1 - p_i) * (1 - p_j) + r, (1 - p_i) * p_j - r],
            [p_i * (1 - p_j) - r, p_i * p_j + r],
        ]
    )


def coupling_bounds(p_i: float, p_j: float) -> tuple[float, float]:
    """Open interval of couplings for which all four cells stay positive."""
    lo = max(-(1 - p_i) * (1 - p_j), -p_i * p_j)
    hi = min((1 - p_i) * p_j, p_i * (1 - p_j))
    return lo, hi


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def maximum_spanning_tree(weights: np.ndarray) -> list[tuple[int, int]]:
    """Kruskal on a dense symmetric weight matrix (NaN marks a missing edge)."""
    w = np.asarray(weights, dtype=float)
    d = w.shape[0]
    iu, ju = np.triu_indices(d, 1)
    vals = w[iu, ju]
    keep = ~np.isnan(vals)
    iu, ju, vals = iu[keep], ju[keep], vals[keep]
    order = np.argsort(-vals, kind="stable")
    dsu = _DSU(d)
    edges = []
    for idx in order:
        a, b = int(iu[idx]), int(ju[idx])
        if dsu.union(a, b):
            edges.append((a, b))
            if len(edges) == d - 1:
                break
    return edges


def _is_spanning_tree(d: int, edges: Sequence[tuple[int, int]]) -> bool:
    if len(edges) != d - 1:
        return False
    dsu = _DSU(d)
    for a, b in edges:
        if not (0 <= a < d and 0 <= b < d) or a == b or not dsu.union(a, b):
            return False
    return True


@dataclass
class TreeModel:
    """Boolean Markov random field on a spanning tree.

    Each edge ``(i, j)`` carries a coupling ``r`` so that its pairwise table is
    ``pair_cells(p_i, p_j, r)``. Node 0 is the root for ancestral sampling.
    """

    d: int
    edges: list[tuple[int, int]]
    marginal_params: np.ndarray
    couplings: np.ndarray
    _cond_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.edges = [(int(a), int(b)) for a, b in self.edges]
        self.marginal_params = np.asarray(self.marginal_params, dtype=float)
        self.couplings = np.asarray(self.couplings, dtype=float).reshape(len(self.edges))
        if self.d < 1 or self.marginal_params.shape != (self.d,):
            raise ValueError("marginal_params must have one entry per node")
        if not _is_spanning_tree(self.d, self.edges):
            raise ValueError("edges do not form a spanning tree")
        if np.any(self.marginal_params < 0) or np.any(self.marginal_params > 1):
            raise ValueError("marginal parameters must lie in [0, 1]")
        for (a, b), r in zip(self.edges, self.couplings):
            cells = pair_cells(self.marginal_params[a], self.marginal_params[b], r)
            if np.any(cells < -PROB_TOL):
                raise ValueError(f"edge {(a, b)} has a negative cell probability")
        self._build_rooted()

    def _build_rooted(self):
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.d)]
        for e, (a, b) in enumerate(self.edges):
            adj[a].append((b, e))
            adj[b].append((a, e))
        parent = np.full(self.d, -1)
        parent_edge = np.full(self.d, -1)
        depth = np.zeros(self.d, dtype=int)
        order = [0]
        seen = {0}
        for u in order:
            for v, e in adj[u]:
                if v not in seen:
                    seen.add(v)
                    parent[v], parent_edge[v], depth[v] = u, e, depth[u] + 1
                    order.append(v)
        self._adj = adj
        self._parent = parent
        self._parent_edge = parent_edge
        self._depth = depth
        self._order = order

    # -- exact quantities -------------------------------------------------

    def node_marginal(self, i: int) -> np.ndarray:
        p = self.marginal_params[i]
        return np.array([1 - p, p])

    def edge_table(self, e: int) -> np.ndarray:
        a, b = self.edges[e]
        cells = pair_cells(self.marginal_params[a], self.marginal_params[b], self.couplings[e])
        return np.clip(cells, 0.0, None)

    def _edge_conditional(self, u: int, v: int, e: int) -> np.ndarray:
        """P(X_v = b | X_u = a) as a 2x2 matrix indexed [a, b]."""
        cached = self._cond_cache.get(("edge", u, v))
        if cached is not None:
            return cached
        t = self.edge_table(e)
        if self.edges[e][0] != u:
            t = t.T
        rows = t.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(rows > 0, t / np.where(rows > 0, rows, 1), 0.5)
        self._cond_cache[("edge", u, v)] = cond
        return cond

    def _path(self, u: int, v: int) -> list[int]:
        left, right = [u], [v]
        a, b = u, v
        while self._depth[a] > self._depth[b]:
            a = int(self._parent[a])
            left.append(a)
        while self._depth[b] > self._depth[a]:
            b = int(self._parent[b])
            right.append(b)
        while a != b:
            a, b = int(self._parent[a]), int(self._parent[b])
            left.append(a)
            right.append(b)
        return left + right[-2::-1]

    def conditional(self, u: int, v: int) -> np.ndarray:
        """P(X_v | X_u) via the product of edge conditionals along the path."""
        key = (u, v)
        if key not in self._cond_cache:
            path = self._path(u, v)
            mat = np.eye(2)
            for a, b in zip(path[:-1], path[1:]):
                e = self._parent_edge[b] if self._parent[b] == a else self._parent_edge[a]
                mat = mat @ self._edge_conditional(a, b, int(e))
            self._cond_cache[key] = mat
        return self._cond_cache[key]

    def _median(self, a: int, b: int, c: int) -> int:
        on_ab = set(self._path(a, b))
        on_ac = set(self._path(a, c))
        on_bc = set(self._path(b, c))
        (m,) = on_ab & on_ac & on_bc
        return m

    def marginal(self, nodes: Sequence[int]) -> np.ndarray:
        """Exact joint of up to three nodes, axes in the order given."""
        nodes = [int(x) for x in nodes]
        if len(set(nodes)) != len(nodes) or not 1 <= len(nodes) <= 3:
            raise ValueError("need one to three distinct nodes")
        if len(nodes) == 1:
            return self.node_marginal(nodes[0])
        hub = nodes[0] if len(nodes) == 2 else self._median(*nodes)
        letters = "abc"
        factors = [self.node_marginal(hub)]
        spec = ["h"]
        for pos, x in enumerate(nodes):
            if x == hub:
                factors.append(np.eye(2))
            else:
                factors.append(self.conditional(hub, x))
            spec.append("h" + letters[pos])
        out = np.einsum(",".join(spec) + "->" + letters[: len(nodes)], *factors)
        return np.clip(out, 0.0, None)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "edges": [list(e) for e in self.edges],
            "marginal_params": self.marginal_params.tolist(),
            "couplings": self.couplings.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TreeModel":
        return cls(
            d=int(doc["d"]),
            edges=[tuple(e) for e in doc["edges"]],
            marginal_params=np.asarray(doc["marginal_params"], dtype=float),
            couplings=np.asarray(doc["couplings"], dtype=float),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TreeModel":
        return cls.from_dict(json.loads(text))


def tree_true_entropy(model: TreeModel) -> float:
    """Joint entropy from marginal entropies minus the tree's edge MI total."""
    s = sum(shannon_entropy(model.node_marginal(i)) for i in range(model.d))
    w = sum(mutual_information(model.edge_table(e)) for e in range(len(model.edges)))
    return s - w


def sample_full(model: TreeModel, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Ancestral sample(s) rooted at node 0.

    Returns a length-``d`` vector when ``n`` is None, else an ``(n, d)`` array.
    """
    size = 1 if n is None else n
    x = np.zeros((size, model.d), dtype=np.uint8)
    root = model._order[0]
    x[:, root] = rng.random(size) < model.marginal_params[root]
    for v in model._order[1:]:
        u = int(model._parent[v])
        cond = model._edge_conditional(u, v, int(model._parent_edge[v]))
        x[:, v] = rng.random(size) < cond[x[:, u], 1]
    return x[0] if n is None else x


def random_tree_model(d: int, rng: np.random.Generator, shrink: float = 0.99) -> TreeModel:
    """Random Boolean tree model: max spanning tree of Gaussian weights,
    uniform marginals, couplings uniform inside the shrunken feasible range."""
    if d < 2:
        raise ValueError("d must be >= 2")
    w = rng.standard_normal((d, d))
    w = np.triu(w, 1)
    w = w + w.T
    np.fill_diagonal(w, np.nan)
    edges = maximum_spanning_tree(w)
    p = rng.uniform(0.0, 1.0, size=d)
    r = np.empty(len(edges))
    for e, (a, b) in enumerate(edges):
        lo, hi = coupling_bounds(p[a], p[b])
        r[e] = rng.uniform(lo * shrink, hi * shrink)
    return TreeModel(d=d, edges=edges, marginal_params=p, couplings=r)


def symmetric_tree_model(d: int, edges: Sequence[tuple[int, int]], flips) -> TreeModel:
    """Fair-coin nodes where each edge disagrees with probability ``flip``."""
    flips = np.broadcast_to(np.asarray(flips, dtype=float), (len(edges),))
    return TreeModel(
        d=d,
        edges=list(edges),
        marginal_params=np.full(d, 0.5),
        couplings=0.25 - flips / 2.0,
    )


def copy_model(d: int) -> TreeModel:
    """``d`` copies of one fair bit (a chain with zero-flip edges)."""
    return symmetric_tree_model(d, [(i, i + 1) for i in range(d - 1)], 0.0)


def brute_force_joint(model: TreeModel) -> np.ndarray:
    """Full 2^d joint by enumeration; rows follow ``itertools.product`` order."""
    if model.d > 20:
        raise ValueError("enumeration limited to d <= 20")
    d = model.d
    states = ((np.arange(2**d)[:, None] >> np.arange(d - 1, -1, -1)) & 1).astype(np.intp)
    prob = np.ones(2**d)
    root = model._order[0]
    prob *= model.node_marginal(root)[states[:, root]]
    for v in model._order[1:]:
        u = int(model._parent[v])
        cond = model._edge_conditional(u, v, int(model._parent_edge[v]))
        prob *= cond[states[:, u], states[:, v]]
    return prob
