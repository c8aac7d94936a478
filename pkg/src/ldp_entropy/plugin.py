"""Private plug-in estimates of entropy, MI and CMI for small variable sets.

Every estimate draws fresh users who each reveal the queried coordinates
through k-ary randomized response over the product alphabet. The server
inverts the report histogram, projects it onto the simplex and evaluates
the entropy expression on the resulting table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import (
    conditional_mutual_information,
    mutual_information,
    shannon_entropy,
)
from .ldp import KRandomizedResponse, rr_invert_frequencies

#: multiplier on c^2 log(1/delta) / (epsilon alpha)^2
SAMPLE_CONSTANT = 16.0


class InvalidEpsilon(ValueError):
    pass


@dataclass(frozen=True)
class GoodEstimateSpec:
    """Accuracy, confidence and privacy of one plug-in estimate.

    ``support`` is the product alphabet size of the queried variables.
    ``n_override`` fixes the sample count (needed when ``alpha`` is infinite).
    """

    alpha: float
    epsilon: float
    delta: float
    support: int
    K: float = SAMPLE_CONSTANT
    n_override: int | None = None

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.5:
            raise InvalidEpsilon(f"epsilon must lie in (0, 1/2], got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.support < 2:
            raise ValueError("support must be at least 2")

    @property
    def n_samples(self) -> int:
        if self.n_override is not None:
            return int(self.n_override)
        if math.isinf(self.alpha):
            raise ValueError("infinite alpha needs an explicit n_override")
        c = self.support
        n = self.K * c * c * math.log(1.0 / self.delta) / (self.epsilon**2 * self.alpha**2)
        return max(1, math.ceil(n))

    def for_support(self, support: int) -> "GoodEstimateSpec":
        return GoodEstimateSpec(
            self.alpha, self.epsilon, self.delta, support, self.K, self.n_override
        )


def good_spec(alpha, epsilon, delta, n_vars: int, alphabet: int = 2, **kw) -> GoodEstimateSpec:
    return GoodEstimateSpec(alpha, epsilon, delta, alphabet**n_vars, **kw)


def _check_vars(variables: Sequence[int], size: int) -> tuple[int, ...]:
    v = tuple(int(x) for x in variables)
    if len(v) != size or len(set(v)) != size:
        raise ValueError(f"need {size} distinct variable indices, got {variables}")
    return v


def estimate_table(pool, variables: Sequence[int], spec: GoodEstimateSpec, tag: str = "plugin"):
    """Privately estimated joint table, axes in the order of ``variables``.

    Users reveal the coordinates in ascending index order; the resulting
    table is transposed back to the requested order.
    """
    variables = tuple(int(x) for x in variables)
    order = sorted(variables)
    shape = (pool.alphabet,) * len(order)
    c = math.prod(shape)
    if spec.support != c:
        spec = spec.for_support(c)
    channel = KRandomizedResponse(c, spec.alpha)
    counts = pool.request_histogram(order, channel, spec.n_samples, tag=tag)
    table = rr_invert_frequencies(counts, c, spec.alpha).probs.reshape(shape)
    return table.transpose([order.index(v) for v in variables])


def good_entropy_estimate(pool, variables, spec: GoodEstimateSpec) -> float:
    if isinstance(variables, (int, np.integer)):
        variables = (int(variables),)
    table = estimate_table(pool, variables, spec, tag="entropy")
    return shannon_entropy(table)


def good_mi_estimate(pool, variables, spec: GoodEstimateSpec) -> float:
    i, j = _check_vars(variables, 2)
    return mutual_information(estimate_table(pool, (i, j), spec, tag="mi"))


def good_cmi_estimate(pool, variables, spec: GoodEstimateSpec) -> float:
    """Estimate of I(X_i; X_j | X_k) for ``variables = (i, j, k)``."""
    i, j, k = _check_vars(variables, 3)
    return conditional_mutual_information(estimate_table(pool, (i, j, k), spec, tag="cmi"))
