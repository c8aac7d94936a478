"""
Recovering a chain or a star with private conditional tests
===========================================================

For chains the server inserts variables one by one, locating each with a
bisection driven by private conditional mutual information tests. For stars
it walks to the center by comparing private mutual informations.
"""

import numpy as np

from ldp_entropy.chain_star import CmiTestConfig, estimate_chain_entropy, estimate_star_entropy
from ldp_entropy.distributions import tree_true_entropy
from ldp_entropy.experiments import chain_fixture, chain_pool_size, star_fixture, star_pool_size
from ldp_entropy.protocol import pool_from_tree

rng = np.random.default_rng(2)

cfg = CmiTestConfig(epsilon=0.02, alpha=1.0, delta=0.1)
model, order = chain_fixture(8, rng)
pool = pool_from_tree(model, chain_pool_size(8, cfg), rng, lazy=True)
rep = estimate_chain_entropy(pool, 8, cfg)
print("hidden chain:   ", order)
print("recovered chain:", rep.extras["order"])
print(f"entropy {rep.value:.4f} vs truth {tree_true_entropy(model):.4f}, {rep.extras['test_count']} tests")

cfg = CmiTestConfig(epsilon=0.03, alpha=1.0, delta=0.1)
model, center = star_fixture(10, rng)
pool = pool_from_tree(model, star_pool_size(10, cfg), rng, lazy=True)
rep = estimate_star_entropy(pool, 10, cfg, rng)
print(f"star center {center}, found {rep.extras['center']} starting from {rep.extras['start']}")
print(f"entropy {rep.value:.4f} vs truth {tree_true_entropy(model):.4f}")
