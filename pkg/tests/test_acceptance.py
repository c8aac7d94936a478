"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from ldp_entropy.chain_star import CmiTestConfig, estimate_chain_entropy, estimate_star_entropy, recover_chain
from ldp_entropy.chain_star import identify_star_center
from ldp_entropy.distributions import (
    CategoricalDistribution,
    brute_force_joint,
    collision_entropy,
    collision_probability,
    conditional_mutual_information,
    exponential_distribution,
    gini_entropy,
    mutual_information,
    random_tree_model,
    shannon_entropy,
    tree_true_entropy,
)
from ldp_entropy.experiments import (
    ExperimentConfig,
    chain_fixture,
    chain_pool_size,
    run_experiment,
    star_fixture,
    star_pool_size,
    tree_pool_size,
)
from ldp_entropy.gini_collision import bias_correction_roundtrip, run_gini_collision
from ldp_entropy.ldp import HashChannelParams, KRandomizedResponse, hash_channel, verify_ldp_ratio
from ldp_entropy.protocol import SEQUENTIAL, pool_from_distribution, pool_from_tree
from ldp_entropy.shannon_tree import estimate_tree_entropy, mst_weight_identity_check
from oracles import networkx_mst_weight, random_connected_levels

RESULTS = []


def verdict(name, ok, detail, start, budget):
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail} ({elapsed:.1f}s, budget {budget:.0f}s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_c1_mst_weight_identity():
    t = time.perf_counter()
    rng = np.random.default_rng(1)
    eps = 0.1
    bad = 0
    for _ in range(200):
        d = int(rng.integers(2, 8))
        M = int(rng.integers(1, 10))
        lv = random_connected_levels(rng, d, M)
        lhs, rhs = mst_weight_identity_check(lv, eps, M)
        kruskal = networkx_mst_weight(lv)
        bad += not (round(lhs / eps) == round(rhs / eps) == kruskal)
    verdict("1 mst-weight identity", bad == 0, f"{bad}/200 mismatches", t, 5)


def test_c2_privacy_ratio():
    t = time.perf_counter()
    excess, gap = -math.inf, 0.0
    for a in (0.3, 0.7, 1.0):
        for k in (2, 4, 8):
            excess = max(excess, verify_ldp_ratio(KRandomizedResponse(k, a)) - math.exp(a))
        for b in (1, 2, 4):
            r = verify_ldp_ratio(hash_channel(HashChannelParams(b, a, 0)))
            excess = max(excess, r - math.exp(a))
            gap = max(gap, abs(r - math.exp(a)))
    verdict("2 privacy ratio", excess <= 1e-9 and gap <= 1e-9,
            f"max excess {excess:.1e}, hash gap {gap:.1e}", t, 1)


def test_c3_collision_unbiased():
    t = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for dist in (CategoricalDistribution([0.5, 0.5]), exponential_distribution(1000)):
        truth = collision_probability(dist)
        for alpha in (1.0, math.inf):
            vals = np.empty(1000)
            for i in range(1000):
                pool = pool_from_distribution(dist, 100_000, rng)
                rep = run_gini_collision(pool, 1, alpha, int(rng.integers(2**63)), rng)
                vals[i] = rep.extras["collision_prob_hat"]
            z = abs(vals.mean() - truth) / (vals.std(ddof=1) / math.sqrt(vals.size))
            worst = max(worst, z)
    verdict("3 collision unbiasedness", worst <= 3, f"worst |z| = {worst:.2f}", t, 120)


def test_c4_fig1b_operating_point():
    t = time.perf_counter()
    cfg = ExperimentConfig.build("fig1b", {"seed": 4, "trials": 100, "bit_grid": [10_000]})
    rows, _ = run_experiment(cfg)
    med = {m: float(np.median([r.extra["rel_error"] for r in rows if r.params["method"] == m]))
           for m in ("skorski", "nonprivate", "private")}
    verdict("4 fig1b at 10^4 bits", med["skorski"] <= 0.06 and med["nonprivate"] <= 0.05,
            f"median rel. error skorski {med['skorski']:.3f}, non-private {med['nonprivate']:.3f}, "
            f"private {med['private']:.3f}", t, 300)


def test_c5_fig1a_trend():
    t = time.perf_counter()
    cfg = ExperimentConfig.build("fig1a", {"seed": 5, "trials": 100, "d_grid": [40, 80]})
    rows, _ = run_experiment(cfg)
    mean = {}
    for method in ("mst-bfs", "chow-liu"):
        for d in (40, 80):
            mean[method, d] = np.mean([r.distinct_pairs for r in rows
                                       if r.params == {"d": d, "method": method}])
    ours = mean["mst-bfs", 80] / mean["mst-bfs", 40]
    theirs = mean["chow-liu", 80] / mean["chow-liu", 40]
    verdict("5 fig1a pair-count trend", ours <= 2.8 and theirs >= 3.9,
            f"pair ratio d=80/d=40: mst-bfs {ours:.2f} ({mean['mst-bfs', 40]:.0f} -> "
            f"{mean['mst-bfs', 80]:.0f}), chow-liu {theirs:.2f}", t, 900)


def test_c6_tree_error_bound():
    t = time.perf_counter()
    rng = np.random.default_rng(6)
    d, eps, delta, alpha = 20, 0.25, 0.2, 1.0
    ok = 0
    for _ in range(50):
        model = random_tree_model(d, rng)
        pool = pool_from_tree(model, tree_pool_size(d, alpha, eps, delta), rng, lazy=True)
        rep = estimate_tree_entropy(pool, d, alpha, eps, delta, rng)
        ok += abs(rep.value - tree_true_entropy(model)) <= eps * d
    verdict("6 tree error bound", ok >= 0.75 * 50, f"{ok}/50 within eps*d", t, 600)


def test_c7_chain_star_recovery():
    t = time.perf_counter()
    rng = np.random.default_rng(7)
    chain_cfg = CmiTestConfig(epsilon=0.02, alpha=1.0, delta=0.1)
    star_cfg = CmiTestConfig(epsilon=0.03, alpha=1.0, delta=0.1)
    chain_hits = star_hits = bound_misses = exact_misses = 0
    for _ in range(50):
        model, order = chain_fixture(8, rng)
        pool = pool_from_tree(model, chain_pool_size(8, chain_cfg), rng, lazy=True)
        rep = estimate_chain_entropy(pool, 8, chain_cfg, insert_order=rng.permutation(8))
        got = rep.extras["order"]
        if got == order or got == order[::-1]:
            chain_hits += 1
            bound_misses += abs(rep.value - tree_true_entropy(model)) > chain_cfg.epsilon * 8
        cmi = lambda i, j, k, m=model: conditional_mutual_information(m.marginal((i, j, k)))  # noqa: E731
        exact = recover_chain(8, cmi, 1e-9, insert_order=rng.permutation(8)).order
        exact_misses += not (exact == order or exact == order[::-1])

        model, center = star_fixture(10, rng)
        pool = pool_from_tree(model, star_pool_size(10, star_cfg), rng, lazy=True)
        rep = estimate_star_entropy(pool, 10, star_cfg, rng)
        if rep.extras["center"] == center:
            star_hits += 1
            bound_misses += abs(rep.value - tree_true_entropy(model)) > star_cfg.epsilon * 10
        mi = lambda i, j, m=model: mutual_information(m.marginal((i, j)))  # noqa: E731
        exact_misses += identify_star_center(10, mi, rng)["center"] != center
    ok = chain_hits >= 0.85 * 50 and star_hits >= 0.85 * 50 and bound_misses == 0 and exact_misses == 0
    verdict("7 chain/star recovery", ok,
            f"chain {chain_hits}/50, star {star_hits}/50, bound misses {bound_misses}, "
            f"exact-oracle misses {exact_misses}", t, 600)


def test_c8_exact_identities():
    t = time.perf_counter()
    rng = np.random.default_rng(8)
    g1 = max(abs(collision_entropy(p) + math.log2(1 - gini_entropy(p)))
             for p in (rng.dirichlet(np.ones(int(rng.integers(2, 200)))) for _ in range(100)))
    g2 = max(abs(bias_correction_roundtrip(g, b, lam) - g)
             for g in np.linspace(0, 1, 21) for b in (1, 2, 4, 8, 16) for lam in (0.05, 0.3, 0.7, 1.0))
    g3 = 0.0
    for _ in range(50):
        m = random_tree_model(int(rng.integers(2, 8)), rng)
        g3 = max(g3, abs(tree_true_entropy(m) - shannon_entropy(brute_force_joint(m))))
    verdict("8 exact identities", g1 <= 1e-12 and g2 <= 1e-12 and g3 <= 1e-9,
            f"gaps {g1:.1e}, {g2:.1e}, {g3:.1e}", t, 10)


def test_c9_resource_accounting():
    t = time.perf_counter()
    rng = np.random.default_rng(9)
    problems = []

    for b in (1, 3, 8):
        pool = pool_from_distribution(exponential_distribution(100), 1001, rng)
        rep = run_gini_collision(pool, b, 1.0, 5, rng)
        sent = pool.bits_sent[pool.consumed]
        if not (sent.size == 1000 and np.all(sent == b) and not pool.bits_sent[~pool.consumed].any()):
            problems.append(f"hash b={b} bits")
        if rep.rounds != 1:
            problems.append("hash rounds")

    runs = []
    model = random_tree_model(12, rng)
    pool = pool_from_tree(model, tree_pool_size(12, 1.0, 0.5, 0.5), rng, lazy=False, mode=SEQUENTIAL)
    runs.append(("tree", pool, estimate_tree_entropy(pool, 12, 1.0, 0.5, 0.5, rng), 2))
    cfg = CmiTestConfig(0.1, 1.0, 0.1)
    model, _ = chain_fixture(6, rng)
    pool = pool_from_tree(model, chain_pool_size(6, cfg), rng, lazy=True, mode=SEQUENTIAL)
    runs.append(("chain", pool, estimate_chain_entropy(pool, 6, cfg), 3))
    model, _ = star_fixture(6, rng)
    pool = pool_from_tree(model, star_pool_size(6, cfg), rng, lazy=True, mode=SEQUENTIAL)
    runs.append(("star", pool, estimate_star_entropy(pool, 6, cfg, rng), 2))
    for name, pool, rep, width in runs:
        a = rep.extras["audit"]
        if not a["single_use"] or a["users_consumed"] != int(pool.consumed.sum()):
            problems.append(f"{name} single use")
        if pool.bits_sent.max() > width or rep.max_bits_per_user > 3:
            problems.append(f"{name} bits per user")
        if rep.rounds != rep.users_consumed:
            problems.append(f"{name} rounds")
    verdict("9 resource accounting", not problems, ", ".join(problems) or "all exact", t, 60)


@pytest.fixture(scope="module", autouse=True)
def summary():
    yield
    print("\n" + "\n".join(RESULTS))
