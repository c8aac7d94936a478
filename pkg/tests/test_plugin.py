import math

import numpy as np
import pytest

from ldp_entropy.distributions import (
    TreeModel,
    conditional_mutual_information,
    copy_model,
    mutual_information,
    random_tree_model,
    sample_full,
    shannon_entropy,
    symmetric_tree_model,
)
from ldp_entropy.ldp import KRandomizedResponse, verify_ldp_ratio
from ldp_entropy.plugin import (
    SAMPLE_CONSTANT,
    GoodEstimateSpec,
    InvalidEpsilon,
    estimate_table,
    good_cmi_estimate,
    good_entropy_estimate,
    good_mi_estimate,
    good_spec,
)
from ldp_entropy.protocol import ArraySource, InsufficientUsers, UserPool, pool_from_tree

EPS, DELTA, ALPHA, TRIALS = 0.1, 0.1, 0.8, 200
ENVELOPE = DELTA + 2 * math.sqrt(DELTA * (1 - DELTA) / TRIALS)

INDEPENDENT = TreeModel(3, [(0, 1), (1, 2)], [0.5, 0.5, 0.5], [0.0, 0.0])
POINT_MASS = TreeModel(3, [(0, 1), (1, 2)], [0.0, 0.5, 0.5], [0.0, 0.0])
# X0 = X1, X2 independent of both
EQUAL_PAIR = TreeModel(3, [(0, 1), (1, 2)], [0.5, 0.5, 0.5], [0.25, 0.0])
CHAIN = symmetric_tree_model(3, [(0, 1), (1, 2)], 0.1)


def test_spec_validation():
    with pytest.raises(InvalidEpsilon):
        GoodEstimateSpec(1.0, 0.6, 0.1, 2)
    with pytest.raises(InvalidEpsilon):
        GoodEstimateSpec(1.0, 0.0, 0.1, 2)
    with pytest.raises(ValueError):
        GoodEstimateSpec(1.0, 0.1, 1.0, 2)
    with pytest.raises(ValueError):
        GoodEstimateSpec(math.inf, 0.1, 0.1, 2).n_samples
    assert GoodEstimateSpec(math.inf, 0.1, 0.1, 2, n_override=10).n_samples == 10


def test_sample_count_formula():
    s = good_spec(0.8, 0.1, 0.1, 2)
    assert s.support == 4
    expect = math.ceil(SAMPLE_CONSTANT * 16 * math.log(10) / (0.01 * 0.64))
    assert s.n_samples == expect


@pytest.mark.parametrize("vars_, c, fn", [((1,), 2, good_entropy_estimate), ((0, 1), 4, good_mi_estimate),
                                          ((0, 1, 2), 8, good_cmi_estimate)])
def test_resource_contract(rng, vars_, c, fn):
    spec = good_spec(1.0, 0.25, 0.2, len(vars_))
    pool = pool_from_tree(CHAIN, 3 * spec.n_samples, rng, lazy=True)
    fn(pool, vars_, spec)
    a = pool.audit()
    assert a["users_consumed"] == spec.n_samples
    assert a["max_bits_per_user"] == math.ceil(math.log2(c))
    assert verify_ldp_ratio(KRandomizedResponse(c, 1.0)) <= math.exp(1.0) + 1e-9


def test_insufficient_pool(rng):
    spec = good_spec(1.0, 0.25, 0.2, 1)
    pool = pool_from_tree(CHAIN, spec.n_samples - 1, rng, lazy=True)
    with pytest.raises(InsufficientUsers):
        good_entropy_estimate(pool, 0, spec)


def _failure_rate(rng, model, fn, vars_, truth):
    spec = good_spec(ALPHA, EPS, DELTA, len(vars_))
    fails = 0
    for _ in range(TRIALS):
        pool = pool_from_tree(model, spec.n_samples, rng, lazy=True)
        fails += abs(fn(pool, vars_, spec) - truth) > EPS
    return fails / TRIALS


@pytest.mark.parametrize(
    "name, model, fn, vars_, truth",
    [
        ("point-mass entropy", POINT_MASS, good_entropy_estimate, (0,), 0.0),
        ("fair-bit entropy", INDEPENDENT, good_entropy_estimate, (1,), 1.0),
        ("independent MI", INDEPENDENT, good_mi_estimate, (0, 2), 0.0),
        ("copy MI", copy_model(3), good_mi_estimate, (0, 2), 1.0),
        ("chain CMI", CHAIN, good_cmi_estimate, (0, 2, 1), 0.0),
        ("independent CMI", INDEPENDENT, good_cmi_estimate, (0, 1, 2), 0.0),
        ("equal-pair CMI", EQUAL_PAIR, good_cmi_estimate, (0, 1, 2), 1.0),
    ],
)
def test_accuracy_envelope(rng, name, model, fn, vars_, truth):
    assert _failure_rate(rng, model, fn, vars_, truth) <= ENVELOPE


def test_fair_bit_ninety_percent(rng):
    assert 1 - _failure_rate(rng, INDEPENDENT, good_entropy_estimate, (1,), 1.0) >= 0.9


def test_mi_argument_order_symmetry(rng):
    model = random_tree_model(5, rng)
    spec = good_spec(1.0, 0.2, 0.2, 2)
    a = good_mi_estimate(pool_from_tree(model, spec.n_samples, np.random.default_rng(3), lazy=True), (1, 4), spec)
    b = good_mi_estimate(pool_from_tree(model, spec.n_samples, np.random.default_rng(3), lazy=True), (4, 1), spec)
    assert a == b


def test_table_axes_follow_request_order(rng):
    model = random_tree_model(6, rng)
    pool = pool_from_tree(model, 10**6, rng, lazy=True)
    big = GoodEstimateSpec(math.inf, 0.1, 0.1, 8, n_override=10**6)
    t = estimate_table(pool, (4, 0, 2), big)
    assert np.abs(t - model.marginal((4, 0, 2))).max() < 0.005


def test_identity_channel_plugin_limit(rng):
    model = random_tree_model(4, rng)
    e = 1
    i, j = model.edges[e]
    n = 10**6
    spec = GoodEstimateSpec(math.inf, 0.1, 0.1, 4, n_override=n)
    pool = pool_from_tree(model, n, rng)
    est = good_mi_estimate(pool, (i, j), spec)
    assert abs(est - mutual_information(model.edge_table(e))) <= 0.01


def test_infinite_alpha_equals_nonprivate_plugin(rng):
    x = sample_full(random_tree_model(4, rng), rng, 5000)
    spec = GoodEstimateSpec(math.inf, 0.1, 0.1, 2, n_override=5000)
    pool = UserPool(5000, ArraySource(x), rng=rng)
    assert good_entropy_estimate(pool, (2,), spec) == pytest.approx(
        shannon_entropy(np.bincount(x[:, 2], minlength=2) / 5000), abs=1e-12
    )
    spec3 = GoodEstimateSpec(math.inf, 0.1, 0.1, 8, n_override=5000)
    pool = UserPool(5000, ArraySource(x), rng=rng)
    counts = np.zeros((2, 2, 2))
    np.add.at(counts, (x[:, 3], x[:, 0], x[:, 1]), 1)
    assert good_cmi_estimate(pool, (3, 0, 1), spec3) == pytest.approx(
        conditional_mutual_information(counts / 5000), abs=1e-12
    )


def test_rejects_repeated_indices(rng):
    pool = pool_from_tree(CHAIN, 10**6, rng, lazy=True)
    with pytest.raises(ValueError):
        good_mi_estimate(pool, (1, 1), good_spec(1.0, 0.2, 0.2, 2))
    with pytest.raises(ValueError):
        good_cmi_estimate(pool, (0, 1), good_spec(1.0, 0.2, 0.2, 3))
