import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ldp_entropy import _siphash
from ldp_entropy.ldp import (
    HashChannelParams,
    IdentityChannel,
    KRandomizedResponse,
    PrivacyBudget,
    encode_pair,
    hash_channel,
    hash_lambda,
    hash_response,
    int_bytes,
    k_randomized_response,
    keyed_hash,
    keyed_hash_ints,
    project_to_simplex,
    rr_invert_frequencies,
    verify_ldp_ratio,
)


def test_budget_rejects_nonpositive():
    with pytest.raises(ValueError):
        PrivacyBudget(0.0)
    with pytest.raises(ValueError):
        KRandomizedResponse(3, -1.0)
    with pytest.raises(ValueError):
        KRandomizedResponse(1, 1.0)


def test_keep_probability_binary():
    ch = KRandomizedResponse(2, math.log(3))
    assert ch.keep == pytest.approx(0.75, abs=1e-15)


def test_infinite_alpha_is_identity(rng):
    x = rng.integers(0, 7, 1000)
    assert np.array_equal(KRandomizedResponse(7, math.inf).apply(x, rng), x)
    assert all(k_randomized_response(v, 7, PrivacyBudget(math.inf), rng) == v for v in range(7))
    with pytest.raises(ValueError):
        k_randomized_response(7, 7, 1.0, rng)


def test_empirical_channel_matrix(rng):
    k, a = 4, 0.7
    ch = KRandomizedResponse(k, a)
    per_input = 250_000
    exact = ch.matrix()
    for x in range(k):
        out = ch.apply(np.full(per_input, x), rng)
        emp = np.bincount(out, minlength=k) / per_input
        se = np.sqrt(exact[x] * (1 - exact[x]) / per_input)
        assert np.all(np.abs(emp - exact[x]) <= 3 * se)


def test_inversion_point_mass(rng):
    k, a, n = 4, 0.5, 100_000
    ch = KRandomizedResponse(k, a)
    reports = ch.apply(np.zeros(n, dtype=int), rng)
    est = rr_invert_frequencies(np.bincount(reports, minlength=k), k, a)
    assert np.abs(est.probs - [1, 0, 0, 0]).sum() <= 0.05


def test_inversion_identity_channel():
    est = rr_invert_frequencies(np.full(5, 20), 5, math.inf)
    assert np.allclose(est.probs, 0.2)


def test_inversion_adversarial_histogram():
    est = rr_invert_frequencies([3, 0, 0, 0, 0, 0], 6, 0.2)
    assert np.all(est.probs >= 0) and est.probs.sum() == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        rr_invert_frequencies([0, 0], 2, 1.0)


def test_inversion_consistency(rng):
    k, a = 4, 0.8
    p = np.array([0.1, 0.2, 0.3, 0.4])
    ch = KRandomizedResponse(k, a)
    medians = []
    for n in (1_000, 10_000, 100_000):
        errs = []
        for _ in range(50):
            counts = rng.multinomial(n, p @ ch.matrix())
            errs.append(np.abs(rr_invert_frequencies(counts, k, a).probs - p).sum())
        medians.append(np.median(errs))
    assert medians[0] > medians[1] > medians[2]


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=20))
def test_projection_lands_on_simplex(v):
    q = project_to_simplex(np.array(v))
    assert np.all(q >= 0) and q.sum() == pytest.approx(1.0, abs=1e-12)


# -- privacy ratio -----------------------------------------------------------


def test_ratio_krr_exact():
    assert verify_ldp_ratio(KRandomizedResponse(5, 0.7)) == pytest.approx(math.exp(0.7), abs=1e-12)


def test_ratio_hash_channel():
    params = HashChannelParams(2, 0.3, hash_seed=1)
    r = verify_ldp_ratio(hash_channel(params))
    assert r <= math.exp(0.3) * (1 + 1e-12)
    lam = params.lam
    assert 1 + lam * 2**2 / (1 - lam) == pytest.approx(math.exp(0.3), abs=1e-12)


def test_ratio_identity_is_infinite():
    assert verify_ldp_ratio(IdentityChannel(3)) == math.inf
    assert verify_ldp_ratio(hash_channel(HashChannelParams(1, math.inf, 0))) == math.inf


@given(st.integers(2, 16), st.floats(0.01, 5.0))
def test_ratio_never_exceeds_budget(k, a):
    assert verify_ldp_ratio(KRandomizedResponse(k, a)) <= math.exp(a) + 1e-9
    b = max(1, int(math.log2(k)))
    assert verify_ldp_ratio(hash_channel(HashChannelParams(b, a, 0))) == pytest.approx(math.exp(a), rel=1e-12)


# -- hash channel ------------------------------------------------------------


def test_lambda_example():
    assert hash_lambda(1, math.log(3)) == pytest.approx(0.5, abs=1e-15)
    assert hash_lambda(3, math.inf) == 1.0
    p = HashChannelParams(4, 1.0, 0)
    assert 0 < p.lam < 1
    with pytest.raises(ValueError):
        HashChannelParams(0, 1.0, 0)


def test_siphash_reference_vectors():
    k0 = int.from_bytes(bytes(range(8)), "little")
    k1 = int.from_bytes(bytes(range(8, 16)), "little")
    assert _siphash.siphash24(k0, k1, b"") == 0x726FDB47DD0E0E31
    assert _siphash.siphash24(k0, k1, bytes(range(15))) == 0xA129CA6149BE45E5


def test_vectorised_hash_matches_bytes(rng):
    params = HashChannelParams(8, 1.0, hash_seed=99)
    q = rng.integers(0, 2**40, 200)
    x = rng.integers(0, 2**40, 200)
    fast = keyed_hash_ints(params, q.astype(np.uint64), x.astype(np.uint64))
    slow = [keyed_hash(params, int(a), int_bytes(b)) for a, b in zip(q, x)]
    assert fast.tolist() == slow


def test_encoding_is_unambiguous():
    assert encode_pair(b"ab", b"c") != encode_pair(b"a", b"bc")


def test_equal_samples_equal_hash(rng):
    params = HashChannelParams(6, math.inf, hash_seed=5)
    for q in range(50):
        assert hash_response(b"sample", q, params, rng) == hash_response(b"sample", q, params, rng)


@pytest.mark.parametrize("b", [1, 4])
def test_distinct_inputs_collide_at_base_rate(b):
    params = HashChannelParams(b, math.inf, hash_seed=123)
    n = 1_000_000
    q = np.arange(n, dtype=np.uint64)
    x = np.arange(n, dtype=np.uint64)
    rate = np.mean(keyed_hash_ints(params, q, x) == keyed_hash_ints(params, q, x + np.uint64(n)))
    p = 2.0**-b
    assert abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_lambda_response_law(rng):
    params = HashChannelParams(2, 1.0, 0)
    ch = hash_channel(params)
    n = 400_000
    out = ch.apply(np.zeros(n, dtype=int), rng)
    emp = np.bincount(out, minlength=4) / n
    exact = ch.matrix()[0]
    assert np.all(np.abs(emp - exact) <= 3 * np.sqrt(exact * (1 - exact) / n))
    assert ch.bits == 2
