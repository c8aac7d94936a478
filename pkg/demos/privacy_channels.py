"""
Private channels and what the server sees
=========================================

Randomized response over k symbols, and the one-bit hash channel used by the
collision estimator. Both satisfy the likelihood-ratio bound exactly.
"""

import math

import numpy as np

from ldp_entropy.ldp import HashChannelParams, KRandomizedResponse, hash_channel, verify_ldp_ratio

rng = np.random.default_rng(0)

# keep-probability of randomized response shrinks toward 1/k as alpha falls
for alpha in (0.5, 1.0, 3.0):
    ch = KRandomizedResponse(4, alpha)
    print(f"alpha={alpha}: worst ratio {verify_ldp_ratio(ch):.4f} vs e^alpha {math.exp(alpha):.4f}")

# push 100k copies of symbol 2 through the channel and invert the noise
ch = KRandomizedResponse(4, 1.0)
reports = ch.apply(np.full(100_000, 2), rng)
print("report histogram:", np.bincount(reports, minlength=4) / reports.size)
print("debiased estimate:", ch.invert(np.bincount(reports, minlength=4)))

# the hash channel only ever leaks b bits
params = HashChannelParams(b=2, alpha=1.0, hash_seed=7)
print("hash channel lambda:", round(params.lam, 4), "ratio:", round(verify_ldp_ratio(hash_channel(params)), 6))
