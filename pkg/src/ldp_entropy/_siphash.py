"""SipHash-2-4, a 128-bit keyed PRF.

``siphash24`` handles arbitrary byte strings. ``siphash24_words`` is a
compiled kernel for the fixed three-word messages produced when both the
salt and the sample are 64-bit integers; it agrees bit-for-bit with
``siphash24`` on those inputs.
"""

import numba
import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF


def _rotl(x, b):
    return ((x << b) | (x >> (64 - b))) & _MASK


def _round(v0, v1, v2, v3):
    v0 = (v0 + v1) & _MASK
    v1 = _rotl(v1, 13) ^ v0
    v0 = _rotl(v0, 32)
    v2 = (v2 + v3) & _MASK
    v3 = _rotl(v3, 16) ^ v2
    v0 = (v0 + v3) & _MASK
    v3 = _rotl(v3, 21) ^ v0
    v2 = (v2 + v1) & _MASK
    v1 = _rotl(v1, 17) ^ v2
    v2 = _rotl(v2, 32)
    return v0, v1, v2, v3


def siphash24(k0: int, k1: int, data: bytes) -> int:
    v0 = k0 ^ 0x736F6D6570736575
    v1 = k1 ^ 0x646F72616E646F6D
    v2 = k0 ^ 0x6C7967656E657261
    v3 = k1 ^ 0x7465646279746573
    n = len(data)
    full = n - n % 8
    for off in range(0, full, 8):
        m = int.from_bytes(data[off : off + 8], "little")
        v3 ^= m
        v0, v1, v2, v3 = _round(*_round(v0, v1, v2, v3))
        v0 ^= m
    last = ((n & 0xFF) << 56) | int.from_bytes(data[full:], "little")
    v3 ^= last
    v0, v1, v2, v3 = _round(*_round(v0, v1, v2, v3))
    v0 ^= last
    v2 ^= 0xFF
    for _ in range(4):
        v0, v1, v2, v3 = _round(v0, v1, v2, v3)
    return v0 ^ v1 ^ v2 ^ v3


@numba.njit(inline="always")
def _rotl_u64(x, b):
    return (x << np.uint64(b)) | (x >> np.uint64(64 - b))


@numba.njit(inline="always")
def _round_u64(v0, v1, v2, v3):
    v0 = v0 + v1
    v1 = _rotl_u64(v1, 13) ^ v0
    v0 = _rotl_u64(v0, 32)
    v2 = v2 + v3
    v3 = _rotl_u64(v3, 16) ^ v2
    v0 = v0 + v3
    v3 = _rotl_u64(v3, 21) ^ v0
    v2 = v2 + v1
    v1 = _rotl_u64(v1, 17) ^ v2
    v2 = _rotl_u64(v2, 32)
    return v0, v1, v2, v3


@numba.njit(cache=True)
def _words_kernel(k0, k1, w0, w1, w2, out):
    c0 = np.uint64(0x736F6D6570736575)
    c1 = np.uint64(0x646F72616E646F6D)
    c2 = np.uint64(0x6C7967656E657261)
    c3 = np.uint64(0x7465646279746573)
    last = np.uint64(24) << np.uint64(56)
    for t in range(out.shape[0]):
        v0 = k0 ^ c0
        v1 = k1 ^ c1
        v2 = k0 ^ c2
        v3 = k1 ^ c3
        for m in (w0[t], w1[t], w2[t], last):
            v3 ^= m
            v0, v1, v2, v3 = _round_u64(v0, v1, v2, v3)
            v0, v1, v2, v3 = _round_u64(v0, v1, v2, v3)
            v0 ^= m
        v2 ^= np.uint64(0xFF)
        for _ in range(4):
            v0, v1, v2, v3 = _round_u64(v0, v1, v2, v3)
        out[t] = v0 ^ v1 ^ v2 ^ v3


def siphash24_words(k0: int, k1: int, w0, w1, w2) -> np.ndarray:
    """Hash the 24-byte messages ``w0 || w1 || w2`` (little-endian words)."""
    w0, w1, w2 = np.broadcast_arrays(
        np.asarray(w0, dtype=np.uint64),
        np.asarray(w1, dtype=np.uint64),
        np.asarray(w2, dtype=np.uint64),
    )
    out = np.empty(w0.shape, dtype=np.uint64)
    _words_kernel(
        np.uint64(k0),
        np.uint64(k1),
        np.ascontiguousarray(w0).ravel(),
        np.ascontiguousarray(w1).ravel(),
        np.ascontiguousarray(w2).ravel(),
        out.ravel(),
    )
    return out
