"""Counter-based random number generation for reproducible parallel Monte Carlo.

Every random word consumed by a simulated path is produced by a Philox4x32-10
block cipher keyed by the run seed and addressed by
(path_index, step, substream, block).  Draws are therefore a pure function of
those coordinates: paths can be simulated in any order, on any number of
workers, and always reproduce bit-identically.

Substreams keep the different noise sources of one step independent:
``SUB_NORMAL`` feeds the Brownian increment and the small-jump Gaussian
surrogate, ``SUB_JUMP`` feeds the Poisson jump machinery (counts, sizes,
thinning uniforms).
"""

import hashlib

import numpy as np
from numba import njit

SUB_NORMAL = 0
SUB_JUMP = 1

_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_TWO_PI = 6.283185307179586


@njit(cache=True, nogil=True)
def _splitmix64(z):
    m64 = np.uint64(0xFFFFFFFFFFFFFFFF)
    z = np.uint64(z)
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & m64
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & m64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & m64
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def _philox4x32(c0, c1, c2, c3, k0, k1):
    """One Philox4x32-10 block; inputs/outputs are 32-bit values in uint64 slots."""
    m32 = np.uint64(0xFFFFFFFF)
    mul0 = np.uint64(0xD2511F53)
    mul1 = np.uint64(0xCD9E8D57)
    w0 = np.uint64(0x9E3779B9)
    w1 = np.uint64(0xBB67AE85)
    sh = np.uint64(32)
    c0 = np.uint64(c0)
    c1 = np.uint64(c1)
    c2 = np.uint64(c2)
    c3 = np.uint64(c3)
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    for _ in range(10):
        p0 = mul0 * c0
        hi0 = p0 >> sh
        lo0 = p0 & m32
        p1 = mul1 * c2
        hi1 = p1 >> sh
        lo1 = p1 & m32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + w0) & m32
        k1 = (k1 + w1) & m32
    return c0, c1, c2, c3


@njit(cache=True, nogil=True)
def _key_from_seed_u64(seed):
    s = _splitmix64(seed)
    return s & np.uint64(0xFFFFFFFF), (s >> np.uint64(32)) & np.uint64(0xFFFFFFFF)


def key_from_seed(seed):
    """Split a 64-bit seed into the two 32-bit Philox key words."""
    return _key_from_seed_u64(np.uint64(int(seed) % 2**64))


@njit(cache=True, nogil=True)
def uniform_pair(k0, k1, path_index, step, sub, block):
    """Two uniforms in (0, 1] from one Philox block (53-bit resolution).

    Counter layout: (path lo32, path hi32 ^ step hi32, step lo32,
    sub << 28 | block).
    """
    m32 = np.uint64(0xFFFFFFFF)
    sh = np.uint64(32)
    p = np.uint64(path_index)
    s = np.uint64(step)
    c0 = p & m32
    c1 = ((p >> sh) ^ (s >> sh)) & m32
    c2 = s & m32
    c3 = ((np.uint64(sub) << np.uint64(28)) | (np.uint64(block) & np.uint64(0x0FFFFFFF))) & m32
    y0, y1, y2, y3 = _philox4x32(c0, c1, c2, c3, np.uint64(k0), np.uint64(k1))
    w01 = (y0 << sh) | y1
    w23 = (y2 << sh) | y3
    u1 = ((w01 >> np.uint64(11)) + np.uint64(1)) * _INV53
    u2 = ((w23 >> np.uint64(11)) + np.uint64(1)) * _INV53
    return u1, u2


@njit(cache=True, nogil=True)
def normal_pair(k0, k1, path_index, step, sub, block):
    """Two independent standard normals (Box-Muller) from one Philox block."""
    u1, u2 = uniform_pair(k0, k1, path_index, step, sub, block)
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(_TWO_PI * u2), r * np.sin(_TWO_PI * u2)


@njit(cache=True, nogil=True)
def stream_next_uniform(k0, k1, path_index, step, sub, block, parity, buf):
    """Sequential uniform draws within one (path, step, substream).

    Functional state threading: returns (u, block, parity, buf).  Each Philox
    block yields two uniforms; ``parity``/``buf`` carry the unconsumed second
    word so callers draw one uniform at a time.
    """
    if parity == 1:
        return buf, block, 0, 0.0
    u1, u2 = uniform_pair(k0, k1, path_index, step, sub, block)
    return u1, block + 1, 1, u2


@njit(cache=True, nogil=True)
def stream_next_poisson(lam, k0, k1, path_index, step, sub, block, parity, buf):
    """Poisson draw by Knuth's product method, chunked to avoid exp underflow.

    Returns (count, block, parity, buf).
    """
    total = 0
    remaining = lam
    while remaining > 0.0:
        chunk = remaining if remaining < 500.0 else 500.0
        remaining -= chunk
        target = np.exp(-chunk)
        prod = 1.0
        while True:
            u, block, parity, buf = stream_next_uniform(
                k0, k1, path_index, step, sub, block, parity, buf
            )
            prod *= u
            if prod <= target:
                break
            total += 1
    return total, block, parity, buf


def derive_seed(seed, *labels):
    """Child seed for an internal sub-ensemble, stable across runs and platforms.

    Estimators that need mutually independent ensembles (e.g. the two legs of
    the first-passage decomposition check) derive one child per label chain.
    """
    h = hashlib.sha256()
    h.update(int(seed).to_bytes(8, "little", signed=False))
    for label in labels:
        h.update(b"\x00")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")
