"""Exact multidimensional cyclic convolution via a number-theoretic transform.

The transform works over Z/pZ for a prime p with

* p = 1 (mod lcm of the axis lengths), so every axis has a primitive root, and
* p > the largest possible convolution value, so counts are recovered exactly.

p is kept below 2**31 so that a product of two reduced residues fits in int64.
Each axis is transformed by a mixed-radix Cooley-Tukey recursion over the prime
factors of its length (radix 4 where the length allows), with direct DFTs at
the leaves.  Axes of length 2 are plain add/subtract butterflies, so reduction
mod p is deferred for them while the magnitude bound stays far from int64
overflow.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from sympy import factorint, isprime, primitive_root

MAX_MODULUS = 1 << 31
_LAZY_LIMIT = 1 << 61


@lru_cache(maxsize=None)
def ntt_modulus(lcm: int, bound: int) -> tuple[int, int]:
    """Smallest prime p = m*lcm + 1 > bound (and < 2**31), with a primitive root."""
    m = bound // lcm + 1
    while True:
        p = m * lcm + 1
        if p >= MAX_MODULUS:
            raise OverflowError(f"no NTT prime below 2**31 for lcm={lcm}, bound={bound}")
        if isprime(p):
            return p, int(primitive_root(p))
        m += 1


@lru_cache(maxsize=None)
def _smallest_prime_factor(n: int) -> int:
    return min(factorint(n))


@lru_cache(maxsize=256)
def _powers(root: int, rows: int, cols: int, p: int) -> np.ndarray:
    return np.array([[pow(root, r * c, p) for c in range(cols)] for r in range(rows)], dtype=np.int64)


def _direct(z: np.ndarray, root: int, p: int) -> np.ndarray:
    """DFT along axis 1 of a reduced (pre, q, post) array."""
    q = z.shape[1]
    out = np.empty_like(z)
    if q == 2:
        # root = -1: a butterfly
        np.add(z[:, 0, :], z[:, 1, :], out=out[:, 0, :])
        np.subtract(z[:, 0, :], z[:, 1, :], out=out[:, 1, :])
        return out % p
    if q == 4:
        # root = i with i^2 = -1
        a, b, c, d = (z[:, j, :] for j in range(4))
        t0, t1, t2 = a + c, a - c, b + d
        t3 = ((b - d) * root) % p
        np.add(t0, t2, out=out[:, 0, :])
        np.add(t1, t3, out=out[:, 1, :])
        np.subtract(t0, t2, out=out[:, 2, :])
        np.subtract(t1, t3, out=out[:, 3, :])
        return out % p
    w = _powers(root, q, q, p)
    for k in range(q):
        acc = z[:, 0, :].copy()
        for j in range(1, q):
            acc += (z[:, j, :] * w[k, j]) % p
            if j % 4 == 3:
                acc %= p
        out[:, k, :] = acc % p
    return out


def _dft_mid(z: np.ndarray, root: int, p: int) -> np.ndarray:
    """DFT along axis 1 of a reduced (pre, n, post) array; root has order n."""
    pre, n, post = z.shape
    if n == 1:
        return z
    q = _smallest_prime_factor(n)
    if q == 2 and n % 4 == 0:
        q = 4
    if q == n:
        return _direct(z, root, p)
    m = n // q
    # input index j = m*j1 + j2
    z4 = z.reshape(pre, q, m * post)
    z4 = _direct(z4, pow(root, m, p), p).reshape(pre, q, m, post)
    tw = _powers(root, q, m, p)
    z4 = (z4 * tw[None, :, :, None]) % p
    inner = _dft_mid(z4.reshape(pre * q, m, post), pow(root, q, p), p)
    # inner[pre, k1, k2, post] holds output index k1 + q*k2
    inner = inner.reshape(pre, q, m, post).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(inner).reshape(pre, n, post)


def _transform(x: np.ndarray, shape: tuple[int, ...], roots: list[int], p: int, bound: int):
    """Apply the per-axis DFTs to a flat array; returns (array, magnitude bound)."""
    total = x.size
    pre = 1
    for n, root in zip(shape, roots):
        post = total // (pre * n)
        if n == 2:
            if bound >= _LAZY_LIMIT:
                x = x % p
                bound = p
            z = x.reshape(pre, 2, post)
            out = np.empty_like(z)
            np.add(z[:, 0, :], z[:, 1, :], out=out[:, 0, :])
            np.subtract(z[:, 0, :], z[:, 1, :], out=out[:, 1, :])
            x = out.reshape(-1)
            bound *= 2
        elif n > 1:
            if bound >= p:
                x = x % p
            x = _dft_mid(x.reshape(pre, n, post), root, p).reshape(-1)
            bound = p
        pre *= n
    return x, bound


def cyclic_convolve(a: np.ndarray, b: np.ndarray, shape: tuple[int, ...], bound: int) -> np.ndarray:
    """Exact cyclic convolution of two 0/1 (or small non-negative) arrays of ``shape``.

    ``bound`` must be at least the largest entry of the result.
    """
    shape = tuple(shape) or (1,)
    lcm = math.lcm(1, *shape)
    p, g = ntt_modulus(lcm, max(bound, 1))
    fwd = [pow(g, (p - 1) // d, p) for d in shape]
    inv = [pow(w, p - 2, p) for w in fwd]
    a = np.asarray(a, dtype=np.int64).reshape(-1)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    fa, ba = _transform(a, shape, fwd, p, max(int(a.max(initial=0)), 1))
    fb, bb = _transform(b, shape, fwd, p, max(int(b.max(initial=0)), 1))
    if ba * bb >= _LAZY_LIMIT:
        if ba >= p:
            fa = fa % p
        if bb >= p:
            fb = fb % p
        prod = (fa * fb) % p
        bp = p
    else:
        prod = fa * fb
        bp = ba * bb
    out, _ = _transform(prod, shape, inv, p, bp)
    n_inv = pow(math.prod(shape), p - 2, p)
    out = out % p
    return ((out * n_inv) % p).reshape(shape)
