"""Compiled coset walk on messages stored as ``uint64`` word arrays.

Mirrors ``_CosetWalker.count`` step for step (same visiting order, same
counters); the recursion becomes an explicit stack of message copies.
"""

from __future__ import annotations

import numba as nb
import numpy as np

FREE_CORE = 0
FROZEN_CORE = 1


def to_words(x: int, nwords: int) -> np.ndarray:
    return np.frombuffer(x.to_bytes(8 * nwords, "little"), dtype="<u8").astype(np.uint64)


@nb.njit(cache=True)
def _set_bit(u, b):
    u[b >> 6] |= np.uint64(1) << np.uint64(b & 63)


@nb.njit(cache=True)
def _update(i, j, src, dst, x, zero_at, W):
    """``dst = update(i, j, src)``; ``x`` is scratch space."""
    a = 63
    nij = ~i & j
    while not (nij >> a) & 1:
        a -= 1
    # window (i, j) of src restricted to positions with bit a clear
    lo = i + 1
    for w in range(W):
        base = w * 64
        m = np.uint64(0xFFFFFFFFFFFFFFFF)
        if base + 64 <= lo or base >= j:
            m = np.uint64(0)
        else:
            if lo > base:
                m &= np.uint64(0xFFFFFFFFFFFFFFFF) << np.uint64(lo - base)
            if j < base + 64:
                m &= (np.uint64(1) << np.uint64(j - base)) - np.uint64(1)
        x[w] = src[w] & m & zero_at[a, w]
    _shift_up(x, a, W)
    dropped = i & ~j
    d = 0
    while dropped:
        if dropped & 1:
            _merge_down(x, zero_at, d, W)
        dropped >>= 1
        d += 1
    for w in range(W):
        dst[w] = src[w] ^ x[w]
    _set_bit(dst, j)


@nb.njit(cache=True)
def _shift_up(x, a, W):
    s = 1 << a
    if s < 64:
        for w in range(W):
            x[w] = x[w] << np.uint64(s)
    else:
        k = s >> 6
        for w in range(W - 1, -1, -1):
            x[w] = x[w - k] if w >= k else np.uint64(0)


@nb.njit(cache=True)
def _merge_down(x, zero_at, d, W):
    """``x = (x & z) ^ ((x & ~z) >> 2**d)`` with ``z`` the positions whose bit ``d`` is clear."""
    s = 1 << d
    if s < 64:
        for w in range(W):
            z = zero_at[d, w]
            x[w] = (x[w] & z) ^ ((x[w] & ~z) >> np.uint64(s))
    else:
        k = s >> 6
        for w in range(W):
            z = zero_at[d, w]
            hi = np.uint64(0)
            if w + k < W:
                hi = x[w + k] & ~zero_at[d, w + k]
            x[w] = (x[w] & z) ^ hi


@nb.njit(cache=True)
def _parity(u, c, W):
    p = np.uint64(0)
    for w in range(W):
        p ^= u[w] & c[w]
    p ^= p >> np.uint64(32)
    p ^= p >> np.uint64(16)
    p ^= p >> np.uint64(8)
    p ^= p >> np.uint64(4)
    p ^= p >> np.uint64(2)
    p ^= p >> np.uint64(1)
    return p & np.uint64(1)


@nb.njit(cache=True)
def walk(i, pos, kinds, checks, zero_at, W):
    """Returns ``(paths, visited_subtrees, message_updates, pretransform_checks)``."""
    L = pos.shape[0]
    U = np.zeros((L + 2, W), dtype=np.uint64)
    x = np.zeros(W, dtype=np.uint64)
    nxt = np.zeros(L + 2, dtype=np.int64)
    total = np.zeros(L + 2, dtype=np.int64)
    visited = 1
    updates = 1
    nchecks = 0
    _set_bit(U[0], i)
    d = 0
    while True:
        k = nxt[d]
        descended = False
        finished = -1
        while k < L:
            kind = kinds[k]
            if kind == FREE_CORE:
                nxt[d] = k + 1
                _update(i, pos[k], U[d], U[d + 1], x, zero_at, W)
                visited += 1
                updates += 1
                nxt[d + 1] = k + 1
                total[d + 1] = 0
                d += 1
                descended = True
                break
            nchecks += 1
            if _parity(U[d], checks[k], W):
                if kind == FROZEN_CORE:
                    updates += 1
                    _update(i, pos[k], U[d], U[d], x, zero_at, W)
                else:
                    finished = total[d]
                    break
            k += 1
        if descended:
            continue
        if finished < 0:
            finished = total[d] + 1
        if d == 0:
            return finished, visited, updates, nchecks
        d -= 1
        total[d] += finished
