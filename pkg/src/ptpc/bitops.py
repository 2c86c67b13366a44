"""Bit arithmetic on polar row indices.

A row index ``i`` of ``G_N`` (``N = 2**n``) is a plain ``int`` in ``[0, N)``.
Its binary expansion doubles as a monomial: bit ``l`` set means the variable
``x_l`` is present.  Everything here is a handful of word operations.
"""

from __future__ import annotations

from functools import lru_cache


def mask(n: int) -> int:
    return (1 << n) - 1


def weight(i: int) -> int:
    return i.bit_count()


def support(i: int) -> list[int]:
    """Positions of the set bits of ``i``, least significant first."""
    out = []
    l = 0
    while i:
        if i & 1:
            out.append(l)
        i >>= 1
        l += 1
    return out


def row_weight(i: int) -> int:
    """Hamming weight of row ``g_i`` of ``G_N``."""
    return 1 << i.bit_count()


def merged_row_weight(i: int, j: int) -> int:
    """Hamming weight of ``g_i xor g_j``."""
    if i == j:
        raise ValueError(f"merged_row_weight needs distinct rows, got i = j = {i}")
    return (1 << i.bit_count()) + (1 << j.bit_count()) - (1 << ((i & j).bit_count() + 1))


def is_core(i: int, j: int, n: int) -> bool:
    """True iff adding ``g_j`` to ``g_i`` keeps the weight of ``g_i`` (``j > i``)."""
    if j <= i:
        raise ValueError(f"is_core needs j > i, got i={i}, j={j}")
    return (~i & j & mask(n)).bit_count() == 1


def mu(i: int, j: int, k: int, n: int) -> int:
    """Index of the balancing row forced by core rows ``j`` and ``k`` of coset ``i``."""
    m = mask(n)
    if not i < min(j, k):
        raise ValueError(f"mu needs i < min(j, k), got i={i}, j={j}, k={k}")
    if ~i & j & k & m:
        raise ValueError(f"mu needs (not i) & j & k == 0, got i={i}, j={j}, k={k}")
    return ((~i & (j | k)) | (j & k)) & m


def upward_steps(i: int, n: int):
    """Indices reachable from ``i`` by one generator step of the partial order.

    The two generators are raising a zero bit (binary domination) and moving a
    one bit up by one position into a zero (left swap).
    """
    for l in range(n):
        bit = 1 << l
        if not i & bit:
            yield i | bit
        elif l + 1 < n and not i & (bit << 1):
            yield i ^ bit ^ (bit << 1)


@lru_cache(maxsize=4096)
def upset(i: int, n: int) -> frozenset[int]:
    """All ``j`` with ``i`` preceding-or-equal ``j``, by generator reachability."""
    seen = {i}
    stack = [i]
    while stack:
        h = stack.pop()
        for j in upward_steps(h, n):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return frozenset(seen)


def partial_order_leq(i: int, j: int, n: int) -> bool:
    """Polar partial order: is bit channel ``j`` at least as reliable as ``i``?"""
    if i == j:
        return True
    # every generator step increases both the index and the bit-weighted sum
    if j < i or weight(j) < weight(i):
        return False
    return j in upset(i, n)
