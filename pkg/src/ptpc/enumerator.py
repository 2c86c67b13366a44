"""Counting the ``wmin``-weight codewords of a pre-transformed polar code.

The code splits into cosets ``C_i`` (first nonzero message bit at ``i``).
Only cosets whose leader ``g_i`` has the smallest row weight can hold
``wmin``-weight words.  Inside such a coset the messages that reach weight
``wmin`` are exactly ``g_i`` plus any subset of core rows ``K_i`` plus the
balancing rows those core rows force; the messages admitted by ``(I, T)``
are fixed by the frozen-bit parities.  Walking both constraint sets at
once, bit position by bit position, visits every surviving message once.

Messages are packed ints (bit ``h`` is ``u_h``), so copying a message on
branch entry is free.
"""

from __future__ import annotations

import os
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernel, bitops
from .code_model import CodeSpec, PreTransform, _butterfly_masks, iter_bits, systematize

# position kinds inside a coset walk
_FREE_CORE = 0
_FROZEN_CORE = 1
_FROZEN_OTHER = 2


@dataclass
class EnumerationStats:
    visited_subtrees: int = 0
    message_updates: int = 0
    pretransform_checks: int = 0

    def __iadd__(self, other: EnumerationStats) -> EnumerationStats:
        self.visited_subtrees += other.visited_subtrees
        self.message_updates += other.message_updates
        self.pretransform_checks += other.pretransform_checks
        return self

    def as_dict(self) -> dict[str, int]:
        return {
            "visited_subtrees": self.visited_subtrees,
            "message_updates": self.message_updates,
            "pretransform_checks": self.pretransform_checks,
        }


@dataclass(frozen=True)
class CosetContext:
    """Per-coset index sets.

    ``f_star`` is the last frozen position that is not a core row (or ``i``
    if there is none); past it every frozen position is a core row, so the
    remaining tree is perfect and contributes a factor ``2**free_count``.
    """

    i: int
    n: int
    core: tuple[int, ...]
    f_star: int
    ring: tuple[int, ...]
    free_count: int

    @property
    def pretransformable(self) -> bool:
        return self.f_star != self.i


@dataclass
class EnumerationResult:
    wmin: int
    awmin: int
    per_coset: dict[int, int]
    stats: EnumerationStats = field(default_factory=EnumerationStats)
    aborted: bool = False

    @property
    def dmin_exceeds_wmin(self) -> bool:
        """All ``wmin``-weight words were removed by the pre-transform."""
        return not self.aborted and self.awmin == 0


def wmin_and_coset_indices(spec: CodeSpec) -> tuple[int, list[int]]:
    low = min(i.bit_count() for i in spec.info)
    return 1 << low, [i for i in spec.info if i.bit_count() == low]


def core_indices(i: int, n: int) -> list[int]:
    """``K_i``, generated directly rather than by scanning ``(i, N)``.

    ``j`` is a core row iff it has exactly one bit ``l`` outside ``supp(i)``;
    ``j > i`` then forces every bit of ``i`` above ``l`` to be kept.
    """
    out = []
    for l in range(n):
        bit = 1 << l
        if i & bit:
            continue
        high = (i >> (l + 1)) << (l + 1)
        low = bitops.support(i & (bit - 1))
        base = high | bit
        for r in range(len(low) + 1):
            for sub in combinations(low, r):
                out.append(base | sum(1 << s for s in sub))
    out.sort()
    return out


def core_count_decreasing(i: int, n: int) -> int:
    """``|I & K_i|`` when ``i`` has the least weight in a decreasing profile.

    Then ``I & K_i`` holds every core row of weight at least ``w(i)``:
    zero bits of ``i`` plus, for each one bit, the zero bits above it.
    """
    zeros = [l for l in range(n) if not i >> l & 1]
    return len(zeros) + sum(1 for l in range(n) if i >> l & 1 for z in zeros if z > l)


def compute_coset_context(spec: CodeSpec, i: int) -> CosetContext:
    if i not in spec.info_set:
        raise ValueError(f"coset index {i} is not an information index")
    n = spec.n
    core = core_indices(i, n)
    core_set = set(core)
    f_star = i
    frozen = spec.frozen
    for idx in range(len(frozen) - 1, bisect_right(frozen, i) - 1, -1):
        f = frozen[idx]
        if f not in core_set:
            f_star = f
            break
    ring = tuple(k for k in core if k > f_star)
    info = spec.info_set
    return CosetContext(i, n, tuple(core), f_star, ring, sum(1 for k in ring if k in info))


def update_message(i: int, j: int, u: int, n: int, stats: EnumerationStats | None = None) -> int:
    """Add core row ``j`` to message ``u`` of coset ``i``, toggling the balancing rows it forces."""
    if j <= i:
        raise ValueError(f"core row {j} must follow the coset index {i}")
    if not bitops.is_core(i, j, n):
        raise ValueError(f"row {j} is not a core row of coset {i}")
    if not u >> i & 1 or u & bitops.mask(i):
        raise ValueError(f"message must start at position {i}")
    if u >> j & 1:
        raise ValueError(f"core row {j} is already part of the message")
    ni = ~i & bitops.mask(n)
    for k in iter_bits(u >> (i + 1)):
        k += i + 1
        if k > j and (ni & k).bit_count() == 1:
            raise ValueError(f"core rows must be added in increasing order; {k} > {j} already present")
    if stats is not None:
        stats.message_updates += 1
    return _update_masks(i, j, u, _butterfly_masks(n))


def _update(i: int, j: int, u: int, ni: int) -> int:
    """Reference form of the update: one toggle per qualifying set bit of ``u``."""
    nij = ni & j
    window = (u >> (i + 1)) & ((1 << (j - i - 1)) - 1)
    while window:
        low = window & -window
        window ^= low
        k = low.bit_length() + i
        if not nij & k:
            u ^= 1 << ((ni & (j | k)) | (j & k))
    return u | (1 << j)


def _update_masks(i: int, j: int, u: int, zero_at: tuple[int, ...]) -> int:
    """Same result as ``_update``, computed on the whole window at once.

    ``mu_i(j, k)`` is ``k`` with ``j``'s outside bit ``a`` raised and the
    bits of ``i`` that ``j`` lacks cleared, so the toggle pattern is a
    shifted copy of the window; colliding toggles cancel, hence the XOR merge.
    """
    a = (~i & j).bit_length() - 1
    x = (u & ((1 << j) - (2 << i)) & zero_at[a]) << (1 << a)
    dropped = i & ~j
    while dropped:
        low = dropped & -dropped
        dropped ^= low
        d = low.bit_length() - 1
        z = zero_at[d]
        hi = x & ~z
        x = (x & z) ^ (hi >> (1 << d))
    return (u ^ x) | (1 << j)


class _CosetWalker:
    """Shared per-code tables for walking the cosets of one ``(I, T_sys)``."""

    def __init__(self, spec: CodeSpec, T_sys: PreTransform):
        self.spec = spec
        self.n = spec.n
        self.frozen = spec.frozen
        self.info = spec.info_set
        cols = T_sys.columns
        # parity-check vector of frozen position f: its column over rows < f plus u_f itself
        self.checks = {f: cols.get(f, 0) | (1 << f) for f in spec.frozen}
        self.zero_at = _butterfly_masks(spec.n)
        self.nwords = (spec.N + 63) // 64
        self.zero_words = np.stack([_kernel.to_words(z, self.nwords) for z in self.zero_at])
        self.check_words: dict[int, np.ndarray] = {}

    def positions(self, ctx: CosetContext, stop: int, live: int | None = None):
        """Positions in ``(i, stop]`` that matter to the walk, with kind and check vector.

        ``live`` (a position bitmask) keeps only the frozen positions it marks.
        """
        i = ctx.i
        ni = ~i & bitops.mask(self.n)
        frozen = self.frozen[bisect_right(self.frozen, i) : bisect_right(self.frozen, stop)]
        if live is not None:
            frozen = [f for f in frozen if live >> f & 1]
        info = self.info
        free = [k for k in ctx.core[: bisect_right(ctx.core, stop)] if k in info]
        merged = sorted([*frozen, *free])
        kinds = []
        checks = []
        for k in merged:
            if k in info:
                kinds.append(_FREE_CORE)
                checks.append(0)
            else:
                kinds.append(_FROZEN_CORE if (ni & k).bit_count() == 1 else _FROZEN_OTHER)
                checks.append(self.checks[k])
        return merged, kinds, checks

    def prune(self, ctx: CosetContext) -> tuple[int, int, bool]:
        """Static analysis of which frozen checks can ever fire in coset ``ctx.i``.

        Every bit a coset message ever sets is ``i``, a core row that gets
        added, or ``mu_i(j, k)`` for an added core row ``j`` and an earlier
        reachable ``k``.  Propagating that reachable set over whole position
        bitmasks gives a superset of every message's support.  A check whose
        vector misses it (apart from the always-set ``i``) has a constant
        outcome.

        Returns ``(stop, live, dead)``: the last frozen non-core position that
        can still veto a path, the bitmask of frozen positions worth checking,
        and whether some check vetoes every path.
        """
        i = ctx.i
        n = self.n
        N = 1 << n
        full = bitops.mask(N)
        zero_at = self.zero_at
        info = self.info
        checks = self.checks
        ibit = 1 << i
        S = i
        reach = ibit
        live = 0
        for j in ctx.core:
            if j not in info:
                chk = checks[j]
                if not (chk & ibit or chk & reach & ~ibit):
                    continue
                live |= 1 << j
            # toggles mu_i(j, k) for reachable k in (i, j) with k_a = 0
            x = reach & (bitops.mask(j) ^ bitops.mask(i + 1))
            a = (~S & j).bit_length() - 1
            x = (x & zero_at[a]) << (1 << a)
            dropped = S & ~j
            while dropped:
                low = dropped & -dropped
                dropped ^= low
                d = low.bit_length() - 1
                z = zero_at[d]
                x = (x & z) | ((x & ~z & full) >> (1 << d))
            reach |= x | (1 << j)
        stop = i
        dead = False
        core = set(ctx.core)
        for f in self.frozen[bisect_right(self.frozen, i) :]:
            if f in core:
                continue
            chk = checks[f]
            if chk & reach & ~ibit:
                live |= 1 << f
                stop = f
            elif chk & ibit:
                dead = True
                break
        return stop, live, dead

    def count(self, ctx: CosetContext, stats: EnumerationStats, stop: int | None = None, live: int | None = None) -> int:
        """Number of surviving paths up to ``stop`` (default ``f_star``), without the perfect-tail factor."""
        pos, kinds, checks = self.positions(ctx, ctx.f_star if stop is None else stop, live)
        W = self.nwords
        chk = np.zeros((len(pos), W), dtype=np.uint64)
        for idx, (p, c) in enumerate(zip(pos, checks)):
            if c:
                words = self.check_words.get(p)
                if words is None:
                    words = self.check_words[p] = _kernel.to_words(c, W)
                chk[idx] = words
        paths, visited, updates, nchecks = _kernel.walk(
            ctx.i, np.array(pos, dtype=np.int64), np.array(kinds, dtype=np.int8), chk, self.zero_words, W
        )
        stats.visited_subtrees += int(visited)
        stats.message_updates += int(updates)
        stats.pretransform_checks += int(nchecks)
        return int(paths)

    def count_reference(
        self, ctx: CosetContext, stats: EnumerationStats, stop: int | None = None, live: int | None = None
    ) -> int:
        """Pure-Python form of ``count`` on packed ints; same result and counters."""
        i = ctx.i
        pos, kinds, checks = self.positions(ctx, ctx.f_star if stop is None else stop, live)
        L = len(pos)
        upd = _update_masks
        zero_at = self.zero_at
        visited = updates = nchecks = 0

        def subtree(start: int, j: int, u: int) -> int:
            nonlocal visited, updates, nchecks
            visited += 1
            updates += 1
            u = upd(i, j, u, zero_at) if j != i else u | (1 << i)
            total = 0
            for idx in range(start, L):
                kind = kinds[idx]
                if kind == _FREE_CORE:
                    total += subtree(idx + 1, pos[idx], u)
                    continue
                nchecks += 1
                if (u & checks[idx]).bit_count() & 1:
                    if kind == _FROZEN_CORE:
                        updates += 1
                        u = upd(i, pos[idx], u, zero_at)
                    else:
                        return total
            return total + 1

        paths = subtree(0, i, 0)
        stats.visited_subtrees += visited
        stats.message_updates += updates
        stats.pretransform_checks += nchecks
        return paths

    def messages(self, ctx: CosetContext):
        """Every full message ``u`` of the coset whose codeword has weight ``wmin``."""
        i = ctx.i
        ni = ~i & bitops.mask(self.n)
        pos, kinds, checks = self.positions(ctx, self.spec.N - 1)
        L = len(pos)

        def walk(start, j, u):
            u = _update(i, j, u, ni) if j != i else u | (1 << i)
            for idx in range(start, L):
                kind = kinds[idx]
                if kind == _FREE_CORE:
                    yield from walk(idx + 1, pos[idx], u)
                elif (u & checks[idx]).bit_count() & 1:
                    if kind == _FROZEN_CORE:
                        u = _update(i, pos[idx], u, ni)
                    else:
                        return
            yield u

        yield from walk(0, i, 0)


def enumerate_coset(
    spec: CodeSpec,
    T_sys: PreTransform,
    ctx: CosetContext,
    stats: EnumerationStats | None = None,
    *,
    shortcircuit: bool = True,
    walker: _CosetWalker | None = None,
) -> int:
    """``|Q_{i,wmin}(I, T)|`` for one coset.

    With ``shortcircuit=False`` this is the plain tree walk up to ``f_star``
    times ``2**free_count``, and the counters in ``stats`` follow that walk
    step for step.  With ``shortcircuit=True`` cosets without a vetoing
    frozen position return at once, and frozen checks that provably never
    fire are dropped first (see ``_CosetWalker.prune``), which moves the
    start of the perfect tail forward.  Counts are identical either way.
    """
    if not T_sys.systematized:
        raise ValueError("enumerate_coset needs a systematized transform")
    if stats is None:
        stats = EnumerationStats()
    if shortcircuit and not ctx.pretransformable:
        # no frozen position can veto: the whole coset tree is perfect
        return 1 << ctx.free_count
    walker = walker or _CosetWalker(spec, T_sys)
    if not shortcircuit:
        return walker.count(ctx, stats) << ctx.free_count
    stop, live, dead = walker.prune(ctx)
    if dead:
        return 0
    tail = sum(1 for k in ctx.core if k > stop and k in walker.info)
    if stop == ctx.i:
        return 1 << tail
    return walker.count(ctx, stats, stop, live) << tail


def min_weight_messages(spec: CodeSpec, T: PreTransform, i: int):
    """Yield the packed messages ``u`` of coset ``i`` that encode to weight ``wmin``."""
    T_sys = systematize(T, spec)
    yield from _CosetWalker(spec, T_sys).messages(compute_coset_context(spec, i))


# --------------------------------------------------------------------------- whole code

_worker_state: dict = {}


def _init_worker(spec, T_sys, shortcircuit):
    _worker_state["args"] = (spec, T_sys, shortcircuit, _CosetWalker(spec, T_sys))


def _run_cosets(cosets):
    spec, T_sys, shortcircuit, walker = _worker_state["args"]
    return _count_cosets(spec, T_sys, cosets, shortcircuit, walker, None)


def _count_cosets(spec, T_sys, cosets, shortcircuit, walker, limit):
    stats = EnumerationStats()
    per_coset = {}
    running = 0
    for i in cosets:
        ctx = compute_coset_context(spec, i)
        c = enumerate_coset(spec, T_sys, ctx, stats, shortcircuit=shortcircuit, walker=walker)
        per_coset[i] = c
        running += c
        if limit is not None and running > limit:
            return per_coset, stats, True
    return per_coset, stats, False


def count_min_weight(
    spec: CodeSpec,
    T: PreTransform,
    *,
    shortcircuit: bool = True,
    workers: int = 1,
    limit: int | None = None,
) -> EnumerationResult:
    """Number of ``wmin``-weight codewords of the code ``(spec, T)``.

    ``limit`` aborts the count as soon as the running total exceeds it; the
    result then carries ``aborted=True`` and a partial ``awmin``.
    ``workers > 1`` distributes cosets over processes; counts and counters
    do not depend on the split.
    """
    T_sys = systematize(T, spec)
    wmin, cosets = wmin_and_coset_indices(spec)
    if workers is None or workers < 1:
        workers = os.cpu_count() or 1
    if workers > 1 and limit is None and len(cosets) >= 2 * workers:
        chunks = [cosets[w::workers] for w in range(workers)]
        per_coset: dict[int, int] = {}
        stats = EnumerationStats()
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(spec, T_sys, shortcircuit)) as pool:
            for part, part_stats, _ in pool.map(_run_cosets, chunks):
                per_coset.update(part)
                stats += part_stats
        per_coset = dict(sorted(per_coset.items()))
        aborted = False
    else:
        walker = _CosetWalker(spec, T_sys)
        per_coset, stats, aborted = _count_cosets(spec, T_sys, cosets, shortcircuit, walker, limit)
    return EnumerationResult(wmin, sum(per_coset.values()), per_coset, stats, aborted)
