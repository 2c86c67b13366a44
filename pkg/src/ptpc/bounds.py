"""Analytic statements about pre-transformed polar codes.

Everything here depends only on the rate-profile, except the union bound,
which takes a (truncated) weight spectrum.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

from .code_model import CodeSpec, is_decreasing_profile
from .enumerator import compute_coset_context, wmin_and_coset_indices


@dataclass(frozen=True)
class WeightSpectrum:
    """Sparse weight spectrum ``{w: A_w}`` with positive counts, sorted by weight."""

    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        terms = tuple((int(w), int(a)) for w, a in self.terms)
        for (w0, _), (w1, _) in zip(terms, terms[1:]):
            if w1 <= w0:
                raise ValueError("spectrum weights must be strictly increasing")
        if any(a <= 0 for _, a in terms):
            raise ValueError("spectrum counts must be positive")
        if any(w <= 0 for w, _ in terms):
            raise ValueError("spectrum weights must be positive")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_counts(cls, counts) -> WeightSpectrum:
        """From a mapping or a dense sequence indexed by weight; zero entries and ``w = 0`` dropped."""
        items = counts.items() if hasattr(counts, "items") else enumerate(counts)
        return cls(tuple(sorted((int(w), int(a)) for w, a in items if w > 0 and a)))

    @classmethod
    def parse(cls, text: str) -> WeightSpectrum:
        """``"8:620,12:13888"`` -> spectrum."""
        terms = []
        for part in text.split(","):
            w, sep, a = part.strip().partition(":")
            if not sep:
                raise ValueError(f"spectrum term {part!r} is not 'weight:count'")
            terms.append((int(w), int(a)))
        return cls(tuple(sorted(terms)))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, w: int) -> int:
        return dict(self.terms).get(w, 0)

    def truncate(self, count: int) -> WeightSpectrum:
        return WeightSpectrum(self.terms[:count])


def qfunc(x: float) -> float:
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt(2)) / 2``."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def union_bound_fer(spectrum: WeightSpectrum | Iterable[tuple[int, int]], rate: float, ebn0_db: float) -> float:
    """Union bound on the ML frame error rate for BPSK over AWGN."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    terms = list(spectrum)
    if not terms:
        raise ValueError("spectrum slice is empty")
    snr = 10.0 ** (ebn0_db / 10.0)
    return sum(float(a) * qfunc(math.sqrt(2.0 * w * rate * snr)) for w, a in terms)


@dataclass(frozen=True)
class CosetClassification:
    pretransformable: frozenset[int]
    non_pretransformable: frozenset[int]


def classify_cosets(spec: CodeSpec) -> CosetClassification:
    """Split the ``wmin`` cosets by whether any frozen row outside ``K_i`` follows ``i``."""
    _, cosets = wmin_and_coset_indices(spec)
    star, ring = set(), set()
    for i in cosets:
        (star if compute_coset_context(spec, i).pretransformable else ring).add(i)
    return CosetClassification(frozenset(star), frozenset(ring))


def lb_lemma3(spec: CodeSpec) -> int:
    """Count no pre-transform can remove: the full core count of every non-pre-transformable coset."""
    total = 0
    for i in classify_cosets(spec).non_pretransformable:
        ctx = compute_coset_context(spec, i)
        total += 1 << sum(1 for k in ctx.core if k in spec.info_set)
    return total


def lb_rm_closed_form(r: int) -> int:
    """Closed-form lower bound on ``A_dmin`` for RM(r, n) rate-profiles with ``r <= n - 2``."""
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    num = 8 * 2 ** (3 * r) - 6 * 2 ** (2 * r) + 2**r
    q, rem = divmod(num, 3)
    assert rem == 0, f"numerator {num} not divisible by 3"
    return q


def rm_unremovable_indices(r: int, n: int) -> list[int]:
    """Coset indices with support ``{x, y} | {r+2, ..., n-1}``, ``0 <= x < y <= r+1``.

    These cosets of RM(r, n) (``r <= n - 2``) have no frozen row outside
    their core rows.  The range of ``y`` is the one whose core counts sum to
    ``lb_rm_closed_form(r)``.
    """
    if not 0 <= r <= n - 2:
        raise ValueError(f"needs 0 <= r <= n - 2, got r={r}, n={n}")
    top = ((1 << n) - 1) ^ ((1 << (r + 2)) - 1)
    return sorted(top | (1 << x) | (1 << y) for y in range(1, r + 2) for x in range(y))


def dmin_statement(spec: CodeSpec) -> tuple[int, bool]:
    """``(wmin, exact)``: ``dmin >= wmin`` always, with equality for every ``T`` when ``exact``."""
    wmin, _ = wmin_and_coset_indices(spec)
    return wmin, is_decreasing_profile(spec)
