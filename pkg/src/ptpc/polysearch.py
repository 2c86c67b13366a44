"""Exhaustive search for PAC polynomials with the fewest minimum-weight codewords."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .code_model import CodeSpec, PacPolynomial, pac_transform
from .enumerator import count_min_weight


@dataclass(frozen=True)
class Candidate:
    polynomial: PacPolynomial
    awmin: int

    @property
    def key(self) -> tuple[int, int, int, int]:
        """Total tie-break order: count, degree, nonzero taps, numeric value."""
        p = self.polynomial
        return (self.awmin, p.degree, p.nonzeros, p.value)


@dataclass
class SearchReport:
    best_polynomial: PacPolynomial
    best_awmin: int
    ties_considered: int
    search_space: tuple[int, int]
    evaluated: int = 0
    aborted: int = 0
    ranked: list[Candidate] = field(default_factory=list)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "polynomial", "degree", "nonzeros", "awmin"])
        for rank, c in enumerate(self.ranked, 1):
            p = c.polynomial
            w.writerow([rank, p.octal, p.degree, p.nonzeros, c.awmin])
        return buf.getvalue()


def candidates(min_degree: int, max_degree: int) -> list[PacPolynomial]:
    """All ``p`` with ``p_0 = p_q = 1`` and ``min_degree <= q <= max_degree``.

    Ordered by degree, then number of nonzero taps, then value, so the first
    strict improvement met in a single pass is the tie-break winner.
    """
    if min_degree < 0 or max_degree < min_degree:
        raise ValueError(f"invalid degree range [{min_degree}, {max_degree}]")
    out = []
    for q in range(min_degree, max_degree + 1):
        if q == 0:
            out.append(PacPolynomial(1))
            continue
        vals = [(1 << q) | (mid << 1) | 1 for mid in range(1 << (q - 1))]
        vals.sort(key=lambda v: (v.bit_count(), v))
        out.extend(PacPolynomial(v) for v in vals)
    return out


def _evaluate(args) -> tuple[int, int, bool]:
    spec, value, limit = args
    res = count_min_weight(spec, pac_transform(spec, PacPolynomial(value)), limit=limit)
    return value, res.awmin, res.aborted


def search_optimal_polynomial(
    spec: CodeSpec,
    max_degree: int,
    *,
    min_degree: int = 0,
    early_abort: bool = True,
    top: int = 10,
    workers: int = 1,
) -> SearchReport:
    """Best PAC polynomial for ``spec`` with degree in ``[min_degree, max_degree]``.

    With ``early_abort`` (sequential runs only) a candidate stops counting as
    soon as its partial sum passes the incumbent; those candidates are left
    out of the ranking.  Candidates that tie the incumbent are counted
    in full and reported in ``ties_considered``.
    """
    max_degree = min(max_degree, spec.N - 1)
    pool = candidates(min_degree, max_degree)
    if workers is None or workers < 1:
        workers = os.cpu_count() or 1

    results: list[tuple[int, int, bool]] = []
    if workers > 1 and len(pool) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_evaluate, [(spec, p.value, None) for p in pool], chunksize=4))
    else:
        incumbent = None
        for p in pool:
            limit = incumbent if early_abort else None
            r = _evaluate((spec, p.value, limit))
            results.append(r)
            if not r[2] and (incumbent is None or r[1] < incumbent):
                incumbent = r[1]

    done = [Candidate(PacPolynomial(v), a) for v, a, aborted in results if not aborted]
    done.sort(key=lambda c: c.key)
    best = done[0]
    ties = sum(1 for c in done if c.awmin == best.awmin) - 1
    return SearchReport(
        best_polynomial=best.polynomial,
        best_awmin=best.awmin,
        ties_considered=ties,
        search_space=(min_degree, max_degree),
        evaluated=len(results),
        aborted=len(results) - len(done),
        ranked=done[:top],
    )
