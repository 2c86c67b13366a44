"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict that is printed in the
"acceptance criteria" section of the pytest summary.  The two optional
long runs (n = 13 PAC, n = 15 plain) are on by default; set
``PTPC_SKIP_OPTIONAL=1`` to skip them.

Run just this module with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import contextlib
import math
import os
import statistics
import time
import warnings

import numpy as np
import pytest

from ptpc.bounds import lb_lemma3, lb_rm_closed_form
from ptpc.cli import main
from ptpc.code_model import (
    CodeSpec,
    PacPolynomial,
    identity_transform,
    pac_transform,
    random_transform,
    rm_profile,
)
from ptpc.enumerator import compute_coset_context, count_min_weight, wmin_and_coset_indices
from ptpc.oracle import brute_force_spectrum
from conftest import ACCEPTANCE_LINES, random_decreasing_profile, random_pac, random_upper

SKIP_OPTIONAL = os.environ.get("PTPC_SKIP_OPTIONAL") == "1"
REF_PAC = PacPolynomial.from_octal("5767471")


@contextlib.contextmanager
def criterion(label: str):
    """Record PASS/FAIL for ``label``; the body appends details to the yielded list."""
    details: list[str] = []
    try:
        yield details
    except BaseException as exc:
        if isinstance(exc, pytest.skip.Exception):
            ACCEPTANCE_LINES.append(f"SKIP  {label}: {exc}")
        else:
            ACCEPTANCE_LINES.append(f"FAIL  {label}: {'; '.join(details)} [{type(exc).__name__}: {exc}]".rstrip())
        raise
    ACCEPTANCE_LINES.append(f"PASS  {label}: {'; '.join(details)}")


def cli_field(out: str, name: str) -> str:
    for line in out.splitlines():
        if line.startswith(name):
            return line.split(None, 1)[1]
    raise KeyError(name)


@pytest.fixture(scope="module", autouse=True)
def warm_up():
    # load the compiled walk once so timings measure counting, not JIT loading
    spec = rm_profile(2, 5)
    count_min_weight(spec, pac_transform(spec, REF_PAC))


def test_c01_rm37_pac155(capsys):
    with criterion("C1 count --rm 3 7 --pac 155 -> Awmin 3120, wmin 16, < 1 s") as d:
        t0 = time.perf_counter()
        code = main(["count", "--rm", "3", "7", "--pac", "155", "--threads", "1"])
        elapsed = time.perf_counter() - t0
        out = capsys.readouterr().out
        d.append(f"Awmin={cli_field(out, 'Awmin')} wmin={cli_field(out, 'wmin')} {elapsed:.3f}s")
        assert code == 0
        assert cli_field(out, "Awmin") == "3120"
        assert cli_field(out, "wmin") == "16"
        assert elapsed < 1.0


SPOT_CHECKS = [(5, 2, "1027", 236), (6, 3, "1027", 2136), (7, 4, "2724313", 13920), (8, 5, "4347071", 98200),
               (9, 4, "2724313", 13968), (11, 5, "4347071", 100900)]


def test_c02_pac_spot_checks():
    with criterion("C2 PAC polynomial spot checks, exact, each < 60 s") as d:
        for n, r, p, expect in SPOT_CHECKS:
            spec = rm_profile(r, n)
            t0 = time.perf_counter()
            got = count_min_weight(spec, pac_transform(spec, PacPolynomial.from_octal(p)), workers=1).awmin
            elapsed = time.perf_counter() - t0
            d.append(f"({n},{r},{p})={got} {elapsed:.2f}s")
            assert got == expect
            assert elapsed < 60


PAC_SERIES = [(5, 236), (7, 2136), (9, 15216), (11, 103148), (13, 1528328)]


def test_c03_pac_series():
    with criterion("C3 p=5767471 on RM((n-1)/2, n), n=5..13") as d:
        for n, expect in PAC_SERIES:
            if n == 13 and SKIP_OPTIONAL:
                d.append("n=13 skipped (optional)")
                continue
            spec = rm_profile((n - 1) // 2, n)
            t0 = time.perf_counter()
            got = count_min_weight(spec, pac_transform(spec, REF_PAC), workers=1).awmin
            d.append(f"n={n}:{got} {time.perf_counter() - t0:.1f}s")
            assert got == expect


PLAIN = [(5, 620), (7, 94488), (9, 52955952), (11, 113562778208)]


def test_c04_plain_codes():
    with criterion("C4 plain RM((n-1)/2, n) counts") as d:
        for n, expect in PLAIN:
            got = count_min_weight(rm_profile((n - 1) // 2, n), identity_transform(n)).awmin
            d.append(f"n={n}:{got}")
            assert got == expect
        assert PLAIN[-1][1] > 2**33


def _oracle_instance(rng, n):
    while True:
        spec = rm_profile(int(rng.integers(0, n + 1)), n) if rng.integers(2) else random_decreasing_profile(rng, n)
        if spec.K <= 22:
            break
    kind = int(rng.integers(3))
    if kind == 0:
        T = identity_transform(n)
    elif kind == 1:
        T = random_pac(rng, spec, max_degree=8)
    else:
        T = random_upper(rng, spec)
    return spec, T


def test_c05_oracle_equivalence():
    with criterion("C5 enumerator = brute force on >= 200 random instances, n in 3..6, < 5 min") as d:
        rng = np.random.default_rng(5)
        t0 = time.perf_counter()
        flagged = 0
        for k in range(240):
            spec, T = _oracle_instance(rng, 3 + k % 4)
            res = count_min_weight(spec, T)
            oracle = brute_force_spectrum(spec, T)
            assert res.awmin == oracle.spectrum[res.wmin], (spec, T.descriptor)
            assert res.dmin_exceeds_wmin == (oracle.dmin > res.wmin)
            flagged += res.dmin_exceeds_wmin
        elapsed = time.perf_counter() - t0
        d.append(f"240 instances agree, {flagged} with dmin > wmin, {elapsed:.1f}s")
        assert elapsed < 300


def test_c06_tightness():
    with criterion("C6 RM(n-2, n) count equals the closed form for any T, n=4..8") as d:
        for n in range(4, 9):
            r = n - 2
            spec = rm_profile(r, n)
            expect = lb_rm_closed_form(r)
            transforms = [identity_transform(n)] + [random_transform(spec, s) for s in range(10)]
            got = {count_min_weight(spec, T).awmin for T in transforms}
            d.append(f"n={n}:{sorted(got)}")
            assert got == {expect}
        spec = rm_profile(3, 5)
        for T in (identity_transform(5), random_transform(spec, 0)):
            assert brute_force_spectrum(spec, T, k_limit=26).a_dmin == 1240
        d.append("oracle RM(3,5)=1240")


def test_c07_bound_ordering():
    with criterion("C7 closed form <= unremovable <= Awmin, all RM(r,n), n<=11, r<=n-2, 20 random T") as d:
        cases = 0
        t0 = time.perf_counter()
        for n in range(2, 12):
            for r in range(0, n - 1):
                spec = rm_profile(r, n)
                closed, unremovable = lb_rm_closed_form(r), lb_lemma3(spec)
                assert closed <= unremovable
                for s in range(20):
                    awmin = count_min_weight(spec, random_transform(spec, 1000 * n + 100 * r + s)).awmin
                    assert unremovable <= awmin, (r, n, s)
                    cases += 1
        d.append(f"{cases} (spec, T) pairs {time.perf_counter() - t0:.0f}s")


def test_c08_dmin_equals_wmin():
    with criterion("C8 oracle dmin = wmin on 100 random decreasing profiles, n <= 6") as d:
        rng = np.random.default_rng(8)
        done = 0
        while done < 100:
            n = int(rng.integers(2, 7))
            spec = random_decreasing_profile(rng, n)
            if spec.K > 22:
                continue
            T = random_upper(rng, spec)
            wmin, _ = wmin_and_coset_indices(spec)
            assert brute_force_spectrum(spec, T).dmin == wmin
            done += 1
        d.append("100 profiles")


def test_c09_polynomial_search(capsys):
    with criterion("C9 search --rm 2 5 --max-degree 9 -> 236 with a degree-9 achiever, < 10 min") as d:
        t0 = time.perf_counter()
        code = main(["search", "--rm", "2", "5", "--max-degree", "9", "--threads", "1"])
        elapsed = time.perf_counter() - t0
        out = capsys.readouterr().out
        best = cli_field(out, "best")
        d.append(f"{best} {elapsed:.1f}s")
        assert code == 0
        assert "Awmin=236" in best and "degree 9" in best
        assert elapsed < 600


def test_c10_random_ensemble(tmp_path, capsys):
    with criterion("C10 random-ensemble --rm 3 7 --trials 100 within [2043, 3610], mean ~2766.74") as d:
        csv_path = tmp_path / "trials.csv"
        code = main(["random-ensemble", "--rm", "3", "7", "--trials", "100", "--csv", str(csv_path), "--threads", "1"])
        capsys.readouterr()
        assert code == 0
        values = [int(line.split(",")[1]) for line in csv_path.read_text().splitlines()[1:]]
        mean = statistics.fmean(values)
        dev = abs(mean - 2766.74) / 2766.74
        d.append(f"min={min(values)} mean={mean:.2f} max={max(values)} dev={100 * dev:.2f}%")
        assert len(values) == 100
        assert all(2043 <= v <= 3610 for v in values)
        if dev > 0.03:
            d.append("WARN mean outside +-3%")
            warnings.warn(f"ensemble mean {mean:.2f} deviates {100 * dev:.2f}% from 2766.74", stacklevel=1)


LITERAL_COUNTERS = {5: (284, 345, 398), 9: (31239, 49383, 101416)}


def test_c11_complexity_counters():
    with criterion("C11 literal-walk counters within 4x of reference, sub-linear in plain Awmin") as d:
        measured = {}
        for n, ref in LITERAL_COUNTERS.items():
            spec = rm_profile((n - 1) // 2, n)
            res = count_min_weight(spec, pac_transform(spec, REF_PAC), shortcircuit=False, workers=1)
            got = (res.stats.visited_subtrees, res.stats.message_updates, res.stats.pretransform_checks)
            measured[n] = got
            d.append(f"n={n}:{got}")
            for g, e in zip(got, ref):
                assert e / 4 <= g <= 4 * e
        plain_growth = 52955952 / 620
        for a, b in zip(measured[5], measured[9]):
            growth = b / a
            assert math.log(growth) / math.log(plain_growth) < 1
        d.append(f"counter growth {max(b / a for a, b in zip(measured[5], measured[9])):.0f}x vs plain {plain_growth:.0f}x")


def test_c12_example_code():
    with criterion("C12 profile {10,11,14,15}: coset 10 holds 4, K_10 = {11,12,14}") as d:
        spec = CodeSpec(4, (10, 11, 14, 15))
        res = count_min_weight(spec, identity_transform(4))
        ctx = compute_coset_context(spec, 10)
        d.append(f"per_coset={res.per_coset} K_10={list(ctx.core)}")
        assert res.per_coset[10] == 4
        assert ctx.core == (11, 12, 14)


@pytest.mark.skipif(SKIP_OPTIONAL, reason="PTPC_SKIP_OPTIONAL=1")
def test_c13_smoke_n15_plain():
    with criterion("C13 (optional) plain RM(7,15) smoke run, no overflow, < 1 h") as d:
        t0 = time.perf_counter()
        got = count_min_weight(rm_profile(7, 15), identity_transform(15)).awmin
        elapsed = time.perf_counter() - t0
        d.append(f"{got} {elapsed:.0f}s")
        assert got == 31566670174891755904
        assert elapsed < 3600


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
