import itertools

import numpy as np
import pytest

from ptpc.code_model import CodeSpec, PacPolynomial, encode_packed, identity_transform, pac_transform, rm_profile, systematize
from ptpc.oracle import OracleSizeError, brute_force_count_at, brute_force_spectrum, weight_histogram
from conftest import random_decreasing_profile, random_upper


def _naive_histogram(spec, T):
    hist = np.zeros(spec.N + 1, dtype=np.int64)
    for bits in itertools.product((0, 1), repeat=spec.K):
        v = sum(1 << i for i, b in zip(spec.info, bits) if b)
        hist[encode_packed(spec, T, v).bit_count()] += 1
    return hist


def test_extended_hamming():
    res = brute_force_spectrum(rm_profile(1, 3), identity_transform(3))
    assert res.spectrum.terms == ((4, 14), (8, 1))
    assert (res.dmin, res.a_dmin) == (4, 14)


def test_plain_rm25():
    res = brute_force_spectrum(rm_profile(2, 5), identity_transform(5))
    assert (res.dmin, res.a_dmin) == (8, 620)
    assert sum(a for _, a in res.spectrum) == 2**16 - 1


def test_single_row_code(rng):
    spec = CodeSpec(3, (5,))
    T = random_upper(rng, spec)
    res = brute_force_spectrum(spec, T)
    assert res.spectrum.terms == ((encode_packed(spec, T, 1 << 5).bit_count(), 1),)


@pytest.mark.parametrize("seed", range(8))
def test_matches_naive_encoding(seed):
    rng = np.random.default_rng(seed)
    spec = random_decreasing_profile(rng, int(rng.integers(2, 7)))
    if spec.K > 12:
        spec = rm_profile(2, 4)
    T = random_upper(rng, spec)
    assert (weight_histogram(spec, T) == _naive_histogram(spec, T)).all()


def test_multiword_codewords():
    # N = 128 spans two 64-bit words
    spec = CodeSpec(7, tuple(range(128 - 12, 128)))
    T = pac_transform(spec, PacPolynomial.from_octal("155"))
    assert (weight_histogram(spec, T) == _naive_histogram(spec, T)).all()


def test_total_count_and_worker_invariance():
    spec = rm_profile(2, 5)
    T = pac_transform(spec, PacPolynomial.from_octal("1027"))
    a = brute_force_spectrum(spec, T)
    b = brute_force_spectrum(spec, T, workers=3)
    assert a == b
    assert sum(c for _, c in a.spectrum) == 2**spec.K - 1
    assert a.a_dmin == 236


def test_invariant_under_systematize(rng):
    for _ in range(5):
        spec = random_decreasing_profile(rng, 4)
        T = random_upper(rng, spec)
        assert brute_force_spectrum(spec, T) == brute_force_spectrum(spec, systematize(T, spec))


def test_count_at():
    spec = rm_profile(2, 5)
    T = identity_transform(5)
    res = brute_force_spectrum(spec, T)
    assert brute_force_count_at(spec, T, 0) == 0
    for w in (8, 12, 16, 32, 5):
        assert brute_force_count_at(spec, T, w) == res.count_at(w)


def test_example_code_count():
    spec = CodeSpec(4, (10, 11, 14, 15))
    assert brute_force_count_at(spec, identity_transform(4), 4) == 4


def test_size_cap():
    spec = rm_profile(3, 6)
    with pytest.raises(OracleSizeError):
        brute_force_spectrum(spec, identity_transform(6))
    with pytest.raises(OracleSizeError):
        brute_force_count_at(spec, identity_transform(6), 0)
    with pytest.raises(OracleSizeError):
        brute_force_spectrum(CodeSpec(17, (0,)), identity_transform(17))
