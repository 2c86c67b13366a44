"""Exhaustive weight spectrum of small codes, for cross-checking the enumerator.

All ``2**K`` messages are visited in Gray-code order, so each step XORs a
single basis codeword.  The low message bits are expanded once into a
table of codewords (numpy ``uint64`` words); the high bits walk the Gray
code, and each step tallies a whole table's weights at once.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import WeightSpectrum
from .code_model import CodeSpec, PreTransform, check_transform, encode_packed

MAX_N = 16
# low-table budget in 64-bit words
_TABLE_WORDS = 1 << 20


class OracleSizeError(ValueError):
    """The code is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class SpectrumResult:
    spectrum: WeightSpectrum
    dmin: int
    a_dmin: int

    def count_at(self, w: int) -> int:
        return self.spectrum[w]


def _words(c: int, nwords: int) -> np.ndarray:
    return np.frombuffer(c.to_bytes(8 * nwords, "little"), dtype="<u8").astype(np.uint64)


def _basis(spec: CodeSpec, T: PreTransform) -> list[int]:
    return [encode_packed(spec, T, 1 << i) for i in spec.info]


def _plan(spec: CodeSpec, T: PreTransform, k_limit: int):
    if spec.K > k_limit:
        raise OracleSizeError(f"K = {spec.K} exceeds the oracle cap k_limit = {k_limit}")
    if spec.n > MAX_N:
        raise OracleSizeError(f"N = {spec.N} exceeds the oracle cap 2**{MAX_N}")
    check_transform(T, spec)
    nwords = (spec.N + 63) // 64
    basis = np.stack([_words(c, nwords) for c in _basis(spec, T)])
    low = min(spec.K, max(0, _TABLE_WORDS.bit_length() - 1 - (nwords.bit_length() - 1)))
    return basis, low


def _low_table(basis: np.ndarray, low: int) -> np.ndarray:
    table = np.zeros((1, basis.shape[1]), dtype=np.uint64)
    for t in range(low):
        table = np.concatenate([table, table ^ basis[t]])
    return table


def _tally(basis: np.ndarray, low: int, N: int, prefix: int, prefix_bits: int) -> np.ndarray:
    """Weight histogram of the messages whose top ``prefix_bits`` high bits equal ``prefix``."""
    K = basis.shape[0]
    table = _low_table(basis, low)
    free = K - low - prefix_bits
    vec = np.zeros(basis.shape[1], dtype=np.uint64)
    for b in range(prefix_bits):
        if prefix >> b & 1:
            vec ^= basis[low + free + b]
    hist = np.zeros(N + 1, dtype=np.int64)
    for step in range(1 << free):
        if step:
            vec ^= basis[low + (step & -step).bit_length() - 1]
        weights = np.bitwise_count(table ^ vec).sum(axis=1, dtype=np.int64)
        hist += np.bincount(weights, minlength=N + 1)
    return hist


def _tally_task(args):
    return _tally(*args)


def weight_histogram(spec: CodeSpec, T: PreTransform, k_limit: int = 24, workers: int = 1) -> np.ndarray:
    """Dense histogram ``h[w]`` over all ``2**K`` messages (the zero word included at ``w = 0``)."""
    basis, low = _plan(spec, T, k_limit)
    high = spec.K - low
    if workers is None or workers < 1:
        workers = os.cpu_count() or 1
    prefix_bits = min(high, (workers - 1).bit_length())
    tasks = [(basis, low, spec.N, p, prefix_bits) for p in range(1 << prefix_bits)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_tally_task, tasks))
    else:
        parts = [_tally(*t) for t in tasks]
    return np.sum(parts, axis=0)


def brute_force_spectrum(spec: CodeSpec, T: PreTransform, k_limit: int = 24, workers: int = 1) -> SpectrumResult:
    """Full weight spectrum of the nonzero codewords of ``(spec, T)``."""
    hist = weight_histogram(spec, T, k_limit, workers)
    hist[0] -= 1
    if hist[0]:
        raise ArithmeticError("nonzero message encoded to the zero word; the transform is singular on I")
    spectrum = WeightSpectrum.from_counts({w: int(a) for w, a in enumerate(hist) if a})
    dmin, a_dmin = spectrum.terms[0]
    return SpectrumResult(spectrum, dmin, a_dmin)


def brute_force_count_at(spec: CodeSpec, T: PreTransform, w: int, k_limit: int = 24, workers: int = 1) -> int:
    """Number of nonzero codewords of weight exactly ``w``."""
    if w <= 0 or w > spec.N:
        # still validate the size contract
        _plan(spec, T, k_limit)
        return 0
    return int(weight_histogram(spec, T, k_limit, workers)[w])
