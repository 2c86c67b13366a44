"""Shared builders for randomized test instances."""

from __future__ import annotations

import numpy as np
import pytest

from ptpc import bitops
from ptpc.code_model import CodeSpec, PacPolynomial, from_dense, pac_transform, rm_profile


def kernel_matrix(n: int) -> np.ndarray:
    """``G_N`` built by Kronecker powers, independent of the packed butterfly."""
    g = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        g = np.kron(g, np.array([[1, 0], [1, 1]], dtype=np.uint8))
    return g


def random_decreasing_profile(rng: np.random.Generator, n: int) -> CodeSpec:
    """Upward closure of a few random indices under the polar partial order."""
    N = 1 << n
    seeds = rng.choice(N, size=int(rng.integers(1, 4)), replace=False)
    info = set()
    for s in seeds:
        info |= bitops.upset(int(s), n)
    return CodeSpec(n, tuple(sorted(info)), origin="random-decreasing")


def random_profile(rng: np.random.Generator, n: int) -> CodeSpec:
    """Any nonempty information set, decreasing or not."""
    N = 1 << n
    k = int(rng.integers(1, N + 1))
    return CodeSpec(n, tuple(sorted(int(x) for x in rng.choice(N, size=k, replace=False))), origin="random")


def random_upper(rng: np.random.Generator, spec: CodeSpec):
    """Random upper-triangular matrix, unit diagonal on ``I``, arbitrary rows on ``F``."""
    N = spec.N
    a = np.triu(rng.integers(0, 2, size=(N, N), dtype=np.uint8), 1)
    diag = rng.integers(0, 2, size=N, dtype=np.uint8)
    diag[list(spec.info)] = 1
    a[np.arange(N), np.arange(N)] = diag
    return from_dense(a, descriptor="test-random")


def random_pac(rng: np.random.Generator, spec: CodeSpec, max_degree: int = 8):
    q = int(rng.integers(0, min(max_degree, spec.N - 1) + 1))
    if q == 0:
        return pac_transform(spec, PacPolynomial(1))
    mid = int(rng.integers(0, 1 << (q - 1)))
    return pac_transform(spec, PacPolynomial((1 << q) | (mid << 1) | 1))


def random_rm(rng: np.random.Generator, n: int) -> CodeSpec:
    return rm_profile(int(rng.integers(0, n + 1)), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one verdict line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
