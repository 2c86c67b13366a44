"""Rate-profiles, pre-transforms and the pre-transformed polar encoder.

Bit vectors of length ``N`` are packed into Python ints: bit ``j`` of the int
is position ``j`` of the vector.  A pre-transform row ``h`` is packed the
same way, so ``t[h, j] == (row(h) >> j) & 1``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb
from pathlib import Path

import numpy as np

from . import bitops


class FormatError(ValueError):
    """Malformed profile, transform or polynomial input."""


def iter_bits(x: int) -> Iterator[int]:
    """Positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def pack(positions: Iterable[int]) -> int:
    x = 0
    for p in positions:
        x |= 1 << int(p)
    return x


# --------------------------------------------------------------------------- profiles


@dataclass(frozen=True)
class CodeSpec:
    """Rate-profile ``I`` of a length ``N = 2**n`` polar code."""

    n: int
    info: tuple[int, ...]
    origin: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        info = tuple(sorted(set(self.info)))
        if len(info) != len(self.info):
            raise ValueError("information set contains duplicate indices")
        if not info:
            raise ValueError("information set must be nonempty (K >= 1)")
        if info[0] < 0 or info[-1] >= (1 << self.n):
            raise ValueError(f"information indices must lie in [0, {1 << self.n})")
        object.__setattr__(self, "info", info)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return len(self.info)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @cached_property
    def info_mask(self) -> int:
        return pack(self.info)

    @cached_property
    def frozen_mask(self) -> int:
        return bitops.mask(self.N) ^ self.info_mask

    @cached_property
    def frozen(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.frozen_mask))

    @cached_property
    def info_set(self) -> frozenset[int]:
        return frozenset(self.info)


def rm_profile(r: int, n: int) -> CodeSpec:
    """Reed-Muller RM(r, n) rate-profile: all indices of weight at least n - r."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= r <= n:
        raise ValueError(f"RM order must satisfy 0 <= r <= n, got r={r}, n={n}")
    info = tuple(i for i in range(1 << n) if i.bit_count() >= n - r)
    assert len(info) == sum(comb(n, l) for l in range(r + 1))
    return CodeSpec(n, info, origin=f"RM({r},{n})")


def is_decreasing_profile(spec: CodeSpec) -> bool:
    """Is ``I`` closed upward under the polar partial order?"""
    info = spec.info_set
    return all(j in info for i in spec.info for j in bitops.upward_steps(i, spec.n))


def read_profile(path: str | Path) -> CodeSpec:
    """Load a profile file: ``n=<int>`` header, then one decimal index per line."""
    text = Path(path).read_text(encoding="utf-8")
    n = None
    info = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            n = _parse_header(line, path, lineno)
            continue
        try:
            idx = int(line)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: index: expected a decimal integer, got {line!r}") from None
        if not 0 <= idx < (1 << n):
            raise FormatError(f"{path}:{lineno}: index: {idx} outside [0, {1 << n})")
        if info and idx <= info[-1]:
            raise FormatError(f"{path}:{lineno}: index: {idx} is not strictly increasing")
        info.append(idx)
    if n is None:
        raise FormatError(f"{path}: header: missing 'n=<int>' line")
    if not info:
        raise FormatError(f"{path}: index: profile lists no information indices")
    return CodeSpec(n, tuple(info), origin=str(path))


def write_profile(spec: CodeSpec, path: str | Path) -> None:
    lines = [f"# {spec.origin}", f"n={spec.n}", *map(str, spec.info)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(line: str, path, lineno: int) -> int:
    m = re.fullmatch(r"n\s*=\s*(\d+)", line)
    if not m:
        raise FormatError(f"{path}:{lineno}: header: expected 'n=<int>', got {line!r}")
    n = int(m.group(1))
    if not 1 <= n <= 24:
        raise FormatError(f"{path}:{lineno}: header: n={n} outside [1, 24]")
    return n


# --------------------------------------------------------------------------- polynomials


@dataclass(frozen=True, order=True)
class PacPolynomial:
    """Convolution polynomial; bit ``d`` of ``value`` is the coefficient of ``x**d``."""

    value: int

    def __post_init__(self):
        if self.value < 1 or not self.value & 1:
            raise ValueError(f"PAC polynomial needs p_0 = 1 and degree >= 0, got {self.value:o}_8")

    @classmethod
    def from_octal(cls, text: str | int) -> PacPolynomial:
        s = str(text).strip()
        if s.endswith("_8"):
            s = s[:-2]
        if not re.fullmatch(r"[0-7]+", s):
            raise FormatError(f"polynomial: {text!r} is not an octal number")
        try:
            return cls(int(s, 8))
        except ValueError as exc:
            raise FormatError(f"polynomial: {exc}") from None

    @property
    def degree(self) -> int:
        return self.value.bit_length() - 1

    @property
    def coefficients(self) -> tuple[int, ...]:
        """``(p_0, ..., p_q)``."""
        return tuple((self.value >> d) & 1 for d in range(self.degree + 1))

    @property
    def nonzeros(self) -> int:
        return self.value.bit_count()

    @property
    def octal(self) -> str:
        return f"{self.value:o}"

    def __str__(self) -> str:
        return f"{self.octal}_8"


# --------------------------------------------------------------------------- transforms


class _ToeplitzRows(Mapping):
    """Strictly-upper parts of the rows of a banded Toeplitz matrix, built on demand."""

    def __init__(self, value: int, N: int):
        self._tail = value >> 1
        self._N = N
        self._mask = bitops.mask(N)

    def __getitem__(self, h: int) -> int:
        if not 0 <= h < self._N:
            raise KeyError(h)
        return (self._tail << (h + 1)) & self._mask

    def __iter__(self):
        return (h for h in range(self._N) if self[h])

    def __len__(self) -> int:
        return sum(1 for _ in self)


@dataclass(frozen=True, eq=False)
class PreTransform:
    """Upper-triangular ``N x N`` matrix over GF(2).

    ``diag`` packs the diagonal; ``upper[h]`` packs the entries right of the
    diagonal in row ``h`` (rows absent from ``upper`` are zero there).  In
    systematic form ``upper`` only ever holds frozen columns.
    """

    n: int
    diag: int
    upper: Mapping[int, int]
    systematized: bool = False
    descriptor: str = "custom"

    @property
    def N(self) -> int:
        return 1 << self.n

    def row(self, h: int) -> int:
        return (self.diag & (1 << h)) | self.upper.get(h, 0)

    def entry(self, h: int, j: int) -> int:
        return (self.row(h) >> j) & 1

    def dense(self) -> np.ndarray:
        """Materialize as an ``N x N`` uint8 array (small ``N`` only)."""
        N = self.N
        out = np.zeros((N, N), dtype=np.uint8)
        for h in range(N):
            for j in iter_bits(self.row(h)):
                out[h, j] = 1
        return out

    @cached_property
    def columns(self) -> dict[int, int]:
        """Column ``f`` as a bitset over row indices, for every column with an off-diagonal one."""
        cols: dict[int, int] = {}
        for h, x in self.upper.items():
            bit = 1 << h
            for f in iter_bits(x):
                cols[f] = cols.get(f, 0) | bit
        return cols

    def __eq__(self, other):
        if not isinstance(other, PreTransform):
            return NotImplemented
        return (
            self.n == other.n
            and self.diag == other.diag
            and self.systematized == other.systematized
            and all(self.row(h) == other.row(h) for h in range(self.N))
        )

    __hash__ = None


def identity_transform(n: int) -> PreTransform:
    return PreTransform(n, bitops.mask(1 << n), {}, descriptor="identity")


def from_dense(matrix, descriptor: str = "custom") -> PreTransform:
    """Build from an ``N x N`` 0/1 array; rejects anything not upper-triangular."""
    a = np.asarray(matrix, dtype=np.uint8) & 1
    N = a.shape[0]
    if a.shape != (N, N) or N & (N - 1) or N < 2:
        raise ValueError(f"expected a square matrix with power-of-two size, got {a.shape}")
    if np.tril(a, -1).any():
        raise ValueError("pre-transform must be upper-triangular")
    n = N.bit_length() - 1
    diag = pack(np.flatnonzero(np.diag(a)).tolist())
    upper = {}
    for h in range(N):
        x = pack(np.flatnonzero(a[h, h + 1 :]) + h + 1)
        if x:
            upper[h] = x
    return PreTransform(n, diag, upper, descriptor=descriptor)


def pac_transform(spec: CodeSpec, p: PacPolynomial) -> PreTransform:
    """Toeplitz pre-transform of the convolution with ``p`` (``t[h, h+d] = p_d``)."""
    if p.degree >= spec.N:
        raise ValueError(f"polynomial degree {p.degree} must be below N = {spec.N}")
    upper = _ToeplitzRows(p.value, spec.N) if p.degree else {}
    return PreTransform(spec.n, bitops.mask(spec.N), upper, descriptor=f"pac:{p}")


def random_transform(spec: CodeSpec, seed: int) -> PreTransform:
    """Uniformly random upper-triangular rows on ``I`` (unit diagonal), zero rows on ``F``.

    Bits come from ``numpy.random.default_rng(seed)`` (PCG64): one call to
    ``rng.bytes(max(1, N // 8))`` per information row, in increasing row
    order, read little-endian so byte 0 bit 0 is column 0.
    """
    rng = np.random.default_rng(seed)
    N = spec.N
    full = bitops.mask(N)
    nbytes = max(1, N // 8)
    upper = {}
    for i in spec.info:
        bits = int.from_bytes(rng.bytes(nbytes), "little") & full
        x = bits & (full ^ bitops.mask(i + 1))
        if x:
            upper[i] = x
    return PreTransform(spec.n, spec.info_mask, upper, descriptor=f"random:{seed}")


def read_transform(path: str | Path) -> PreTransform:
    """Load a transform file: ``n=<int>``, then ``<row>: <col> <col> ...`` per nonzero row."""
    text = Path(path).read_text(encoding="utf-8")
    n = None
    rows: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            n = _parse_header(line, path, lineno)
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise FormatError(f"{path}:{lineno}: row: expected '<row>: <col> ...', got {line!r}")
        try:
            h = int(head)
            cols = [int(c) for c in tail.split()]
        except ValueError:
            raise FormatError(f"{path}:{lineno}: row: non-integer entry in {line!r}") from None
        N = 1 << n
        if not 0 <= h < N:
            raise FormatError(f"{path}:{lineno}: row: index {h} outside [0, {N})")
        if h in rows:
            raise FormatError(f"{path}:{lineno}: row: {h} listed twice")
        for c in cols:
            if not 0 <= c < N:
                raise FormatError(f"{path}:{lineno}: col: index {c} outside [0, {N})")
            if c < h:
                raise FormatError(f"{path}:{lineno}: col: {c} < row {h} breaks upper-triangularity")
        rows[h] = pack(cols)
    if n is None:
        raise FormatError(f"{path}: header: missing 'n=<int>' line")
    diag = 0
    upper = {}
    for h, x in rows.items():
        diag |= x & (1 << h)
        if x >> (h + 1):
            upper[h] = x & ~((1 << (h + 1)) - 1)
    return PreTransform(n, diag, upper, descriptor=f"file:{path}")


def write_transform(T: PreTransform, path: str | Path) -> None:
    lines = [f"n={T.n}"]
    for h in range(T.N):
        x = T.row(h)
        if x:
            lines.append(f"{h}: " + " ".join(map(str, iter_bits(x))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def check_transform(T: PreTransform, spec: CodeSpec) -> None:
    if T.n != spec.n:
        raise ValueError(f"transform has n={T.n} but the profile has n={spec.n}")
    missing = spec.info_mask & ~T.diag
    if missing:
        raise ValueError(f"pre-transform needs t[i, i] = 1 on the information set; row {next(iter_bits(missing))} violates it")


def systematize(T: PreTransform, spec: CodeSpec) -> PreTransform:
    """Gauss-Jordan form of the information rows; frozen rows dropped.

    Row ``i`` of the result has its pivot at column ``i`` and no other ones in
    information columns, so only frozen columns are kept in ``upper``.
    """
    if T.systematized:
        return T
    check_transform(T, spec)
    fmask = spec.frozen_mask
    info = np.array(spec.info, dtype=np.int64)
    nbytes = 8 * ((spec.N + 63) // 64)
    # R[t] is the reduced row of info[t], restricted to frozen columns, as bytes
    R = np.zeros((spec.K, nbytes), dtype=np.uint8)
    # back substitution, last row first: every reduced row carries one information column
    for t in range(spec.K - 1, -1, -1):
        x = T.upper.get(int(info[t]), 0)
        if not x:
            continue
        raw = np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8)
        hits = np.unpackbits(raw, bitorder="little")[info].astype(bool)
        acc = np.frombuffer((x & fmask).to_bytes(nbytes, "little"), dtype=np.uint8)
        if hits.any():
            acc = acc ^ np.bitwise_xor.reduce(R[hits], axis=0)
        R[t] = acc
    reduced = {int(h): int.from_bytes(R[t].tobytes(), "little") for t, h in enumerate(info)}
    upper = {h: x for h, x in reduced.items() if x}
    return PreTransform(spec.n, spec.info_mask, upper, systematized=True, descriptor=T.descriptor)


# --------------------------------------------------------------------------- encoding


@lru_cache(maxsize=32)
def _butterfly_masks(n: int) -> tuple[int, ...]:
    full = bitops.mask(1 << n)
    out = []
    for l in range(n):
        s = 1 << l
        out.append(full // ((1 << (2 * s)) - 1) * ((1 << s) - 1))
    return tuple(out)


def polar_transform(u: int, n: int) -> int:
    """``u . G_N`` on packed vectors; ``n`` stages of shifted XORs."""
    for l, m in enumerate(_butterfly_masks(n)):
        u ^= (u >> (1 << l)) & m
    return u


def pretransform(spec: CodeSpec, T: PreTransform, v: int) -> int:
    """``u = v . T`` for a packed rate-profiled vector ``v``."""
    u = 0
    for h in iter_bits(v):
        u ^= T.row(h)
    return u


def expand_message(spec: CodeSpec, m: Sequence[int]) -> int:
    if len(m) != spec.K:
        raise ValueError(f"message length {len(m)} does not match K = {spec.K}")
    v = 0
    for bit, i in zip(m, spec.info):
        if bit & 1:
            v |= 1 << i
    return v


def encode_packed(spec: CodeSpec, T: PreTransform, v: int) -> int:
    return polar_transform(pretransform(spec, T, v), spec.n)


def encode(spec: CodeSpec, T: PreTransform, m: Sequence[int]) -> np.ndarray:
    """Codeword ``((m on I, zeros on F) . T) . G_N`` as a uint8 array."""
    if T.n != spec.n:
        raise ValueError(f"transform has n={T.n} but the profile has n={spec.n}")
    c = encode_packed(spec, T, expand_message(spec, m))
    return unpack(c, spec.N)


def unpack(x: int, length: int) -> np.ndarray:
    raw = np.frombuffer(x.to_bytes((length + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:length].copy()


def dynamic_frozen_value(T_sys: PreTransform, u: int, i: int, f: int, spec: CodeSpec | None = None) -> int:
    """Value frozen position ``f`` takes given the packed prefix ``u`` from ``i`` on."""
    if spec is not None and f in spec.info_set:
        raise ValueError(f"position {f} is an information position, not frozen")
    if not T_sys.systematized:
        raise ValueError("dynamic_frozen_value needs a systematized transform")
    if f <= i:
        raise ValueError(f"frozen position {f} must follow the coset index {i}")
    window = bitops.mask(f) ^ bitops.mask(i)
    return (u & window & T_sys.columns.get(f, 0)).bit_count() & 1
