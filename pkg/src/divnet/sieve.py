"""Smallest-prime-factor and divisor-count sieves, factorization, and a disk cache."""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass
from math import isqrt, prod
from pathlib import Path

import numpy as np

from .errors import CapacityError, RangeError

# Largest table built unless the caller raises it explicitly.
MAX_LIMIT = 1 << 28

CACHE_ENV = "DIVNET_CACHE_DIR"
_CACHE_MAGIC = b"DIVNETSV"
_CACHE_VERSION = 1
_HEADER = struct.Struct("<8sIQ32s")


@dataclass(frozen=True, eq=False)
class SieveTables:
    """Immutable sieve output for labels ``0..limit``.

    ``spf[i]`` is the smallest prime factor of ``i`` (``spf[1] == 1``, ``spf[0] == 0``)
    and ``divisor_count[i]`` is d(i). Index 0 is unused padding so that labels
    index directly.
    """

    limit: int
    spf: np.ndarray
    divisor_count: np.ndarray

    def __post_init__(self):
        self.spf.setflags(write=False)
        self.divisor_count.setflags(write=False)

    def check(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise RangeError(f"{n} outside 1..{self.limit}")

    def is_prime(self, n: int) -> bool:
        self.check(n)
        return n > 1 and int(self.spf[n]) == n

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return idx[(self.spf == idx) & (idx > 1)]

    def divisor_cumsum(self) -> np.ndarray:
        """``D[M] = sum_{j<=M} d(j)`` as int64, with ``D[0] = 0``."""
        return np.cumsum(self.divisor_count, dtype=np.int64)


@dataclass(frozen=True)
class Factorization:
    n: int
    prime_powers: tuple[tuple[int, int], ...]

    @property
    def shape(self) -> tuple[int, ...]:
        """Exponent multiset, sorted descending."""
        return tuple(sorted((j for _, j in self.prime_powers), reverse=True))

    @property
    def num_divisors(self) -> int:
        return prod(j + 1 for _, j in self.prime_powers)

    def value(self) -> int:
        return prod(p**j for p, j in self.prime_powers)


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32 if limit < 2**31 else np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p]:
            continue
        block = spf[p * p :: p]
        block[block == 0] = p
    idx = np.arange(limit + 1, dtype=spf.dtype)
    unset = spf == 0
    spf[unset] = idx[unset]
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return spf


def _divisor_count_sieve(limit: int) -> np.ndarray:
    # Every divisor pair (j, m) with j*m = i has min(j, m) <= isqrt(i), so it is
    # enough to walk the small side and credit both members of the pair.
    d = np.zeros(limit + 1, dtype=np.int32)
    s = isqrt(limit)
    for j in range(1, s + 1):
        d[j * j :: j] += 2
        d[j * j] -= 1
    return d


def build_tables(limit: int, max_limit: int = MAX_LIMIT) -> SieveTables:
    if limit < 1:
        raise CapacityError(f"sieve limit must be positive, got {limit}")
    if limit > max_limit:
        raise CapacityError(f"sieve limit {limit} exceeds configured maximum {max_limit}")
    return SieveTables(limit, _spf_sieve(limit), _divisor_count_sieve(limit))


def factorize(n: int, tables: SieveTables) -> Factorization:
    tables.check(n)
    spf = tables.spf
    out = []
    m = n
    while m > 1:
        p = int(spf[m])
        j = 0
        while m % p == 0:
            m //= p
            j += 1
        out.append((p, j))
    return Factorization(n, tuple(out))


def divisors(n: int, tables: SieveTables) -> list[int]:
    divs = [1]
    for p, j in factorize(n, tables).prime_powers:
        divs = [d * p**e for d in divs for e in range(j + 1)]
    return sorted(divs)


# -- on-disk cache -----------------------------------------------------------


def _cache_path(cache_dir: Path, limit: int) -> Path:
    return cache_dir / f"sieve-v{_CACHE_VERSION}-{limit}.bin"


def save_tables(tables: SieveTables, cache_dir: str | os.PathLike) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    payload = (
        np.ascontiguousarray(tables.spf, dtype=np.int64).tobytes()
        + np.ascontiguousarray(tables.divisor_count, dtype=np.int32).tobytes()
    )
    header = _HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, tables.limit, hashlib.sha256(payload).digest())
    path = _cache_path(cache_dir, tables.limit)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(header + payload)
    tmp.replace(path)
    return path


def load_tables(limit: int, cache_dir: str | os.PathLike) -> SieveTables | None:
    """Return cached tables, or None when missing, truncated, or corrupt."""
    path = _cache_path(Path(cache_dir), limit)
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    if len(raw) < _HEADER.size:
        return None
    magic, version, stored_limit, digest = _HEADER.unpack_from(raw)
    payload = raw[_HEADER.size :]
    expected = (limit + 1) * (8 + 4)
    if magic != _CACHE_MAGIC or version != _CACHE_VERSION or stored_limit != limit or len(payload) != expected:
        return None
    if hashlib.sha256(payload).digest() != digest:
        return None
    split = (limit + 1) * 8
    spf = np.frombuffer(payload[:split], dtype=np.int64).copy()
    dc = np.frombuffer(payload[split:], dtype=np.int32).copy()
    if limit < 2**31:
        spf = spf.astype(np.int32)
    return SieveTables(limit, spf, dc)


_memo: dict[int, SieveTables] = {}


def get_tables(limit: int, cache_dir: str | os.PathLike | None = None) -> SieveTables:
    """Memoized tables for ``limit``; uses the disk cache when configured."""
    if limit in _memo:
        return _memo[limit]
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV)
    tables = load_tables(limit, cache_dir) if cache_dir else None
    if tables is None:
        tables = build_tables(limit)
        if cache_dir:
            save_tables(tables, cache_dir)
    if len(_memo) > 4:
        _memo.pop(next(iter(_memo)))
    _memo[limit] = tables
    return tables
