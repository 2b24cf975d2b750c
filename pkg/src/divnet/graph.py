"""The implicit divisibility graph on labels 1..N.

Nothing here stores adjacency. Degrees and edge counts come from the divisor
sieve plus floor sums; per-node neighbor lists are enumerated on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from .errors import CapacityError, RangeError, RemovedNodeError
from .sieve import SieveTables, divisors, get_tables

MAX_REMOVED = 16

# Marker for nodes that do not exist in a DegreeSequence (index 0, removed labels).
ABSENT = -1


@dataclass(frozen=True)
class NetworkSpec:
    size: int
    removed: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.size < 1:
            raise RangeError(f"network size must be positive, got {self.size}")
        object.__setattr__(self, "removed", frozenset(int(r) for r in self.removed))
        if len(self.removed) > MAX_REMOVED:
            raise CapacityError(f"at most {MAX_REMOVED} removed nodes supported, got {len(self.removed)}")
        bad = [r for r in self.removed if not 1 <= r <= self.size]
        if bad:
            raise RangeError(f"removed labels outside 1..{self.size}: {sorted(bad)}")

    @property
    def n_present(self) -> int:
        return self.size - len(self.removed)

    def check(self, i: int) -> None:
        if not 1 <= i <= self.size:
            raise RangeError(f"label {i} outside 1..{self.size}")

    def check_present(self, i: int) -> None:
        self.check(i)
        if i in self.removed:
            raise RemovedNodeError(f"node {i} is removed")

    def to_dict(self) -> dict:
        return {"size": self.size, "removed": sorted(self.removed)}


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """``degrees[i]`` is k_i for label i; index 0 and removed labels hold ``ABSENT``."""

    spec: NetworkSpec
    degrees: np.ndarray

    def __getitem__(self, i: int) -> int:
        self.spec.check_present(i)
        return int(self.degrees[i])

    def present(self) -> np.ndarray:
        """Degrees of all non-removed nodes, in label order."""
        d = self.degrees[1:]
        return d[d != ABSENT]

    def total(self) -> int:
        return int(self.present().sum(dtype=np.int64))


def _tables(spec: NetworkSpec, tables: SieveTables | None) -> SieveTables:
    if tables is None:
        return get_tables(spec.size)
    if tables.limit < spec.size:
        raise RangeError(f"sieve tables cover 1..{tables.limit}, network needs 1..{spec.size}")
    return tables


# -- strided sum kernels --------------------------------------------------------


def multiple_sums(values: np.ndarray, n: int) -> np.ndarray:
    """``out[i] = sum(values[k*i] for k >= 2 with k*i <= n)`` for i in 0..n.

    ``values`` is indexed by label and has length n+1. Pairs (i, k) with
    i <= sqrt(n) are handled per i, the rest per k, so both loops are O(sqrt n).
    """
    values = np.asarray(values)
    out = np.zeros(n + 1, dtype=values.dtype)
    s = isqrt(n)
    for i in range(1, min(s, n // 2) + 1):
        out[i] = values[2 * i :: i].sum()
    lo = s + 1
    for k in range(2, n // lo + 1):
        hi = n // k
        out[lo : hi + 1] += values[k * lo : k * hi + 1 : k]
    out[0] = 0
    return out


def divisor_sums(values: np.ndarray, n: int) -> np.ndarray:
    """``out[m] = sum(values[d] for d | m, d < m)`` for m in 0..n."""
    values = np.asarray(values)
    out = np.zeros(n + 1, dtype=values.dtype)
    s = isqrt(n)
    for d in range(1, min(s, n // 2) + 1):
        out[2 * d :: d] += values[d]
    lo = s + 1
    for k in range(2, n // lo + 1):
        hi = n // k
        out[k * lo : k * hi + 1 : k] += values[lo : hi + 1]
    return out


def divisor_summatory(n: int) -> int:
    """``sum_{j=1..n} floor(n/j)`` by the hyperbola method, exact."""
    if n <= 0:
        return 0
    s = isqrt(n)
    j = np.arange(1, s + 1, dtype=np.int64)
    return 2 * int((n // j).sum()) - s * s


# -- per-node counts ---------------------------------------------------------------


def _small_divisors(r: int) -> list[int]:
    out = []
    for d in range(1, isqrt(r) + 1):
        if r % d == 0:
            out.append(d)
            if d * d != r:
                out.append(r // d)
    return sorted(out)


def node_counts(spec: NetworkSpec, tables: SieveTables | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(ndiv, nmul)`` over labels 0..N.

    ``ndiv[j]`` counts non-removed proper divisors of j and ``nmul[j]`` counts
    non-removed proper multiples of j up to N. Both are zero at index 0 and at
    removed labels.
    """
    t = _tables(spec, tables)
    n = spec.size
    ndiv = t.divisor_count[: n + 1].astype(np.int64) - 1
    idx = np.arange(n + 1, dtype=np.int64)
    idx[0] = 1
    nmul = n // idx - 1
    for r in spec.removed:
        ndiv[2 * r :: r] -= 1
        for d in _small_divisors(r)[:-1]:
            nmul[d] -= 1
    ndiv[0] = nmul[0] = 0
    for r in spec.removed:
        ndiv[r] = nmul[r] = 0
    return ndiv, nmul


# -- public operations -----------------------------------------------------------------


def adjacent(i: int, j: int, spec: NetworkSpec) -> bool:
    spec.check(i)
    spec.check(j)
    if i == j or i in spec.removed or j in spec.removed:
        return False
    return j % i == 0 or i % j == 0


def neighbors(i: int, spec: NetworkSpec, tables: SieveTables | None = None) -> list[int]:
    spec.check_present(i)
    n = spec.size
    if tables is not None and tables.limit >= i:
        divs = divisors(i, tables)[:-1]
    else:
        divs = _small_divisors(i)[:-1]
    out = divs + list(range(2 * i, n + 1, i))
    return [v for v in out if v not in spec.removed] if spec.removed else out


def degree(i: int, spec: NetworkSpec, tables: SieveTables | None = None) -> int:
    spec.check_present(i)
    n = spec.size
    if tables is not None and tables.limit >= i:
        k = int(tables.divisor_count[i]) + n // i - 2
    else:
        k = len(_small_divisors(i)) + n // i - 2
    for r in spec.removed:
        if r != i and (r % i == 0 or i % r == 0):
            k -= 1
    return k


def degree_sequence(spec: NetworkSpec, tables: SieveTables | None = None) -> DegreeSequence:
    ndiv, nmul = node_counts(spec, tables)
    k = ndiv + nmul
    k[0] = ABSENT
    for r in spec.removed:
        k[r] = ABSENT
    return DegreeSequence(spec, k)


def edge_count(spec: NetworkSpec) -> int:
    """Exact number of edges; needs no sieve tables."""
    n = spec.size
    m = divisor_summatory(n) - n
    removed = sorted(spec.removed)
    for r in removed:
        m -= len(_small_divisors(r)) + n // r - 2
    for a_pos, a in enumerate(removed):
        for b in removed[a_pos + 1 :]:
            if b % a == 0:
                m += 1
    return m
