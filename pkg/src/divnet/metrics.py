"""Global and local metrics of the divisibility network.

Each quantity has an arithmetic fast path. The brute-force counterparts used
to check them live in :mod:`divnet.oracles`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from math import comb, log, prod

import numpy as np

from .errors import CapacityError, DomainError, UndefinedValueError
from .graph import (
    NetworkSpec,
    degree_sequence,
    divisor_sums,
    edge_count,
    multiple_sums,
    neighbors,
    node_counts,
)
from .sieve import SieveTables, divisors, factorize, get_tables

EULER_GAMMA = 0.5772156649
# 2(2*gamma - 1) - 2, printed as -1.6912 after rounding.
AVG_DEGREE_OFFSET = 2 * (2 * EULER_GAMMA - 1) - 2

# Networks with removed nodes use per-node count sweeps; larger sizes are refused.
REMOVED_SIZE_CAP = 1 << 20


class TriangleMode(str, Enum):
    EXACT = "exact"
    PAPER_LITERAL = "paper_literal"


class TripletConvention(str, Enum):
    PATHS = "paths"
    PAPER_UN = "paper_un"


class ClusteringPath(str, Enum):
    ORACLE = "oracle"
    ARITHMETIC = "arithmetic"
    CLOSED_FORM = "closed_form"


@dataclass
class GlobalMetrics:
    n: int
    m: int
    avg_degree: float
    triangles: int
    connected_triplets: int
    global_clustering: float | None
    ws_clustering: float
    assortativity: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def exact_sum(values: np.ndarray) -> int:
    """Overflow-free integer sum of a non-negative int64 array."""
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return 0
    top = int(values.max())
    if top == 0:
        return 0
    chunk = max(1, (1 << 62) // top)
    return sum(int(values[i : i + chunk].sum()) for i in range(0, values.size, chunk))


def exact_power_sum(values: np.ndarray, p: int) -> int:
    """``sum(v**p)`` over non-negative ints, exact for any magnitude."""
    values = np.asarray(values, dtype=np.int64)
    safe = int(2 ** (62 / p))
    small = values[values <= safe]
    big = values[values > safe]
    return exact_sum(small**p) + sum(int(v) ** p for v in big)


def _check_removed_cap(spec: NetworkSpec) -> None:
    if spec.removed and spec.size > REMOVED_SIZE_CAP:
        raise CapacityError(f"networks with removed nodes are capped at {REMOVED_SIZE_CAP} labels, got {spec.size}")


# -- degree ----------------------------------------------------------------------


def average_degree(spec: NetworkSpec) -> float:
    """``2m / n`` over the nodes still present."""
    return 2 * edge_count(spec) / spec.n_present


def average_degree_asymptotic(n: int) -> float:
    if n < 2:
        raise DomainError("asymptotic average degree needs n >= 2")
    return 2 * log(n) + AVG_DEGREE_OFFSET


# -- triangles and triplets ---------------------------------------------------------


def _chain_pairs_below(limits: np.ndarray, dcum: np.ndarray) -> np.ndarray:
    """Chains a | b inside 1..M, i.e. ``sum_{k=2..M}(floor(M/k) - 1)``, per M."""
    limits = np.asarray(limits, dtype=np.int64)
    return np.where(limits >= 1, dcum[limits] - 2 * limits + 1, 0)


def triangle_count(spec: NetworkSpec, mode: TriangleMode | str = TriangleMode.EXACT,
                   tables: SieveTables | None = None) -> int:
    """Number of triangles; each is a divisibility chain i | a | b.

    ``paper_literal`` returns the uncorrected double floor sum, which drops the
    ``-1`` for the apex itself and so overcounts; it is kept for comparison.
    """
    mode = TriangleMode(mode)
    n = spec.size
    if mode is TriangleMode.PAPER_LITERAL:
        if spec.removed:
            raise DomainError("paper_literal triangle count is defined for the full network only")
        t = tables or get_tables(n)
        i = np.arange(1, n + 1, dtype=np.int64)
        big = n // i
        return exact_sum(_chain_pairs_below(big, t.divisor_cumsum())) + exact_sum(big - 1)
    if spec.removed:
        _check_removed_cap(spec)
        _, nmul = node_counts(spec, tables)
        # smallest vertex i, middle a = k*i, top any surviving multiple of a
        per_apex = multiple_sums(nmul, n)
        per_apex[sorted(spec.removed)] = 0
        return exact_sum(per_apex)
    t = tables or get_tables(n)
    i = np.arange(1, n + 1, dtype=np.int64)
    return exact_sum(_chain_pairs_below(n // i, t.divisor_cumsum()))


def connected_triplets(spec: NetworkSpec, convention: TripletConvention | str = TripletConvention.PATHS,
                       tables: SieveTables | None = None) -> int:
    convention = TripletConvention(convention)
    k = degree_sequence(spec, tables).present()
    paths = (exact_power_sum(k, 2) - exact_sum(k)) // 2
    return paths if convention is TripletConvention.PATHS else 2 * paths


def global_clustering(spec: NetworkSpec, tables: SieveTables | None = None) -> float:
    triplets = connected_triplets(spec, tables=tables)
    if triplets == 0:
        raise UndefinedValueError(f"network of size {spec.size} has no connected triplets")
    return 3 * triangle_count(spec, tables=tables) / triplets


# -- local clustering ---------------------------------------------------------------


def closed_form_clustering(exponents) -> float:
    """Clustering of an upper-half composite from its prime exponents alone."""
    exponents = list(exponents)
    s = prod(j + 1 for j in exponents)
    if s < 4:
        raise DomainError(f"closed form needs a composite that is not a prime (exponents {exponents})")
    return (prod(comb(j + 2, 2) for j in exponents) - 2 * s + 1) / comb(s - 1, 2)


def _edges_among_neighbors_oracle(i: int, spec: NetworkSpec, tables: SieveTables | None) -> tuple[int, int]:
    nb = neighbors(i, spec, tables)
    e = 0
    for x, a in enumerate(nb):
        for b in nb[x + 1 :]:
            if b % a == 0:
                e += 1
    return e, len(nb)


def _edges_among_neighbors_arithmetic(i: int, spec: NetworkSpec, tables: SieveTables) -> tuple[int, int]:
    n = spec.size
    removed = spec.removed
    ndiv_i, nmul_i, ddsum = 0, 0, 0
    for d in divisors(i, tables)[:-1]:
        if d in removed:
            continue
        ndiv_i += 1
        nd = int(tables.divisor_count[d]) - 1 - sum(1 for r in removed if r < d and d % r == 0)
        ddsum += nd
    mult = i * np.arange(2, n // i + 1, dtype=np.int64)
    nm = n // mult - 1 if mult.size else mult
    if removed:
        keep = ~np.isin(mult, list(removed))
        for r in removed:
            nm = nm - ((r % mult == 0) & (r > mult))
        nmul_i = int(keep.sum())
        mmsum = int(nm[keep].sum())
    else:
        nmul_i = mult.size
        mmsum = int(nm.sum())
    return ddsum + ndiv_i * nmul_i + mmsum, ndiv_i + nmul_i


def local_clustering(i: int, spec: NetworkSpec, path: ClusteringPath | str = ClusteringPath.ARITHMETIC,
                     tables: SieveTables | None = None) -> float:
    """Fraction of neighbor pairs of ``i`` that are adjacent; 0 when degree < 2.

    The arithmetic path counts adjacent neighbor pairs in three groups:
    divisor/divisor chains, divisor/multiple pairs (always adjacent), and
    multiple/multiple chains.
    """
    path = ClusteringPath(path)
    spec.check_present(i)
    t = tables or get_tables(spec.size)
    if path is ClusteringPath.CLOSED_FORM:
        n = spec.size
        if spec.removed:
            raise DomainError("closed form holds only for the full network")
        if not 2 * i > n:
            raise DomainError(f"closed form holds only on ({n}/2, {n}], got {i}")
        f = factorize(i, t)
        if len(f.prime_powers) < 2:
            raise DomainError(f"closed form needs a composite that is not a prime power, got {i}")
        return closed_form_clustering(f.shape)
    if path is ClusteringPath.ORACLE:
        e, k = _edges_among_neighbors_oracle(i, spec, t)
    else:
        e, k = _edges_among_neighbors_arithmetic(i, spec, t)
    return e / comb(k, 2) if k >= 2 else 0.0


def local_clustering_array(spec: NetworkSpec, tables: SieveTables | None = None) -> np.ndarray:
    """Local clustering of every label 0..N (index 0 and removed labels are NaN)."""
    _check_removed_cap(spec)
    n = spec.size
    ndiv, nmul = node_counts(spec, tables)
    edges = divisor_sums(ndiv, n) + ndiv * nmul + multiple_sums(nmul, n)
    k = ndiv + nmul
    pairs = k * (k - 1) // 2
    c = np.zeros(n + 1, dtype=np.float64)
    np.divide(edges, pairs, out=c, where=pairs > 0)
    c[0] = np.nan
    for r in spec.removed:
        c[r] = np.nan
    return c


def ws_clustering(spec: NetworkSpec, tables: SieveTables | None = None) -> float:
    c = local_clustering_array(spec, tables)[1:]
    c = c[~np.isnan(c)]
    # fixed-order pairwise summation keeps the mean reproducible
    return float(np.sum(c) / c.size) if c.size else 0.0


# -- assortativity ----------------------------------------------------------------------


def _r_from_sums(m: int, a: int, b: int, c: int) -> float:
    """r from S1 = a, 2*S2 = b, 2*S3 = c as exact integers, one final division."""
    num = 4 * m * a - b * b
    den = 2 * m * c - b * b
    if m == 0 or den == 0:
        raise UndefinedValueError("assortativity undefined: no edges or zero degree variance")
    return num / den


def assortativity(spec: NetworkSpec, tables: SieveTables | None = None) -> float:
    """Degree assortativity from per-edge moments; edges are (j, k*j) pairs."""
    _check_removed_cap(spec)
    ds = degree_sequence(spec, tables)
    k = np.where(ds.degrees < 0, 0, ds.degrees)
    m = ds.total() // 2
    partner = multiple_sums(k, spec.size)
    s1 = exact_sum(k * partner)
    return _r_from_sums(m, s1, exact_power_sum(k, 2), exact_power_sum(k, 3))


def assortativity_from_edges(edges) -> float:
    """Same estimator for an explicit edge list of hashable nodes."""
    deg: dict = {}
    edges = list(edges)
    for a, b in edges:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
    s1 = sum(deg[a] * deg[b] for a, b in edges)
    s2 = sum(v * v for v in deg.values())
    s3 = sum(v**3 for v in deg.values())
    return _r_from_sums(len(edges), s1, s2, s3)


def global_metrics(spec: NetworkSpec, tables: SieveTables | None = None) -> GlobalMetrics:
    t = tables or get_tables(spec.size)
    m = edge_count(spec)
    tri = triangle_count(spec, tables=t)
    trip = connected_triplets(spec, tables=t)
    try:
        r = assortativity(spec, t)
    except UndefinedValueError:
        r = None
    return GlobalMetrics(
        n=spec.size,
        m=m,
        avg_degree=2 * m / spec.n_present,
        triangles=tri,
        connected_triplets=trip,
        global_clustering=3 * tri / trip if trip else None,
        ws_clustering=ws_clustering(spec, t),
        assortativity=r,
    )
