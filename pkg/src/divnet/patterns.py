"""Clustering profiles over node labels, their successive differences, the
density grid and symmetry statistic, band checks, and stretched overlays."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .errors import CapacityError, UsageError
from .graph import NetworkSpec
from .metrics import local_clustering_array
from .sieve import SieveTables, get_tables

PROFILE_CAP = 1 << 22
X_CELLS = 128
Y_CELLS = 100
CELL_HEIGHT = 0.01


@dataclass(frozen=True, eq=False)
class ClusteringProfile:
    """``values[i]`` is c_i; index 0 and removed labels are NaN."""

    spec: NetworkSpec
    values: np.ndarray

    def __getitem__(self, i: int) -> float:
        self.spec.check_present(i)
        return float(self.values[i])

    def labels(self) -> np.ndarray:
        return np.arange(1, self.spec.size + 1)


def clustering_profile(spec: NetworkSpec, tables: SieveTables | None = None,
                       cap: int = PROFILE_CAP) -> ClusteringProfile:
    if spec.size > cap:
        raise CapacityError(f"full clustering profiles are capped at {cap} nodes, got {spec.size}")
    return ClusteringProfile(spec, local_clustering_array(spec, tables))


def successive_differences(profile: ClusteringProfile | np.ndarray) -> np.ndarray:
    """``c_i - c_(i+1)`` for i = 1..N-1; element ``i-1`` holds the i-th difference."""
    c = profile.values[1:] if isinstance(profile, ClusteringProfile) else np.asarray(profile, dtype=np.float64)
    if c.size < 2:
        raise UsageError("successive differences need at least two nodes")
    return c[:-1] - c[1:]


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Point counts per (column, row) cell and their per-column densities.

    Rows run ``-Y_CELLS..Y_CELLS``; row 0 holds points with ``|dc| < cell/2``,
    which carry no sign and are left out of the symmetry statistic.
    """

    counts: np.ndarray  # shape (columns, 2*Y_CELLS + 1), row offset Y_CELLS
    column_points: np.ndarray
    column_width: int
    y_cells: int = Y_CELLS
    cell_height: float = CELL_HEIGHT

    @property
    def rho(self) -> np.ndarray:
        out = np.zeros(self.counts.shape, dtype=np.float64)
        np.divide(self.counts, self.column_points[:, None], out=out, where=self.column_points[:, None] > 0)
        return out

    def rho_at(self, x: int, y: int) -> float:
        """Density of column ``x`` (1-based) and signed row ``y``."""
        return float(self.rho[x - 1, y + self.y_cells])

    @property
    def axis_mass(self) -> np.ndarray:
        return self.counts[:, self.y_cells]

    def rows(self):
        """``(x, y, rho)`` triples for every non-axis cell, x 1-based."""
        rho = self.rho
        for xi in range(rho.shape[0]):
            for y in range(-self.y_cells, self.y_cells + 1):
                if y:
                    yield xi + 1, y, float(rho[xi, y + self.y_cells])


def density_grid(diffs, x_cells: int = X_CELLS, y_cells: int = Y_CELLS,
                 cell_height: float = CELL_HEIGHT) -> DensityGrid:
    d = np.asarray(diffs, dtype=np.float64)
    if d.size == 0:
        raise UsageError("density grid needs at least one point")
    width = ceil(d.size / x_cells)
    n_cols = ceil(d.size / width)
    col = np.arange(d.size) // width
    ok = ~np.isnan(d)
    col, d = col[ok], d[ok]
    mag = np.abs(d) / cell_height
    # round before ceil so 0.5/0.01 style quotients land on their exact row
    row = np.ceil(np.round(mag, 9)).astype(np.int64)
    row[mag < 0.5] = 0
    row = np.minimum(row, y_cells) * np.sign(d).astype(np.int64)
    counts = np.zeros((n_cols, 2 * y_cells + 1), dtype=np.int64)
    np.add.at(counts, (col, row + y_cells), 1)
    column_points = counts.sum(axis=1)
    return DensityGrid(counts, column_points, width, y_cells, cell_height)


@dataclass(frozen=True, eq=False)
class SymmetryProfile:
    phi: np.ndarray

    @property
    def max(self) -> float:
        return float(self.phi.max())


def symmetry_quantifier(grid: DensityGrid) -> SymmetryProfile:
    rho = grid.rho
    c = grid.y_cells
    upper = rho[:, c + 1 :]
    lower = rho[:, c - 1 :: -1][:, :c]
    return SymmetryProfile(np.abs(upper - lower).sum(axis=1) / c)


# -- band structure -----------------------------------------------------------


@dataclass
class BandReport:
    size: int
    ones_checked: int
    zeros_checked: int
    violations: list[tuple[int, float, float]] = field(default_factory=list)  # (label, expected, actual)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "ones_checked": self.ones_checked,
            "zeros_checked": self.zeros_checked,
            "violations": [list(v) for v in self.violations],
        }


def prime_power_base(tables: SieveTables, limit: int) -> np.ndarray:
    """``out[i]`` is p when i = p^a (a >= 1), else 0; covers labels 0..limit."""
    spf = tables.spf[: limit + 1].astype(np.int64)
    out = np.zeros(limit + 1, dtype=np.int64)
    m = np.arange(limit + 1, dtype=np.int64)
    m[:2] = 0
    p = spf.copy()
    p[:2] = 1
    live = m > 1
    while live.any():
        m[live] //= p[live]
        live &= m % p == 0
    is_pp = (m == 1) & (np.arange(limit + 1) > 1)
    out[is_pp] = spf[is_pp]
    return out


def band_check(spec: NetworkSpec, tables: SieveTables | None = None,
               profile: ClusteringProfile | None = None) -> BandReport:
    """Primes and prime powers in (N/3, N/2] must have c = 1; primes in (N/2, N] must have c = 0."""
    if spec.removed:
        raise UsageError("band structure is defined for the full network")
    n = spec.size
    t = tables or get_tables(n)
    c = (profile or clustering_profile(spec, t)).values
    labels = np.arange(n + 1)
    base = prime_power_base(t, n)
    is_prime = (base == labels) & (labels > 1)
    ones = np.nonzero((base > 0) & (3 * labels > n) & (2 * labels <= n))[0]
    zeros = np.nonzero(is_prime & (2 * labels > n))[0]
    bad = [(int(i), 1.0, float(c[i])) for i in ones if c[i] != 1.0]
    bad += [(int(i), 0.0, float(c[i])) for i in zeros if c[i] != 0.0]
    return BandReport(n, len(ones), len(zeros), sorted(bad))


# -- shapes and overlays ---------------------------------------------------------


def exponent_shapes(labels, tables: SieveTables) -> np.ndarray:
    """Prime exponents of each label, sorted descending, zero padded (one row per label)."""
    m = np.array(labels, dtype=np.int64)
    spf = tables.spf
    cols = []
    while True:
        live = m > 1
        if not live.any():
            break
        p = np.where(live, spf[m], 1).astype(np.int64)
        e = np.zeros(m.size, dtype=np.int64)
        while True:
            step = live & (m % p == 0)
            if not step.any():
                break
            m[step] //= p[step]
            e[step] += 1
        cols.append(e)
    if not cols:
        return np.zeros((m.size, 0), dtype=np.int64)
    return -np.sort(-np.stack(cols, axis=1), axis=1)


REGIONS = ((2, 1), (3, 2), (4, 3))  # (a, b): labels in (N/a, N/b]


def _shape_values(spec: NetworkSpec, c: np.ndarray, tables: SieveTables, a: int, b: int) -> dict:
    n = spec.size
    labels = np.arange(n // a + 1, n // b + 1)
    labels = labels[a * labels > n]
    if labels.size == 0:
        return {}
    shapes = exponent_shapes(labels, tables)
    out: dict[tuple, set] = {}
    for row, v in zip(map(tuple, shapes.tolist()), c[labels].tolist()):
        key = tuple(j for j in row if j)
        out.setdefault(key, set()).add(round(v, 12))
    return out


def stretch_overlay(spec_a: NetworkSpec, spec_b: NetworkSpec, tables: SieveTables | None = None) -> dict:
    """Rescaled ``(i/N, c_i)`` point sets for two networks plus per-region shape/value agreement."""
    big = max(spec_a.size, spec_b.size)
    t = tables or get_tables(big)
    prof = {}
    points = {}
    for key, s in (("a", spec_a), ("b", spec_b)):
        c = clustering_profile(s, t).values
        prof[key] = c
        lab = np.arange(1, s.size + 1)
        points[key] = np.column_stack((lab / s.size, c[1:]))
    regions = []
    for a, b in REGIONS:
        va = _shape_values(spec_a, prof["a"], t, a, b)
        vb = _shape_values(spec_b, prof["b"], t, a, b)
        common = sorted(set(va) & set(vb))
        vals_a = sorted(set().union(*(va[s] for s in common)))
        vals_b = sorted(set().union(*(vb[s] for s in common)))
        inter = sorted(set(vals_a) & set(vals_b))
        regions.append({
            "region": [1 / a, 1 / b],
            "common_shapes": [list(s) for s in common],
            "values_a": vals_a,
            "values_b": vals_b,
            "intersection": inter,
            "intersection_size": len(inter),
        })
    steps = {key: [(s.size // r) / s.size for r in (2, 3, 4)] for key, s in (("a", spec_a), ("b", spec_b))}
    return {"points_a": points["a"], "points_b": points["b"], "regions": regions, "steps": steps}
