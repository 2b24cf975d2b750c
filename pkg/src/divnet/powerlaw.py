"""Discrete power-law fitting: MLE exponent, KS-driven k_min scan, and a
semiparametric bootstrap goodness-of-fit test. Also log-binned histograms.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import InsufficientDataError, UsageError

DEFAULT_TAIL_FLOOR = 10
SAMPLER_TABLE_CAP = 10**6


@dataclass(frozen=True)
class PowerLawFit:
    k_min: int
    alpha: float
    ks_distance: float
    n_tail: int

    def to_dict(self) -> dict:
        return {"k_min": self.k_min, "alpha": self.alpha, "ks": self.ks_distance, "n_tail": self.n_tail}


@dataclass(frozen=True)
class GoodnessOfFit:
    p_value: float
    n_synthetic: int
    seed: int
    synthetic_ks: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"p_value": self.p_value, "n_synthetic": self.n_synthetic, "seed": self.seed}


def fit_report(fit: PowerLawFit, gof: GoodnessOfFit | None = None) -> dict:
    """The JSON document for a fit: k_min, alpha, ks, n_tail, p_value, n_synthetic, seed."""
    doc = fit.to_dict()
    doc.update({"p_value": None, "n_synthetic": None, "seed": None} if gof is None else gof.to_dict())
    return doc


def _as_int_array(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.int64).ravel()
    if x.size and x.min() < 1:
        raise UsageError("power-law data must be positive integers")
    return x


def fit_alpha(degrees, k_min: int, literal: bool = False, method: str = "approx") -> float:
    """Maximum-likelihood exponent for the tail ``k >= k_min``.

    ``method="approx"`` uses the closed form ``1 + n / sum(ln(k / (k_min - 1/2)))``,
    which is accurate once k_min is around 6 or more. ``method="exact"``
    maximizes the Hurwitz-zeta likelihood numerically and stays unbiased down
    to k_min = 1. ``literal=True`` puts ``k - 1/2`` in the denominator of every
    term of the closed form; that variant is only kept for side-by-side output.
    """
    x = _as_int_array(degrees)
    tail = x[x >= k_min]
    if tail.size < 2:
        raise InsufficientDataError(f"need at least 2 observations >= {k_min}, got {tail.size}")
    if k_min == 1 and np.all(tail == 1):
        raise InsufficientDataError("degenerate tail: every observation equals k_min = 1")
    t = tail.astype(np.float64)
    if method == "exact":
        if np.all(tail == k_min):
            raise InsufficientDataError("exact likelihood has no maximum when every observation equals k_min")
        return _exact_alpha(t, k_min)
    if method != "approx":
        raise UsageError(f"unknown method {method!r}")
    denom = np.sum(np.log(t / (t - 0.5))) if literal else np.sum(np.log(t / (k_min - 0.5)))
    return 1.0 + tail.size / denom


def _exact_alpha(tail: np.ndarray, k_min: int) -> float:
    n = tail.size
    log_sum = np.log(tail).sum()

    def nll(a):
        return a * log_sum + n * np.log(zeta(a, k_min))

    res = minimize_scalar(nll, bounds=(1.0 + 1e-6, 20.0), method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def powerlaw_cdf(k, alpha: float, k_min: int) -> np.ndarray:
    """``P(X <= k)`` for the discrete power law on ``k >= k_min``."""
    k = np.asarray(k, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        return 1.0 - zeta(alpha, k + 1.0) / zeta(alpha, k_min)


def ks_distance(tail: np.ndarray, alpha: float, k_min: int) -> float:
    """Max gap between the empirical tail CDF and the fitted CDF over integers ``>= k_min``."""
    tail = np.sort(np.asarray(tail, dtype=np.int64))
    values, counts = np.unique(tail, return_counts=True)
    emp = np.cumsum(counts) / tail.size
    # Both CDFs are steps on the integers; between two observed values the
    # empirical CDF is flat and the model rises, so checking each observed value
    # and the integer just below the next one covers every extremum.
    at_obs = np.abs(emp - powerlaw_cdf(values, alpha, k_min))
    gaps = values[1:] - 1
    before_next = powerlaw_cdf(gaps, alpha, k_min) - emp[:-1]
    d = float(max(at_obs.max(), before_next.max(initial=0.0)))
    # zeta underflows for very steep fits to tiny tails; score those as the worst fit
    return d if np.isfinite(d) else 1.0


def select_kmin(degrees, tail_floor: int = DEFAULT_TAIL_FLOOR, min_distinct: int = 10,
                literal: bool = False) -> PowerLawFit:
    """Scan k_min over observed values and keep the fit with the smallest KS distance.

    Candidates leaving fewer than ``tail_floor`` observations (or fewer than 2
    distinct values) in the tail are skipped. Ties go to the smaller k_min.
    """
    x = np.sort(_as_int_array(degrees))
    values, counts = np.unique(x, return_counts=True)
    if values.size < min_distinct:
        raise InsufficientDataError(f"need at least {min_distinct} distinct values, got {values.size}")
    n_from = x.size - np.concatenate(([0], np.cumsum(counts)[:-1]))
    logs = np.log(x.astype(np.float64))
    log_suffix = np.concatenate((np.cumsum(logs[::-1])[::-1], [0.0]))
    first_idx = x.size - n_from
    floor = min(max(tail_floor, 2), x.size)
    best = None
    for pos, (k_min, n_tail) in enumerate(zip(values.tolist(), n_from.tolist())):
        if n_tail < floor or pos >= values.size - 1:
            break
        if literal:
            alpha = fit_alpha(x, k_min, literal=True)
        else:
            denom = log_suffix[first_idx[pos]] - n_tail * np.log(k_min - 0.5)
            alpha = 1.0 + n_tail / denom
        d = ks_distance(x[first_idx[pos]:], alpha, k_min)
        if best is None or d < best.ks_distance:
            best = PowerLawFit(k_min, float(alpha), d, n_tail)
    if best is None:
        raise InsufficientDataError(f"no k_min candidate leaves {floor} observations and 2 distinct values in the tail")
    return best


class DiscretePowerLaw:
    """Inverse-CDF sampler for ``p(k) = k^-alpha / zeta(alpha, k_min)``, ``k >= k_min``.

    Exact up to ``table_cap``; beyond it a continuous tail matched to
    ``(k - 1/2)^(1 - alpha)`` survival is used.
    """

    def __init__(self, alpha: float, k_min: int, table_cap: int = SAMPLER_TABLE_CAP):
        if alpha <= 1:
            raise UsageError(f"alpha must exceed 1, got {alpha}")
        self.alpha = float(alpha)
        self.k_min = int(k_min)
        self.table_cap = max(int(table_cap), self.k_min)

    @cached_property
    def _cdf(self) -> np.ndarray:
        k = np.arange(self.k_min, self.table_cap + 1, dtype=np.float64)
        pmf = k ** (-self.alpha) / zeta(self.alpha, self.k_min)
        return np.cumsum(pmf)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(size)
        cdf = self._cdf
        out = np.searchsorted(cdf, u, side="right").astype(np.int64) + self.k_min
        beyond = u >= cdf[-1]
        if beyond.any():
            v = rng.random(int(beyond.sum()))
            y = (self.table_cap + 0.5) * (1.0 - v) ** (-1.0 / (self.alpha - 1.0))
            out[beyond] = np.floor(y + 0.5).astype(np.int64)
        return out


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for bootstrap replicate ``index``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _synthetic_ks(b: int, data: np.ndarray, fit: PowerLawFit, model: DiscretePowerLaw, seed: int,
                  tail_floor: int) -> float:
    rng = replicate_rng(seed, b)
    n = data.size
    below = data[data < fit.k_min]
    p_tail = fit.n_tail / n
    from_model = rng.random(n) < p_tail if below.size else np.ones(n, dtype=bool)
    n_model = int(from_model.sum())
    synth = np.empty(n, dtype=np.int64)
    synth[from_model] = model.sample(n_model, rng)
    if n - n_model:
        synth[~from_model] = below[rng.integers(0, below.size, n - n_model)]
    try:
        return select_kmin(synth, tail_floor=tail_floor, min_distinct=2).ks_distance
    except InsufficientDataError:
        # a replicate too degenerate to refit carries no evidence against the model
        return float("inf")


def bootstrap_pvalue(degrees, fit: PowerLawFit, n_synthetic: int = 2500, seed: int = 0,
                     tail_floor: int = DEFAULT_TAIL_FLOOR, threads: int = 1) -> GoodnessOfFit:
    """Fraction of synthetic datasets whose refitted KS distance is at least the observed one."""
    if n_synthetic < 1:
        raise UsageError("n_synthetic must be at least 1")
    data = _as_int_array(degrees)
    model = DiscretePowerLaw(fit.alpha, fit.k_min)
    model.sample(1, np.random.default_rng(0))  # build the table before threads share it

    def run(b):
        return _synthetic_ks(b, data, fit, model, seed, tail_floor)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ks = np.fromiter(pool.map(run, range(n_synthetic)), dtype=np.float64, count=n_synthetic)
    else:
        ks = np.fromiter(map(run, range(n_synthetic)), dtype=np.float64, count=n_synthetic)
    exceed = int(np.count_nonzero(ks >= fit.ks_distance))
    return GoodnessOfFit(exceed / n_synthetic, n_synthetic, int(seed), ks)


# -- logarithmic binning ------------------------------------------------------------


@dataclass(frozen=True)
class LogBinnedHistogram:
    """Power-of-two bins ``[2^j, 2^(j+1))``; ``densities`` is the per-bin value
    (count / width for histograms, a bin mean for profiles). Only occupied bins are kept."""

    bin_edges: np.ndarray  # lower edges, 2^j
    densities: np.ndarray
    counts: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return self.bin_edges.astype(np.int64)

    @property
    def centers(self) -> np.ndarray:
        lo = self.bin_edges.astype(np.float64)
        return np.sqrt(lo * (2 * lo - 1))

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.centers.tolist(), self.densities.tolist()))

    def to_dict(self) -> dict:
        return asdict(self) | {"centers": self.centers}


def _bin_index(values: np.ndarray) -> np.ndarray:
    # floor(log2(v)) exactly, for integers v >= 1
    return np.frexp(values.astype(np.float64))[1].astype(np.int64) - 1


def log_binned_histogram(values) -> LogBinnedHistogram:
    x = _as_int_array(values)
    if x.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return LogBinnedHistogram(empty, np.zeros(0), empty)
    j = _bin_index(x)
    counts = np.bincount(j)
    occupied = np.nonzero(counts)[0]
    lower = np.int64(1) << occupied
    return LogBinnedHistogram(lower, counts[occupied] / lower, counts[occupied])


def log_binned_mean(keys, values) -> LogBinnedHistogram:
    """Mean of ``values`` within each power-of-two bin of ``keys``."""
    k = _as_int_array(keys)
    v = np.asarray(values, dtype=np.float64).ravel()
    if k.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return LogBinnedHistogram(empty, np.zeros(0), empty)
    j = _bin_index(k)
    counts = np.bincount(j)
    sums = np.bincount(j, weights=v)
    occupied = np.nonzero(counts)[0]
    return LogBinnedHistogram(np.int64(1) << occupied, sums[occupied] / counts[occupied], counts[occupied])


def loglog_slope(hist: LogBinnedHistogram, lo: float | None = None, hi: float | None = None) -> float:
    """Least-squares slope of log(density) on log(center) over bins with ``lo <= center <= hi``."""
    c = hist.centers
    d = hist.densities
    keep = d > 0
    if lo is not None:
        keep &= c >= lo
    if hi is not None:
        keep &= c <= hi
    if keep.sum() < 2:
        raise InsufficientDataError("need two occupied bins for a slope")
    return float(np.polyfit(np.log(c[keep]), np.log(d[keep]), 1)[0])


def clustering_degree_profile(spec, tables=None) -> LogBinnedHistogram:
    """Mean local clustering per power-of-two degree bin; isolated nodes are skipped."""
    from .graph import degree_sequence
    from .metrics import local_clustering_array

    k = degree_sequence(spec, tables).degrees[1:]
    c = local_clustering_array(spec, tables)[1:]
    keep = k > 0
    return log_binned_mean(k[keep], c[keep])
