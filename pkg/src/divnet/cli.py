"""``divnet`` command line: one subcommand per analysis, each writing data files
plus a ``manifest.json`` into the output directory."""

from __future__ import annotations

import argparse
import os
import platform
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .errors import CapacityError, DivnetError, UndefinedValueError, UsageError
from .graph import NetworkSpec, degree_sequence, edge_count
from .io import sha256_file, write_json, write_table
from .metrics import (
    assortativity,
    average_degree_asymptotic,
    connected_triplets,
    global_metrics,
    triangle_count,
    ws_clustering,
)
from .patterns import (
    PROFILE_CAP,
    band_check,
    clustering_profile,
    density_grid,
    stretch_overlay,
    successive_differences,
    symmetry_quantifier,
)
from .powerlaw import (
    DEFAULT_TAIL_FLOOR,
    bootstrap_pvalue,
    clustering_degree_profile,
    fit_alpha,
    fit_report,
    log_binned_histogram,
    select_kmin,
)
from .sieve import CACHE_ENV, get_tables

COMMANDS = ("degree-dist", "fit", "metrics", "sweep", "profile", "diff-symmetry", "hub-removal", "band-check", "overlay")
HUB_STEPS = ((), (1,), (1, 2), (1, 2, 3), (1, 2, 3, 4))
HUB_REMOVAL_CAP = 1 << 20
SWEEP_QUANTITIES = ("degree", "triangles", "clustering", "assortativity")


def parse_size(text: str) -> int:
    """Accept ``4096``, ``2^12`` or ``2**12``."""
    m = re.fullmatch(r"\s*(\d+)\s*(?:(?:\^|\*\*)\s*(\d+))?\s*", str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"not a size: {text!r}")
    base, exp = int(m.group(1)), m.group(2)
    value = base ** int(exp) if exp is not None else base
    if value < 1:
        raise argparse.ArgumentTypeError("size must be at least 1")
    return value


def parse_labels(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return sorted({int(t) for t in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated labels, got {text!r}") from None


@dataclass
class RunConfig:
    command: str
    size: int = 1024
    removed: list[int] = field(default_factory=list)
    seed: int = 0
    n_synthetic: int = 0
    output_dir: Path = Path("out")
    format: str = "csv"
    threads: int | None = 1
    cache_dir: Path | None = None
    # command specific
    min_size: int = 1 << 10
    max_size: int = 1 << 20
    size_b: int | None = None
    tail_floor: int = DEFAULT_TAIL_FLOOR
    k_min: int | None = None
    quantities: tuple[str, ...] = SWEEP_QUANTITIES

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.size < 1:
            raise UsageError("size must be at least 1")
        if self.n_synthetic < 0:
            raise UsageError("n_synthetic must be non-negative")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        unknown = set(self.quantities) - set(SWEEP_QUANTITIES)
        if unknown:
            raise UsageError(f"unknown sweep quantities: {sorted(unknown)}")

    @property
    def spec(self) -> NetworkSpec:
        return NetworkSpec(self.size, frozenset(self.removed))

    @property
    def n_threads(self) -> int:
        return self.threads or os.cpu_count() or 1


class Run:
    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.output_dir)
        self.files: list[Path] = []

    def table(self, name: str, header, rows) -> None:
        self.files.append(write_table(self.out / name, self.config.format, header, rows))

    def json(self, name: str, obj) -> None:
        self.files.append(write_json(self.out / f"{name}.json", obj))

    def tables(self, size: int):
        return get_tables(size, self.config.cache_dir)


# -- commands ----------------------------------------------------------------------


def _hist_rows(h):
    return zip(h.bin_edges.tolist(), (2 * h.bin_edges).tolist(), h.centers.tolist(), h.counts.tolist(),
               h.densities.tolist())


HIST_HEADER = ("bin_lo", "bin_hi", "center", "count", "density")


def cmd_degree_dist(run: Run) -> dict:
    spec = run.config.spec
    k = degree_sequence(spec, run.tables(spec.size)).present()
    h = log_binned_histogram(k[k > 0])
    run.table("degree_distribution", HIST_HEADER, _hist_rows(h))
    return {"spec": spec.to_dict(), "isolated": int((k == 0).sum()), "bins": int(h.counts.size)}


def _fit(run: Run, degrees) -> dict:
    cfg = run.config
    k = np.asarray(degrees)
    k = k[k > 0]
    fit = select_kmin(k, tail_floor=cfg.tail_floor)
    gof = None
    if cfg.n_synthetic:
        gof = bootstrap_pvalue(k, fit, cfg.n_synthetic, cfg.seed, cfg.tail_floor, threads=cfg.n_threads)
    doc = fit_report(fit, gof)
    doc["seed"] = cfg.seed
    doc["alpha_literal_denominator"] = fit_alpha(k, fit.k_min, literal=True)
    if cfg.k_min is not None:
        doc["fixed_k_min"] = cfg.k_min
        doc["alpha_fixed_k_min"] = fit_alpha(k, cfg.k_min)
    return doc


def cmd_fit(run: Run) -> dict:
    spec = run.config.spec
    doc = _fit(run, degree_sequence(spec, run.tables(spec.size)).present())
    run.json("fit", doc)
    return doc


def _metrics_doc(spec: NetworkSpec, tables) -> dict:
    g = global_metrics(spec, tables).to_dict()
    g["avg_degree_asymptotic"] = average_degree_asymptotic(spec.size) if spec.size >= 2 else None
    if not spec.removed:
        g["triangles_paper_literal"] = triangle_count(spec, "paper_literal", tables)
    g["connected_triplets_paper_un"] = connected_triplets(spec, "paper_un", tables)
    g["removed"] = sorted(spec.removed)
    return g


def cmd_metrics(run: Run) -> dict:
    spec = run.config.spec
    if spec.size > PROFILE_CAP:
        raise CapacityError(f"full metrics need clustering profiles, capped at {PROFILE_CAP} nodes")
    doc = _metrics_doc(spec, run.tables(spec.size))
    run.json("metrics", doc)
    return doc


SWEEP_HEADER = ("n", "m", "avg_degree", "avg_degree_asymptotic", "triangles", "connected_triplets",
                "global_clustering", "ws_clustering", "assortativity")


def cmd_sweep(run: Run) -> dict:
    cfg = run.config
    q = set(cfg.quantities)
    heavy = q - {"degree"}
    if heavy and cfg.max_size > PROFILE_CAP:
        raise CapacityError(f"{sorted(heavy)} are capped at {PROFILE_CAP} nodes; pass --quantities degree for larger sweeps")
    rows = []
    n = cfg.min_size
    while n <= cfg.max_size:
        spec = NetworkSpec(n)
        m = edge_count(spec)
        row = [n, m, 2 * m / n, average_degree_asymptotic(n) if n >= 2 else None, None, None, None, None, None]
        if heavy:
            t = run.tables(n)
            if q & {"triangles", "clustering"}:
                row[4] = triangle_count(spec, tables=t)
                row[5] = connected_triplets(spec, tables=t)
                row[6] = 3 * row[4] / row[5] if row[5] else None
            if "clustering" in q:
                row[7] = ws_clustering(spec, t)
            if "assortativity" in q:
                try:
                    row[8] = assortativity(spec, t)
                except UndefinedValueError:
                    pass
        rows.append(row)
        n *= 2
    run.table("sweep", SWEEP_HEADER, ([("" if v is None else v) for v in r] for r in rows))
    return {"sizes": [r[0] for r in rows], "quantities": sorted(q)}


def cmd_profile(run: Run) -> dict:
    spec = run.config.spec
    prof = clustering_profile(spec, run.tables(spec.size))
    run.table("profile", ("index", "value"), zip(range(1, spec.size + 1), prof.values[1:].tolist()))
    h = clustering_degree_profile(spec, run.tables(spec.size))
    run.table("clustering_vs_degree", HIST_HEADER, _hist_rows(h))
    return {"spec": spec.to_dict()}


def cmd_diff_symmetry(run: Run) -> dict:
    spec = run.config.spec
    prof = clustering_profile(spec, run.tables(spec.size))
    diffs = successive_differences(prof)
    grid = density_grid(diffs)
    sym = symmetry_quantifier(grid)
    run.table("diffs", ("index", "value"), zip(range(1, diffs.size + 1), diffs.tolist()))
    run.table("grid", ("x", "y", "rho"), grid.rows())
    run.table("phi", ("x", "phi"), zip(range(1, sym.phi.size + 1), sym.phi.tolist()))
    doc = {
        "spec": spec.to_dict(),
        "column_width": grid.column_width,
        "columns": int(grid.counts.shape[0]),
        "max_phi": sym.max,
        "axis_mass": int(grid.axis_mass.sum()),
    }
    run.json("symmetry", doc)
    return doc


def cmd_hub_removal(run: Run) -> dict:
    cfg = run.config
    if cfg.size > HUB_REMOVAL_CAP:
        raise CapacityError(f"hub removal is capped at {HUB_REMOVAL_CAP} nodes")
    t = run.tables(cfg.size)
    steps = []
    for removed in HUB_STEPS:
        spec = NetworkSpec(cfg.size, frozenset(removed))
        k = degree_sequence(spec, t).present()
        tag = "none" if not removed else "-".join(map(str, removed))
        h = log_binned_histogram(k[k > 0])
        run.table(f"degree_distribution_removed_{tag}", HIST_HEADER, _hist_rows(h))
        fit = select_kmin(k[k > 0], tail_floor=cfg.tail_floor)
        steps.append({"removed": list(removed), "isolated": int((k == 0).sum()), "edges": edge_count(spec),
                      **fit.to_dict()})
    doc = {"size": cfg.size, "steps": steps}
    run.json("hub_removal", doc)
    return doc


def cmd_band_check(run: Run) -> dict:
    spec = run.config.spec
    doc = band_check(spec, run.tables(spec.size)).to_dict()
    run.json("band_check", doc)
    return doc


def cmd_overlay(run: Run) -> dict:
    cfg = run.config
    a = NetworkSpec(cfg.size)
    b = NetworkSpec(cfg.size_b or 2 * cfg.size)
    res = stretch_overlay(a, b, run.tables(max(a.size, b.size)))
    run.table("overlay_a", ("x", "c"), res["points_a"].tolist())
    run.table("overlay_b", ("x", "c"), res["points_b"].tolist())
    doc = {"spec_a": a.to_dict(), "spec_b": b.to_dict(), "regions": res["regions"], "steps": res["steps"],
           "files": {"a": run.files[-2].name, "b": run.files[-1].name}}
    run.json("overlay", doc)
    return doc


HANDLERS = {
    "degree-dist": cmd_degree_dist,
    "fit": cmd_fit,
    "metrics": cmd_metrics,
    "sweep": cmd_sweep,
    "profile": cmd_profile,
    "diff-symmetry": cmd_diff_symmetry,
    "hub-removal": cmd_hub_removal,
    "band-check": cmd_band_check,
    "overlay": cmd_overlay,
}


def _config_doc(cfg: RunConfig) -> dict:
    doc = asdict(cfg)
    doc["quantities"] = list(cfg.quantities)
    return doc


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    started = time.perf_counter()
    r = Run(config)
    try:
        r.out.mkdir(parents=True, exist_ok=True)
        summary = HANDLERS[config.command](r)
    except DivnetError as exc:
        print(f"divnet {config.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError as exc:
        print(f"divnet {config.command}: out of memory ({exc})", file=sys.stderr)
        return CapacityError.exit_code
    manifest = {
        "command": config.command,
        "config": _config_doc(config),
        "versions": {"divnet": __version__, "python": platform.python_version(), "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "wall_time_s": time.perf_counter() - started,
        "files": [{"name": p.name, "sha256": sha256_file(p)} for p in r.files],
        "summary": summary,
    }
    write_json(r.out / "manifest.json", manifest)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--size", type=parse_size, default=1024, help="network size N (e.g. 4096 or 2^12)")
    common.add_argument("--removed", type=parse_labels, default=[], help="comma-separated labels to remove")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n-synthetic", type=int, default=0, help="bootstrap datasets for the p-value (0 skips it)")
    common.add_argument("--output-dir", type=Path, default=Path("out"))
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", default="1", help="worker threads, or 'auto'")
    common.add_argument("--cache-dir", type=Path, default=None,
                        help=f"sieve table cache (default: ${CACHE_ENV} if set)")
    common.add_argument("--tail-floor", type=int, default=DEFAULT_TAIL_FLOOR,
                        help="smallest tail size allowed when scanning k_min")

    parser = argparse.ArgumentParser(prog="divnet", description="Divisibility network of 1..N: build, measure, fit.")
    parser.add_argument("--version", action="version", version=f"divnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("degree-dist", parents=[common], help="log-binned degree distribution")
    p = sub.add_parser("fit", parents=[common], help="power-law fit and bootstrap p-value")
    p.add_argument("--k-min", type=int, default=None, help="also report alpha at this fixed k_min")
    sub.add_parser("metrics", parents=[common], help="global metrics at one size")
    p = sub.add_parser("sweep", parents=[common], help="global metrics over doubling sizes")
    p.add_argument("--min-size", type=parse_size, default=1 << 10)
    p.add_argument("--max-size", type=parse_size, default=1 << 20)
    p.add_argument("--quantities", default=",".join(SWEEP_QUANTITIES),
                   help=f"comma-separated subset of {','.join(SWEEP_QUANTITIES)}")
    sub.add_parser("profile", parents=[common], help="local clustering per node and per degree bin")
    sub.add_parser("diff-symmetry", parents=[common], help="successive differences, density grid, phi")
    sub.add_parser("hub-removal", parents=[common], help="degree distributions with hubs 1..4 removed")
    sub.add_parser("band-check", parents=[common], help="verify the c=1 and c=0 bands")
    p = sub.add_parser("overlay", parents=[common], help="stretched clustering overlay of two sizes")
    p.add_argument("--size-b", type=parse_size, default=None, help="second size (default 2*size)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    threads = None if str(args.threads).lower() == "auto" else int(args.threads)
    if threads is not None and threads < 1:
        raise UsageError("threads must be positive or 'auto'")
    cache_dir = args.cache_dir
    if cache_dir is None and os.environ.get(CACHE_ENV):
        cache_dir = Path(os.environ[CACHE_ENV])
    extra = {}
    for name in ("min_size", "max_size", "size_b", "k_min"):
        if hasattr(args, name):
            extra[name] = getattr(args, name)
    if hasattr(args, "quantities"):
        extra["quantities"] = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
    return RunConfig(
        command=args.command,
        size=args.size,
        removed=args.removed,
        seed=args.seed,
        n_synthetic=args.n_synthetic,
        output_dir=args.output_dir,
        format=args.format,
        threads=threads,
        cache_dir=cache_dir,
        tail_floor=args.tail_floor,
        **extra,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (DivnetError, ValueError) as exc:
        print(f"divnet: {exc}", file=sys.stderr)
        return UsageError.exit_code
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
