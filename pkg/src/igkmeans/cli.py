"""Command-line front end: run detectors, benchmark methods across datasets,
sweep thresholds, generate synthetic data, and render SVG plots.

All commands are seeded and write deterministic files: rerunning with the
same config and seeds reproduces every output byte-for-byte (wall-clock
timing is only recorded when --timing is passed).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields as dc_fields
from dataclasses import replace
from pathlib import Path

import numpy as np

from .dataset import (
    DataSet,
    DatasetFormatError,
    GenSpec,
    generate,
    load_dataset,
    load_ground_truth,
    save_points,
)
from .evaluation import METHODS, evaluate_run, threshold_sweep
from .genetic_kmeans import GaConfig, IgkConfig
from .kmeans import assign
from .outlier_detection import EmptySurvivorsError, OdinConfig, RemovalConfig
from .plotting import curve_svg, scatter_svg, write_svg

__all__ = ["main"]

# sizes of the public a1/a2/a3 benchmark sets, used to sanity-check loads
KNOWN_BENCH_SETS = {"a1": (3000, 20), "a2": (5250, 35), "a3": (7500, 50)}

METRICS_HEADER = [
    "method", "dataset", "seed", "mse_best", "mse", "jc",
    "removed_count", "surviving_n", "runtime_ms", "early_stop",
]
REMOVED_HEADER = ["seed", "iteration", "point_id", "oi"]
BENCH_HEADER = ["method", "dataset", "mse_best", "mse_median", "removed_median", "error"]
SWEEP_HEADER = ["threshold", "mse_median", "removed_median"]

DEFAULT_SWEEP_THRESHOLDS = [round(0.5 + 0.05 * i, 2) for i in range(11)]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_json(path: Path, header: list[str], rows: list[list]) -> None:
    records = [dict(zip(header, row)) for row in rows]
    path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_rows(out_dir: Path, name: str, fmt: str, header: list[str], rows: list[list]) -> Path:
    path = out_dir / f"{name}.{fmt}"
    if fmt == "csv":
        _write_csv(path, header, rows)
    else:
        _write_json(path, header, rows)
    return path


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"invalid seed list {text!r}; expected comma-separated integers")
    if not seeds:
        raise ValueError("seed list is empty")
    return seeds


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ValueError(f"config file {path}: top level must be an object")
    return cfg


def _from_section(cls, section: dict, **overrides):
    allowed = {f.name for f in dc_fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    merged = dict(section)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return cls(**merged)


def _pick(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    return config.get(key, default)


class _Settings:
    """Merged view of config-file values and command-line overrides."""

    def __init__(self, args):
        cfg = _load_config(getattr(args, "config", None))
        self.cfg = cfg
        self.method = _pick(getattr(args, "method", None), cfg, "method", None)
        self.data_path = _pick(getattr(args, "data", None), cfg, "data", None)
        self.truth_path = _pick(getattr(args, "truth", None), cfg, "truth", None)
        seeds = getattr(args, "seed", None)
        self.seeds = _parse_seeds(seeds) if seeds is not None else [int(s) for s in cfg.get("seeds", [0])]
        self.k = _pick(getattr(args, "k", None), cfg, "k", None)
        self.restarts = int(_pick(getattr(args, "restarts", None), cfg, "restarts", 10))
        self.out_dir = Path(_pick(getattr(args, "out", None), cfg, "out", "results"))
        self.fmt = _pick(getattr(args, "format", None), cfg, "format", "csv")
        self.timing = bool(getattr(args, "timing", False) or cfg.get("timing", False))
        self.threshold = _pick(getattr(args, "threshold", None), cfg, "threshold", None)
        self.iterations = _pick(getattr(args, "iterations", None), cfg, "iterations", None)
        self.knn_k = _pick(getattr(args, "knn_k", None), cfg, "knn_k", 5)
        self.k_prime = _pick(getattr(args, "k_prime", None), cfg.get("igk", {}), "k_prime", None)

    def resolve_k(self, truth) -> int:
        if self.k is not None:
            return int(self.k)
        if truth is not None:
            return truth.count
        raise ValueError("--k is required when no ground-truth file is given")

    def ga_config(self) -> GaConfig:
        return _from_section(GaConfig, self.cfg.get("ga", {}))

    def igk_config(self, k: int) -> IgkConfig:
        section = dict(self.cfg.get("igk", {}))
        section.pop("k", None)
        section.pop("k_prime", None)
        return _from_section(
            IgkConfig, section, k=k,
            k_prime=int(self.k_prime) if self.k_prime is not None else None,
            ga=self.ga_config(),
        )

    def removal_config(self) -> RemovalConfig:
        section = dict(self.cfg.get("removal", {}))
        return _from_section(
            RemovalConfig, section,
            threshold=float(self.threshold) if self.threshold is not None else None,
            iterations=int(self.iterations) if self.iterations is not None else None,
        )

    def odin_config(self, k: int) -> OdinConfig:
        section = dict(self.cfg.get("odin", {}))
        threshold = self.threshold if self.threshold is not None else section.pop("threshold", 0.9)
        section.pop("kmeans_k", None)
        return _from_section(
            OdinConfig, section,
            knn_k=int(self.knn_k), threshold=float(threshold), kmeans_k=k,
            restarts=self.restarts,
        )


def _check_known_set(name: str, data: DataSet, truth) -> None:
    expected = KNOWN_BENCH_SETS.get(name.lower())
    if expected is None:
        return
    exp_n, exp_m = expected
    if data.n != exp_n:
        print(
            f"warning: dataset {name!r} has {data.n} points, expected {exp_n}",
            file=sys.stderr,
        )
    if truth is not None and truth.count != exp_m:
        print(
            f"warning: truth for {name!r} has {truth.count} centroids, expected {exp_m}",
            file=sys.stderr,
        )


def _run_method_rows(settings: _Settings, method: str, dataset_name: str,
                     data: DataSet, truth) -> tuple[list[list], list[list], dict[int, np.ndarray]]:
    k = settings.resolve_k(truth)
    igk_cfg = settings.igk_config(k)
    removal = settings.removal_config()
    odin_cfg = settings.odin_config(k) if method == "odin" else None
    per_seed = []
    removed_rows: list[list] = []
    centroids: dict[int, np.ndarray] = {}
    for seed in settings.seeds:
        metrics, raw = evaluate_run(
            method, data, truth,
            seed=seed, k=k, restarts=settings.restarts,
            igk_cfg=igk_cfg, removal=removal, odin_cfg=odin_cfg,
            timing=settings.timing,
        )
        per_seed.append(metrics)
        if hasattr(raw, "all_removed"):
            for rec in raw.all_removed:
                removed_rows.append([seed, rec.iteration, rec.point_id, rec.oi])
            centroids[seed] = raw.final_clustering.centroids
        else:
            centroids[seed] = raw.centroids
    mses = [m.mse for m in per_seed if m.mse is not None]
    mse_best = min(mses) if mses else None
    metric_rows = [
        [method, dataset_name, m.seed, mse_best, m.mse, m.jc_final,
         m.removed_count, m.surviving_n, m.runtime_ms, m.early_stop]
        for m in per_seed
    ]
    return metric_rows, removed_rows, centroids


def cmd_run(args) -> int:
    settings = _Settings(args)
    if settings.method not in METHODS:
        raise ValueError(f"--method must be one of {METHODS}, got {settings.method!r}")
    if settings.data_path is None:
        raise ValueError("--data is required")
    data = load_dataset(settings.data_path)
    truth = (
        load_ground_truth(settings.truth_path, data.dim)
        if settings.truth_path else None
    )
    dataset_name = Path(settings.data_path).stem
    _check_known_set(dataset_name, data, truth)
    metric_rows, removed_rows, centroids = _run_method_rows(
        settings, settings.method, dataset_name, data, truth
    )
    out = settings.out_dir
    out.mkdir(parents=True, exist_ok=True)
    metrics_path = _write_rows(out, "metrics", settings.fmt, METRICS_HEADER, metric_rows)
    _write_rows(out, "removed", settings.fmt, REMOVED_HEADER, removed_rows)
    for seed, centers in centroids.items():
        save_points(out / f"centroids-{seed}.txt", centers)
    for row in metric_rows:
        print(
            f"{row[0]} dataset={row[1]} seed={row[2]} mse={_cell(row[4]) or 'n/a'} "
            f"jc={row[5]} removed={row[6]} early_stop={_cell(row[9])}"
        )
    print(f"wrote {metrics_path}")
    return 0


def _parse_named_paths(entries: list[str] | None, flag: str) -> dict[str, str]:
    named = {}
    for entry in entries or []:
        name, sep, path = entry.partition("=")
        if not sep or not name or not path:
            raise ValueError(f"{flag} expects NAME=PATH, got {entry!r}")
        named[name] = path
    return named


def cmd_bench(args) -> int:
    settings = _Settings(args)
    datasets = _parse_named_paths(args.data, "--data") or {
        str(name): path for name, path in settings.cfg.get("datasets", {}).items()
    }
    truths = _parse_named_paths(args.truth, "--truth") or {
        str(name): path for name, path in settings.cfg.get("truths", {}).items()
    }
    if not datasets:
        raise ValueError("bench requires at least one --data NAME=PATH")
    missing = sorted(set(datasets) - set(truths))
    if missing:
        raise ValueError(f"bench requires a --truth NAME=PATH for: {missing}")
    methods = (args.methods or settings.cfg.get("methods", "kmeans,orc,proposed")).split(",")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown bench method {m!r}")
    bench_rows: list[list] = []
    run_rows: list[list] = []
    grid: dict[tuple[str, str], str] = {}
    for name, path in datasets.items():
        data = load_dataset(path)
        truth = load_ground_truth(truths[name], data.dim)
        _check_known_set(name, data, truth)
        for method in methods:
            try:
                metric_rows, _, _ = _run_method_rows(settings, method, name, data, truth)
            except Exception as exc:  # record the cell failure, keep benching
                bench_rows.append([method, name, None, None, None, str(exc)])
                grid[(method, name)] = "error"
                continue
            run_rows.extend(metric_rows)
            mses = [row[4] for row in metric_rows]
            removed = [row[6] for row in metric_rows]
            best = min(mses)
            med = float(np.median(mses))
            bench_rows.append([method, name, best, med, float(np.median(removed)), None])
            grid[(method, name)] = f"{best:.4g} ({med:.4g})"
    out = settings.out_dir
    out.mkdir(parents=True, exist_ok=True)
    bench_path = _write_rows(out, "bench", settings.fmt, BENCH_HEADER, bench_rows)
    _write_rows(out, "bench_runs", settings.fmt, METRICS_HEADER, run_rows)
    names = list(datasets)
    width = max(12, *(len(n) + 2 for n in names))
    print("best (median) mse per cell")
    print("method".ljust(10) + "".join(n.ljust(width + 10) for n in names))
    for method in methods:
        cells = "".join(grid.get((method, n), "n/a").ljust(width + 10) for n in names)
        print(method.ljust(10) + cells)
    print(f"wrote {bench_path}")
    return 0


def cmd_sweep(args) -> int:
    settings = _Settings(args)
    method = settings.method or "orc"
    if method not in ("odin", "orc", "proposed"):
        raise ValueError(f"--method must be odin, orc, or proposed, got {method!r}")
    if settings.data_path is None:
        raise ValueError("--data is required")
    if settings.truth_path is None:
        raise ValueError("--truth is required for a sweep (mse needs ground truth)")
    data = load_dataset(settings.data_path)
    truth = load_ground_truth(settings.truth_path, data.dim)
    k = settings.resolve_k(truth)
    if args.thresholds:
        thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    else:
        thresholds = [float(t) for t in settings.cfg.get("thresholds", DEFAULT_SWEEP_THRESHOLDS)]
    rows = threshold_sweep(
        data, truth, method, thresholds, settings.seeds,
        k=k, restarts=settings.restarts,
        igk_cfg=settings.igk_config(k),
        removal=settings.removal_config(),
        odin_cfg=settings.odin_config(k) if method == "odin" else None,
    )
    out = settings.out_dir
    out.mkdir(parents=True, exist_ok=True)
    table = [[r.threshold, r.mse_median, r.removed_median] for r in rows]
    sweep_path = _write_rows(out, "sweep", settings.fmt, SWEEP_HEADER, table)
    if args.plot:
        svg = curve_svg(
            np.array([r.threshold for r in rows]),
            np.array([r.mse_median for r in rows]),
            x_label="threshold", y_label="median mse",
            title=f"{method}: threshold vs mse",
        )
        write_svg(args.plot, svg)
        print(f"wrote {args.plot}")
    print(f"wrote {sweep_path}")
    return 0


def cmd_gen(args) -> int:
    lo, hi = (float(v) for v in args.box.split(","))
    spec = GenSpec(
        num_clusters=args.clusters,
        points_per_cluster=args.per_cluster,
        dimension=args.dim,
        spread=args.spread,
        box=(lo, hi),
        outlier_fraction=args.outlier_fraction,
        seed=args.gen_seed,
    )
    data, truth = generate(spec)
    data_out = Path(args.data_out)
    truth_out = Path(args.truth_out)
    data_out.parent.mkdir(parents=True, exist_ok=True)
    truth_out.parent.mkdir(parents=True, exist_ok=True)
    save_points(data_out, data.points)
    save_points(truth_out, truth.centroids)
    print(f"wrote {data_out} ({data.n} points, dim {data.dim})")
    print(f"wrote {truth_out} ({truth.count} centroids)")
    return 0


def _read_removed_ids(path: str) -> list[int]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        if path.endswith(".json"):
            records = json.load(fh)
        else:
            records = list(csv.DictReader(fh))
    # several seeds may list the same point; each id marks one spot
    return sorted({int(rec["point_id"]) for rec in records})


def _read_sweep(path: str) -> tuple[list[float], list[float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        if path.endswith(".json"):
            records = json.load(fh)
        else:
            records = list(csv.DictReader(fh))
    ts = [float(rec["threshold"]) for rec in records]
    ms = [float(rec["mse_median"]) for rec in records]
    return ts, ms


def cmd_plot(args) -> int:
    if args.kind == "mse_vs_threshold":
        if not args.sweep:
            raise ValueError("--sweep FILE is required for mse_vs_threshold")
        ts, ms = _read_sweep(args.sweep)
        svg = curve_svg(np.array(ts), np.array(ms), "threshold", "median mse")
    else:
        if not args.data or not args.centroids:
            raise ValueError("--data and --centroids are required for scatter plots")
        data = load_dataset(args.data)
        if data.dim != 2:
            raise ValueError(f"scatter plots require 2-D data, got dimension {data.dim}")
        centroids = load_dataset(args.centroids).points
        labels = assign(data, centroids)
        removed_pts = None
        if args.kind == "scatter_removed":
            if not args.removed:
                raise ValueError("--removed FILE is required for scatter_removed")
            removed_ids = _read_removed_ids(args.removed)
            id_to_row = {int(pid): i for i, pid in enumerate(data.ids)}
            rows = [id_to_row[pid] for pid in removed_ids if pid in id_to_row]
            removed_pts = data.points[rows] if rows else None
        svg = scatter_svg(data.points, labels, centroids, removed_pts)
    write_svg(args.out, svg)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igkmeans",
        description="Clustering and outlier detection via genetic k-means, with "
                    "ODIN/ORC/k-means baselines and a seeded benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--seed", help="comma-separated seed list (default: 0)")
        p.add_argument("--out", help="output directory (default: results)")
        p.add_argument("--format", choices=["csv", "json"], help="result file format")
        p.add_argument("--restarts", type=int, help="k-means restarts (default: 10)")
        p.add_argument("--timing", action="store_true",
                       help="record wall-clock runtime_ms (breaks byte-reproducibility)")

    def add_method_opts(p):
        p.add_argument("--data", help="dataset text file")
        p.add_argument("--truth", help="ground-truth centroid text file")
        p.add_argument("--k", type=int, help="cluster count (default: truth size)")
        p.add_argument("--k-prime", dest="k_prime", type=int,
                       help="inflated center count for the genetic pipeline (default: 2k)")
        p.add_argument("--threshold", type=float, help="removal threshold in (0, 1]")
        p.add_argument("--iterations", type=int, help="removal iterations")
        p.add_argument("--knn-k", dest="knn_k", type=int,
                       help="kNN graph size for odin (default: 5)")

    run_p = sub.add_parser("run", help="run one method over the seed list")
    run_p.add_argument("--method", choices=METHODS)
    add_method_opts(run_p)
    add_common(run_p)
    run_p.set_defaults(func=cmd_run)

    bench_p = sub.add_parser("bench", help="compare methods across datasets")
    bench_p.add_argument("--data", action="append", metavar="NAME=PATH",
                         help="dataset entry; repeatable")
    bench_p.add_argument("--truth", action="append", metavar="NAME=PATH",
                         help="ground-truth entry; repeatable")
    bench_p.add_argument("--methods", help="comma list (default: kmeans,orc,proposed)")
    bench_p.add_argument("--k", type=int, help="cluster count (default: per-truth size)")
    bench_p.add_argument("--k-prime", dest="k_prime", type=int)
    bench_p.add_argument("--threshold", type=float)
    bench_p.add_argument("--iterations", type=int)
    add_common(bench_p)
    bench_p.set_defaults(func=cmd_bench)

    sweep_p = sub.add_parser("sweep", help="sweep a detector across thresholds")
    sweep_p.add_argument("--method", choices=["odin", "orc", "proposed"])
    sweep_p.add_argument("--thresholds", help="comma list (default: 0.5..1.0 step 0.05)")
    sweep_p.add_argument("--plot", help="also write an mse-vs-threshold SVG here")
    add_method_opts(sweep_p)
    add_common(sweep_p)
    sweep_p.set_defaults(func=cmd_sweep)

    gen_p = sub.add_parser("gen", help="generate a synthetic dataset + truth file")
    gen_p.add_argument("--clusters", type=int, required=True)
    gen_p.add_argument("--per-cluster", dest="per_cluster", type=int, required=True)
    gen_p.add_argument("--dim", type=int, default=2)
    gen_p.add_argument("--spread", type=float, default=1.0)
    gen_p.add_argument("--box", default="0,100", metavar="LO,HI")
    gen_p.add_argument("--outlier-fraction", dest="outlier_fraction", type=float, default=0.0)
    gen_p.add_argument("--seed", dest="gen_seed", type=int, default=0)
    gen_p.add_argument("--data-out", dest="data_out", required=True)
    gen_p.add_argument("--truth-out", dest="truth_out", required=True)
    gen_p.set_defaults(func=cmd_gen)

    plot_p = sub.add_parser("plot", help="render an SVG from result files")
    plot_p.add_argument("--kind", required=True,
                        choices=["scatter_clusters", "scatter_removed", "mse_vs_threshold"])
    plot_p.add_argument("--data", help="dataset file (scatter kinds)")
    plot_p.add_argument("--centroids", help="centroid file (scatter kinds)")
    plot_p.add_argument("--removed", help="removed-point csv/json (scatter_removed)")
    plot_p.add_argument("--sweep", help="sweep csv/json (mse_vs_threshold)")
    plot_p.add_argument("--out", required=True)
    plot_p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, EmptySurvivorsError, DatasetFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
