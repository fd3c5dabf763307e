"""Command-line surface and benchmark harness.

Commands:
  tune       optimize (C, gamma) for one dataset with one algorithm and seed
  benchmark  run an algorithm-by-seed sweep, score held-out error, emit reports
  grid       exhaustive lattice search baseline
  gen-data   write a synthetic banana-shaped dataset in libsvm format

Exit codes are a stable scripting contract: 0 success, 2 usage or config
error (including unreadable input), 3 output I/O error. Machine-readable
benchmark rows are JSON lines with the keys {algorithm, seed, best_c,
best_gamma, cv_fitness, test_error, evaluations, wall_ms}; error rates are
stored as fractions and rendered as percentages only in the human table.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .controller import ALGORITHMS, RunConfig, RunResult, run
from .data import (
    Dataset,
    dump_libsvm,
    gen_banana,
    load_csv,
    load_libsvm,
    normalize_apply,
    normalize_fit,
)
from .objective import CvObjective, make_folds, test_error
from .pso import PsoConfig
from .space import SearchSpace, decode
from .svm import SmoConfig


class UsageError(Exception):
    """Bad flags, bad config, or unreadable input; maps to exit code 2."""


class OutputError(Exception):
    """Could not write requested output; maps to exit code 3."""


@dataclass(frozen=True)
class DataSource:
    """Either a pair of dataset files or a synthetic banana specification."""

    train_path: Optional[str] = None
    test_path: Optional[str] = None
    label_column: int = 0
    banana_train: Optional[int] = None
    banana_test: int = 0
    noise: float = 0.35

    @property
    def synthetic(self) -> bool:
        return self.banana_train is not None

    def load(self, seed: int) -> tuple[Dataset, Optional[Dataset]]:
        """Materialize (train, test); synthetic data is regenerated per seed."""
        if self.synthetic:
            total = self.banana_train + self.banana_test
            data = gen_banana(total, self.noise, seed)
            train = data.subset(np.arange(self.banana_train), name=data.name + "/train")
            test = (
                data.subset(np.arange(self.banana_train, total), name=data.name + "/test")
                if self.banana_test
                else None
            )
            return train, test
        train = _load_file(self.train_path, self.label_column)
        test = _load_file(self.test_path, self.label_column) if self.test_path else None
        return train, test


def _load_file(path: str, label_column: int) -> Dataset:
    try:
        if str(path).endswith(".csv"):
            return load_csv(path, label_column)
        return load_libsvm(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read dataset {path}: {exc}") from exc


@dataclass
class BenchmarkSpec:
    """One benchmark sweep: data source, algorithms, seeds, and shared settings."""

    source: DataSource
    algorithms: list[str]
    seeds: list[int]
    folds: int = 5
    normalize: bool = True
    cache: bool = False
    workers: int = 1
    run_config: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self):
        if not self.algorithms:
            raise UsageError("need at least one algorithm")
        if not self.seeds:
            raise UsageError("need at least one seed")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise UsageError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")


@dataclass
class BenchmarkReport:
    rows: list[dict]
    aggregates: dict


def _make_objective(train: Dataset, folds: int, seed: int, cache: bool) -> CvObjective:
    plan = make_folds(train, folds, seed)
    return CvObjective(train, plan, SmoConfig(), cache=cache)


def run_cell(payload: dict) -> dict:
    """Run one (algorithm, seed) benchmark cell; never raises, failures go in the row."""
    algorithm = payload["algorithm"]
    seed = payload["seed"]
    row = {
        "algorithm": algorithm,
        "seed": seed,
        "best_c": None,
        "best_gamma": None,
        "cv_fitness": None,
        "test_error": None,
        "evaluations": None,
        "wall_ms": None,
    }
    try:
        spec: BenchmarkSpec = payload["spec"]
        train, test = spec.source.load(seed)
        if spec.normalize:
            stats = normalize_fit(train)
            train = normalize_apply(stats, train)
            test = normalize_apply(stats, test) if test is not None else None
        objective = _make_objective(train, spec.folds, seed, spec.cache)
        config = replace(spec.run_config, algorithm=algorithm, strategy=None, seed=seed)
        result = run(config, objective)
        params = decode(result.best_position)
        row.update(
            best_c=params.c,
            best_gamma=params.gamma,
            cv_fitness=result.best_fitness,
            evaluations=result.evaluations,
            wall_ms=result.wall_time * 1000.0,
        )
        if test is not None:
            row["test_error"] = test_error(train, test, result.best_position)
    except Exception as exc:  # cell failures must not abort the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_benchmark(spec: BenchmarkSpec) -> BenchmarkReport:
    """Run every (algorithm, seed) cell and aggregate per algorithm."""
    payloads = [
        {"algorithm": algorithm, "seed": seed, "spec": spec}
        for algorithm in spec.algorithms
        for seed in spec.seeds
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(run_cell, payloads))
    else:
        rows = [run_cell(payload) for payload in payloads]
    rows.sort(key=lambda r: (r["algorithm"], r["seed"]))
    return BenchmarkReport(rows=rows, aggregates=aggregate_rows(rows))


def aggregate_rows(rows: list[dict]) -> dict:
    """Per-algorithm mean/std of test error and evaluation count, mean wall time."""
    aggregates: dict = {}
    for algorithm in sorted({row["algorithm"] for row in rows}):
        ok = [r for r in rows if r["algorithm"] == algorithm and "error" not in r]
        entry = {"runs": len(ok), "failures": sum(1 for r in rows if r["algorithm"] == algorithm) - len(ok)}
        errors = [r["test_error"] for r in ok if r["test_error"] is not None]
        evals = [r["evaluations"] for r in ok]
        walls = [r["wall_ms"] for r in ok]
        if errors:
            entry["mean_test_error"] = float(np.mean(errors))
            entry["std_test_error"] = float(np.std(errors, ddof=1)) if len(errors) > 1 else 0.0
        if evals:
            entry["mean_evaluations"] = float(np.mean(evals))
            entry["std_evaluations"] = float(np.std(evals, ddof=1)) if len(evals) > 1 else 0.0
            entry["mean_wall_ms"] = float(np.mean(walls))
        aggregates[algorithm] = entry
    return aggregates


def format_jsonl(report: BenchmarkReport) -> str:
    return "\n".join(json.dumps(row, sort_keys=True) for row in report.rows) + "\n"


def format_csv(report: BenchmarkReport) -> str:
    columns = [
        "algorithm", "seed", "best_c", "best_gamma",
        "cv_fitness", "test_error", "evaluations", "wall_ms",
    ]
    lines = [",".join(columns)]
    for row in report.rows:
        lines.append(",".join("" if row.get(c) is None else str(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def format_table(report: BenchmarkReport) -> str:
    """Human summary: error and #eva as percent/mean with std, one row per algorithm."""
    header = f"{'algorithm':<10} {'error(%)':>16} {'#eva':>18} {'time(s)':>9}"
    lines = [header, "-" * len(header)]
    for algorithm, agg in report.aggregates.items():
        if "mean_test_error" in agg:
            err = f"{100 * agg['mean_test_error']:.2f}±{100 * agg['std_test_error']:.2f}"
        else:
            err = "n/a"
        if "mean_evaluations" in agg:
            eva = f"{agg['mean_evaluations']:.1f}±{agg['std_evaluations']:.1f}"
            wall = f"{agg['mean_wall_ms'] / 1000.0:.2f}"
        else:
            eva, wall = "n/a", "n/a"
        lines.append(f"{algorithm:<10} {err:>16} {eva:>18} {wall:>9}")
        if agg.get("failures"):
            lines.append(f"{algorithm:<10} !! {agg['failures']} failed cell(s)")
    return "\n".join(lines) + "\n"


_FORMATTERS = {"jsonl": format_jsonl, "csv": format_csv, "table": format_table}
_EXTENSIONS = {"jsonl": "rows.jsonl", "csv": "rows.csv", "table": "summary.txt"}


def write_report(report: BenchmarkReport, out_dir, formats=("jsonl", "csv", "table")) -> list[str]:
    """Write the report in the requested formats; returns the written paths."""
    written = []
    try:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        for fmt in formats:
            if fmt not in _FORMATTERS:
                raise UsageError(f"unknown report format {fmt!r}")
            path = directory / _EXTENSIONS[fmt]
            path.write_text(_FORMATTERS[fmt](report))
            written.append(str(path))
    except OSError as exc:
        raise OutputError(f"cannot write report to {out_dir}: {exc}") from exc
    return written


def _source_from_args(args) -> DataSource:
    if getattr(args, "banana", None) is not None:
        return DataSource(
            banana_train=args.banana,
            banana_test=getattr(args, "test_size", 0),
            noise=args.noise,
        )
    if getattr(args, "data", None):
        return DataSource(
            train_path=args.data,
            test_path=getattr(args, "test_data", None),
            label_column=args.label_column,
        )
    raise UsageError("no dataset given: pass --data FILE or --banana N")


def _space_from_args(args) -> SearchSpace:
    lo, hi = args.bounds
    return SearchSpace(lower=np.array([lo, lo]), upper=np.array([hi, hi]))


def _run_config_from_args(args, algorithm: str) -> RunConfig:
    return RunConfig(
        algorithm=algorithm,
        space=_space_from_args(args),
        pso=PsoConfig(population_size=args.population),
        max_evaluations=args.max_evals,
        stall_evaluations=args.stall_evals,
        grid_step=args.grid_step,
        seed=getattr(args, "seed", 0),
    )


def _parse_seeds(text: str) -> list[int]:
    try:
        if "," in text:
            return [int(part) for part in text.split(",") if part.strip()]
        count = int(text)
    except ValueError:
        raise UsageError(f"bad --seeds value {text!r}: expected a count or a comma list") from None
    if count < 1:
        raise UsageError("--seeds count must be positive")
    return list(range(count))


def _print_run(result: RunResult, algorithm: str) -> None:
    params = decode(result.best_position)
    print(f"algorithm      : {algorithm}")
    print(f"seed           : {result.seed}")
    print(f"best C         : {params.c:.6g}  (log2 = {math.log2(params.c):.4f})")
    print(f"best gamma     : {params.gamma:.6g}  (log2 = {math.log2(params.gamma):.4f})")
    print(f"cv fitness     : {result.best_fitness:.6f}")
    print(f"evaluations    : {result.evaluations}")
    print(f"wall time (s)  : {result.wall_time:.3f}")


def _write_json(path, payload) -> None:
    try:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def cmd_tune(args) -> int:
    source = _source_from_args(args)
    train, test = source.load(args.seed)
    if args.normalize:
        stats = normalize_fit(train)
        train = normalize_apply(stats, train)
        test = normalize_apply(stats, test) if test is not None else None
    objective = _make_objective(train, args.folds, args.seed, args.cache)
    config = _run_config_from_args(args, args.algorithm)
    result = run(config, objective)
    _print_run(result, args.algorithm)
    params = decode(result.best_position)
    held_out = None
    if test is not None:
        held_out = test_error(train, test, result.best_position)
        print(f"test error     : {held_out:.6f}")
    if args.output:
        _write_json(
            args.output,
            {
                "algorithm": args.algorithm,
                "seed": args.seed,
                "best_c": params.c,
                "best_gamma": params.gamma,
                "cv_fitness": result.best_fitness,
                "test_error": held_out,
                "evaluations": result.evaluations,
                "wall_ms": result.wall_time * 1000.0,
            },
        )
    return 0


def cmd_benchmark(args) -> int:
    spec = BenchmarkSpec(
        source=_source_from_args(args),
        algorithms=[name.strip() for name in args.algorithms.split(",") if name.strip()],
        seeds=_parse_seeds(args.seeds),
        folds=args.folds,
        normalize=args.normalize,
        cache=args.cache,
        workers=args.workers,
        run_config=_run_config_from_args(args, "ma4"),
    )
    report = run_benchmark(spec)
    print(format_table(report), end="")
    if args.output:
        formats = tuple(f.strip() for f in args.format.split(",")) if args.format else (
            "jsonl", "csv", "table",
        )
        for path in write_report(report, args.output, formats):
            print(f"wrote {path}")
    return 0


def cmd_grid(args) -> int:
    source = _source_from_args(args)
    train, test = source.load(args.seed)
    if args.normalize:
        stats = normalize_fit(train)
        train = normalize_apply(stats, train)
        test = normalize_apply(stats, test) if test is not None else None
    objective = _make_objective(train, args.folds, args.seed, args.cache)
    config = _run_config_from_args(args, "gs")
    result = run(config, objective)
    _print_run(result, "gs")
    if test is not None:
        print(f"test error     : {test_error(train, test, result.best_position):.6f}")
    return 0


def cmd_gen_data(args) -> int:
    data = gen_banana(args.n, args.noise, args.seed)
    try:
        dump_libsvm(data, args.output)
    except OSError as exc:
        raise OutputError(f"cannot write {args.output}: {exc}") from exc
    print(f"wrote {args.output} ({len(data)} examples, noise={args.noise}, seed={args.seed})")
    return 0


def _add_data_flags(parser, with_test_size: bool) -> None:
    parser.add_argument("--config", help="JSON file of defaults; explicit flags override it")
    parser.add_argument("--data", help="training dataset (libsvm text, or .csv)")
    parser.add_argument("--test-data", dest="test_data", help="held-out dataset file")
    parser.add_argument("--label-column", dest="label_column", type=int, default=0,
                        help="label column for CSV input (default 0)")
    parser.add_argument("--banana", type=int, help="generate a banana-shaped training set of N points")
    parser.add_argument("--noise", type=float, default=0.35, help="banana noise level (default 0.35)")
    if with_test_size:
        parser.add_argument("--test-size", dest="test_size", type=int, default=0,
                            help="held-out points to generate alongside --banana")
    parser.add_argument("--no-normalize", dest="normalize", action="store_false",
                        help="skip z-score normalization")
    parser.set_defaults(normalize=True)


def _add_tuning_flags(parser) -> None:
    parser.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    parser.add_argument("--bounds", type=float, nargs=2, default=(-10.0, 10.0),
                        metavar=("LO", "HI"), help="log2 search bounds (default -10 10)")
    parser.add_argument("--population", type=int, default=15, help="swarm size (default 15)")
    parser.add_argument("--max-evals", dest="max_evals", type=int, default=1500,
                        help="fitness evaluation budget (default 1500)")
    parser.add_argument("--stall-evals", dest="stall_evals", type=int, default=450,
                        help="stop after this many evaluations without improvement (default 450)")
    parser.add_argument("--grid-step", dest="grid_step", type=float, default=0.5,
                        help="lattice step for grid search (default 0.5)")
    parser.add_argument("--cache", action="store_true",
                        help="memoize fitness values (repeats still count as evaluations)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memetune",
        description="Tune SVM (C, gamma) with a swarm + stencil-search memetic optimizer.",
    )
    parser.add_argument("--config", help="JSON file of defaults; explicit flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    tune = sub.add_parser("tune", help="optimize parameters on one dataset")
    _add_data_flags(tune, with_test_size=True)
    _add_tuning_flags(tune)
    tune.add_argument("--algorithm", default="ma4", choices=[a for a in ALGORITHMS],
                      help="search algorithm (default ma4)")
    tune.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
    tune.add_argument("--output", help="write the result as JSON to this file")
    tune.set_defaults(func=cmd_tune)

    bench = sub.add_parser("benchmark", help="algorithm-by-seed comparison sweep")
    _add_data_flags(bench, with_test_size=True)
    _add_tuning_flags(bench)
    bench.add_argument("--algorithms", default="pso,ma1,ma2,ma3,ma4,gs",
                       help="comma list of algorithms (default all)")
    bench.add_argument("--seeds", default="30",
                       help="seed count, or explicit comma list (default 30)")
    bench.add_argument("--workers", type=int, default=1, help="parallel cells (default 1)")
    bench.add_argument("--output", help="directory for report files")
    bench.add_argument("--format", help="comma list of report formats: jsonl,csv,table")
    bench.set_defaults(func=cmd_benchmark)

    grid = sub.add_parser("grid", help="exhaustive lattice baseline")
    _add_data_flags(grid, with_test_size=True)
    _add_tuning_flags(grid)
    grid.add_argument("--seed", type=int, default=0, help="fold seed (default 0)")
    grid.set_defaults(func=cmd_grid)

    gen = sub.add_parser("gen-data", help="write a synthetic banana dataset")
    gen.add_argument("--config", help="JSON file of defaults; explicit flags override it")
    gen.add_argument("--n", type=int, required=True, help="number of examples")
    gen.add_argument("--noise", type=float, default=0.35, help="noise level (default 0.35)")
    gen.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    gen.add_argument("--output", required=True, help="libsvm file to write")
    gen.set_defaults(func=cmd_gen_data)
    parser.subcommands = {"tune": tune, "benchmark": bench, "grid": grid, "gen-data": gen}
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Load --config JSON as defaults on every subparser so explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    try:
        loaded = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise UsageError(f"config {known.config} must be a JSON object")
    valid = {
        action.dest
        for sub in parser.subcommands.values()
        for action in sub._actions
    }
    unknown = set(loaded) - valid
    if unknown:
        raise UsageError(f"config {known.config}: unknown keys {sorted(unknown)}")
    for sub in parser.subcommands.values():
        sub.set_defaults(**{k: v for k, v in loaded.items()
                            if k in {a.dest for a in sub._actions}})


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
