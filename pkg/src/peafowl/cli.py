"""Batch command-line front end.

Four commands: ``bench`` (benchmark campaign), ``select`` (wrapper feature
selection), ``eval`` (train/test metrics for a feature set) and ``cv``
(k-fold cross validation).  A YAML config file may supply any flag value;
explicit flags win.  Results are written to files only (logs go to stderr)
and every output directory receives a manifest echoing the effective
configuration, so a run can be reproduced byte-for-byte from it.

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .benchmarks import benchmark_names, get_benchmark, run_campaign
from .data import TableSchema, load_dataset, make_folds
from .errors import ConfigError, DataError, EvaluationError
from .metrics import METRIC_FIELDS, compute_metrics
from .optimizer import PfmParams
from .selection import (
    FeatureSubset,
    WrapperFitnessSpec,
    cross_validate,
    evaluate_subset,
    select_features,
    top_subsets,
)

log = logging.getLogger("peafowl")

_CONFIG_KEYS = {
    "seed",
    "runs",
    "functions",
    "population",
    "iterations",
    "seasons",
    "alpha",
    "gamma1",
    "gamma2",
    "i0",
    "c0",
    "r_min",
    "r_max",
    "k_neighbors",
    "features",
    "folds",
    "train",
    "test",
    "schema",
    "out",
    "holdout_fraction",
    "top_subsets",
    "baseline",
    "dedup",
}

_DEFAULTS = {
    "seed": 0,
    "runs": 30,
    "functions": "all",
    "population": 30,
    "iterations": 500,
    "seasons": 3,
    "alpha": 0.8,
    "gamma1": 1.0,
    "gamma2": 1.0,
    "i0": 0.1,
    "c0": 0.1,
    "r_min": 0.4,
    "r_max": 0.6,
    "k_neighbors": 5,
    "features": "all",
    "folds": 10,
    "holdout_fraction": 0.2,
    "top_subsets": 3,
    "baseline": False,
    "dedup": False,
}


def _add_param_flags(sub):
    sub.add_argument("--seed", type=int)
    sub.add_argument("--population", type=int)
    sub.add_argument("--iterations", type=int)
    sub.add_argument("--seasons", type=int)
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--gamma1", type=float)
    sub.add_argument("--gamma2", type=float)
    sub.add_argument("--i0", type=float)
    sub.add_argument("--c0", type=float)
    sub.add_argument("--r-min", type=float, dest="r_min")
    sub.add_argument("--r-max", type=float, dest="r_max")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peafowl", description=__doc__)
    parser.add_argument("--version", action="version", version=f"peafowl {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    bench = commands.add_parser("bench", help="run the benchmark campaign")
    bench.add_argument("--config")
    bench.add_argument("--functions", help="comma-separated ids (F1..F23) or 'all'")
    bench.add_argument("--runs", type=int)
    bench.add_argument("--out")
    _add_param_flags(bench)

    select = commands.add_parser("select", help="wrapper feature selection on a dataset")
    select.add_argument("--config")
    select.add_argument("--train")
    select.add_argument("--schema")
    select.add_argument("--k-neighbors", type=int, dest="k_neighbors")
    select.add_argument("--out")
    _add_param_flags(select)

    evalp = commands.add_parser("eval", help="train/test metrics for a feature set")
    evalp.add_argument("--config")
    evalp.add_argument("--train")
    evalp.add_argument("--test")
    evalp.add_argument("--schema")
    evalp.add_argument("--features", help="comma-separated 1-based indices or 'all'")
    evalp.add_argument("--baseline", action="store_const", const=True, default=None,
                       help="also report the all-features row")
    evalp.add_argument("--k-neighbors", type=int, dest="k_neighbors")
    evalp.add_argument("--out")

    cv = commands.add_parser("cv", help="k-fold cross validation")
    cv.add_argument("--config")
    cv.add_argument("--train")
    cv.add_argument("--schema")
    cv.add_argument("--features")
    cv.add_argument("--folds", type=int)
    cv.add_argument("--k-neighbors", type=int, dest="k_neighbors")
    cv.add_argument("--seed", type=int)
    cv.add_argument("--out")

    return parser


def _load_config_file(path) -> dict:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"config file {path}: unknown keys {sorted(unknown)}")
    return raw


def _resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        merged[key] = value
    return merged


def _params_from(config: dict) -> PfmParams:
    try:
        return PfmParams(
            population_size=int(config["population"]),
            max_iterations=int(config["iterations"]),
            seasons_per_iteration=int(config["seasons"]),
            call_intensity=float(config["i0"]),
            colorfulness=float(config["c0"]),
            gamma1=float(config["gamma1"]),
            gamma2=float(config["gamma2"]),
            dominance_factor=float(config["alpha"]),
            r_range=(float(config["r_min"]), float(config["r_max"])),
            seed=int(config["seed"]),
        ).validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(cell) for cell in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: Path, payload) -> None:
    _write_atomic(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: dict) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": inputs,
        "package_version": __version__,
    }
    _write_json(out_dir / "manifest.json", manifest)


def _out_dir(config: dict) -> Path:
    out = config.get("out")
    if not out:
        raise ConfigError("--out directory is required")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _require(config: dict, *keys):
    for key in keys:
        if not config.get(key):
            raise ConfigError(f"--{key.replace('_', '-')} is required for this command")


def _parse_feature_list(spec_text: str, n_features: int):
    """'all' -> None (no masking); otherwise a 1-based index list."""
    if spec_text.strip().lower() == "all":
        return None
    try:
        indices = [int(tok) for tok in spec_text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse feature list {spec_text!r}") from None
    if not indices:
        raise ConfigError("feature list is empty")
    try:
        return FeatureSubset.from_indices(indices, n_features)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _metric_row(counts) -> dict:
    report = compute_metrics(counts)
    pct = report.as_percentages()
    row = {"tp": counts.tp, "tn": counts.tn, "fp": counts.fp, "fn": counts.fn}
    row.update({name: pct[name] for name in METRIC_FIELDS})
    return row


def cmd_bench(config: dict) -> int:
    out = _out_dir(config)
    requested = config["functions"]
    if isinstance(requested, str):
        names = benchmark_names() if requested.strip().lower() == "all" else [
            tok.strip() for tok in requested.split(",") if tok.strip()
        ]
    else:
        names = list(requested)
    for name in names:
        get_benchmark(name)
    params = _params_from(config)
    runs = int(config["runs"])
    if runs < 1:
        raise ConfigError("runs must be >= 1")

    log.info("bench: %d functions x %d runs (seed %d)", len(names), runs, params.seed)
    results = run_campaign(names, params, runs)

    header = ["function", "dimension", "runs", "avg", "std", "best", "worst"]
    rows = [[r.function, r.dimension, r.runs, r.avg, r.std, r.best, r.worst] for r in results]
    _write_csv(out / "results.csv", header, rows)
    _write_json(
        out / "results.json",
        [
            {
                "function": r.function,
                "dimension": r.dimension,
                "runs": r.runs,
                "avg": r.avg,
                "std": r.std,
                "best": r.best,
                "worst": r.worst,
                "per_run_best": r.per_run_best,
                "params": r.params,
            }
            for r in results
        ],
    )
    conv_rows = []
    for r in results:
        for run_idx, trace in enumerate(r.traces):
            for iteration, best in enumerate(trace):
                conv_rows.append([r.function, run_idx, iteration, best])
    _write_csv(out / "convergence.csv", ["function", "run", "iteration", "best"], conv_rows)
    # Wall times vary between runs; kept apart so primary files stay reproducible.
    _write_csv(out / "timings.csv", ["function", "wall_ms"], [[r.function, r.wall_ms] for r in results])
    _write_manifest(out, "bench", config, {})
    log.info("bench: wrote %s", out / "results.csv")
    return 0


def _load_train(config: dict):
    schema = TableSchema.from_yaml(config["schema"])
    train = load_dataset(config["train"], schema, dedup=bool(config["dedup"]))
    inputs = {
        "schema": {"path": str(config["schema"]), "fingerprint": schema.fingerprint()},
        "train": {"path": str(config["train"]), "sha256": _file_sha256(config["train"])},
    }
    return schema, train, inputs


def cmd_select(config: dict) -> int:
    _require(config, "train", "schema")
    out = _out_dir(config)
    _, train, inputs = _load_train(config)
    params = _params_from(config)
    spec = WrapperFitnessSpec(
        k_neighbors=int(config["k_neighbors"]),
        holdout_fraction=float(config["holdout_fraction"]),
    )
    log.info(
        "select: %d rows x %d features, pop %d, %d iterations",
        train.n_rows, train.n_features, params.population_size, params.max_iterations,
    )
    best, trace = select_features(train, params, spec)
    tops = top_subsets(trace.final_population, n=int(config["top_subsets"]))

    rows = [
        [f"FSs{i + 1}", subset.cardinality, '"' + ",".join(map(str, subset.indices)) + '"', fitness]
        for i, (subset, fitness) in enumerate(tops)
    ]
    _write_csv(out / "results.csv", ["subset_id", "n_features", "features", "fitness"], rows)
    _write_json(
        out / "results.json",
        {
            "best": {
                "n_features": best.cardinality,
                "features": best.indices,
                "fitness": trace.best_solution.fitness,
            },
            "subsets": [
                {"subset_id": f"FSs{i + 1}", "n_features": s.cardinality,
                 "features": s.indices, "fitness": fitness}
                for i, (s, fitness) in enumerate(tops)
            ],
            "evaluations": trace.evaluations,
            "seed": trace.seed,
        },
    )
    _write_csv(
        out / "convergence.csv",
        ["iteration", "best_fitness"],
        [[i, v] for i, v in enumerate(trace.best_per_iteration)],
    )
    _write_manifest(out, "select", config, inputs)
    log.info("select: best subset has %d features (fitness %.4f)", best.cardinality, trace.best_solution.fitness)
    return 0


def cmd_eval(config: dict) -> int:
    _require(config, "train", "test", "schema")
    out = _out_dir(config)
    schema, train, inputs = _load_train(config)
    test = load_dataset(config["test"], schema, fit_from=train, dedup=bool(config["dedup"]))
    inputs["test"] = {"path": str(config["test"]), "sha256": _file_sha256(config["test"])}
    k = int(config["k_neighbors"])

    mask = _parse_feature_list(str(config["features"]), train.n_features)
    requested = [("selected", mask)]
    if config["baseline"] and mask is not None:
        requested.append(("all_features", None))

    json_rows = []
    csv_rows = []
    for label, row_mask in requested:
        counts = evaluate_subset(row_mask, train, test, k)
        row = _metric_row(counts)
        features_text = "all" if row_mask is None else ",".join(map(str, row_mask.indices))
        csv_rows.append(
            [label, '"' + features_text + '"', k, row["tp"], row["tn"], row["fp"], row["fn"]]
            + [row[name] for name in METRIC_FIELDS]
        )
        report = compute_metrics(counts)
        json_rows.append(
            {
                "label": label,
                "features": features_text,
                "k_neighbors": k,
                "counts": {"tp": counts.tp, "tn": counts.tn, "fp": counts.fp, "fn": counts.fn},
                "fractions": report.as_fractions(),
                "percentages": report.as_percentages(),
            }
        )
    header = ["label", "features", "k"] + ["tp", "tn", "fp", "fn"] + list(METRIC_FIELDS)
    _write_csv(out / "results.csv", header, csv_rows)
    _write_json(out / "results.json", json_rows)
    _write_manifest(out, "eval", config, inputs)
    return 0


def cmd_cv(config: dict) -> int:
    _require(config, "train", "schema")
    out = _out_dir(config)
    _, data, inputs = _load_train(config)
    k = int(config["k_neighbors"])
    n_folds = int(config["folds"])
    if n_folds < 2:
        raise ConfigError("folds must be >= 2")
    mask = _parse_feature_list(str(config["features"]), data.n_features)
    folds = make_folds(data.n_rows, n_folds, int(config["seed"]))
    log.info("cv: %d folds over %d rows", n_folds, data.n_rows)
    per_fold, pooled_report = cross_validate(mask, data, folds, k)

    csv_rows = []
    json_folds = []
    for fold, counts in enumerate(per_fold):
        row = _metric_row(counts)
        csv_rows.append([fold, row["tp"], row["tn"], row["fp"], row["fn"]]
                        + [row[name] for name in METRIC_FIELDS])
        json_folds.append({"fold": fold, "counts": {"tp": counts.tp, "tn": counts.tn,
                                                    "fp": counts.fp, "fn": counts.fn}})
    pooled = per_fold[0]
    for counts in per_fold[1:]:
        pooled = pooled + counts
    pooled_row = _metric_row(pooled)
    csv_rows.append(["pooled", pooled_row["tp"], pooled_row["tn"], pooled_row["fp"], pooled_row["fn"]]
                    + [pooled_row[name] for name in METRIC_FIELDS])
    header = ["fold", "tp", "tn", "fp", "fn"] + list(METRIC_FIELDS)
    _write_csv(out / "results.csv", header, csv_rows)
    _write_json(
        out / "results.json",
        {
            "folds": json_folds,
            "pooled": {
                "counts": {"tp": pooled.tp, "tn": pooled.tn, "fp": pooled.fp, "fn": pooled.fn},
                "fractions": pooled_report.as_fractions(),
                "percentages": pooled_report.as_percentages(),
            },
        },
    )
    _write_manifest(out, "cv", config, inputs)
    return 0


_COMMANDS = {"bench": cmd_bench, "select": cmd_select, "eval": cmd_eval, "cv": cmd_cv}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _resolve_config(args)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except DataError as exc:
        log.error("%s", exc)
        return 3
    except (EvaluationError, ValueError, ArithmeticError) as exc:
        log.error("%s", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
