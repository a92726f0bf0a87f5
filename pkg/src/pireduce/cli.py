"""Command-line pipeline: derive groups, synthesize data, run benchmarks.

Subcommands:
  derive-pi  derive the dimensionless basis from a schema, emit JSON
  synth      generate a synthetic dataset from a known power law
  run        train/evaluate the selected methods, emit CSV reports + figures
  report     re-render the comparison table and figures from a finished run

Settings come from a JSON config file; command-line flags override config
values, which override defaults. The PIREDUCE_LOG environment variable sets
the logging level (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, plots
from .dataio import (
    Dataset,
    builtin_schema,
    default_synth_law,
    load_csv,
    load_schema,
    save_csv,
    scale_schema_ranges,
    synth_generate,
)
from .errors import DegenerateDimensionsError, PiReduceError
from .metrics import score_all
from .models import (
    DEFAULT_LAMBDA_GRID,
    METHOD_KEYS,
    METHOD_NAMES,
    MlpConfig,
    MonomialModel,
    run_experiment,
)
from .pi_engine import derive_pi_basis, save_basis, select_base_subset

log = logging.getLogger("pireduce")

COMPARISON_HEADER = ("method", "train_r2", "test_r2", "train_smape", "test_smape")
LOSS_HEADER = ("method", "seed", "fold", "epoch", "train_mse", "val_mse", "train_mae", "val_mae")

DEFAULT_METHODS = tuple(METHOD_NAMES.values())


def _setup_logging() -> None:
    level = os.environ.get("PIREDUCE_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_schema(ref: str | None):
    ref = ref or "builtin:training"
    if ref.startswith("builtin:"):
        return builtin_schema(ref.split(":", 1)[1])
    return load_schema(ref)


def _parse_seed_list(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(",") if s.strip())


def _fmt(value: float) -> str:
    return repr(float(value))


def _resolve_law(law_doc: dict | None, basis) -> MonomialModel:
    if not law_doc:
        return default_synth_law(basis)
    labels = tuple(g.label for g in basis.groups)
    exponents = law_doc.get("exponents", {})
    unknown = set(exponents) - set(labels)
    if unknown:
        raise PiReduceError(f"law exponents name unknown groups: {sorted(unknown)}")
    intercept = float(law_doc.get("intercept", 1.0))
    return MonomialModel(
        intercept_log=float(np.log(intercept)),
        exponents=tuple(float(exponents.get(label, 0.0)) for label in labels),
        feature_names=labels,
        ridge_lambda=0.0,
    )


def _method_names(config: dict) -> list[str]:
    methods = config.get("methods") or list(DEFAULT_METHODS)
    resolved = []
    for m in methods:
        if isinstance(m, (list, tuple)):
            key = (m[0], m[1])
            if key not in METHOD_NAMES:
                raise PiReduceError(f"unknown method combination {m!r}")
            resolved.append(METHOD_NAMES[key])
        elif m in METHOD_KEYS:
            resolved.append(m)
        else:
            raise PiReduceError(
                f"unknown method {m!r}; valid: {sorted(METHOD_KEYS)}"
            )
    return resolved


# ---------------------------------------------------------------------------
# derive-pi


def cmd_derive_pi(args) -> int:
    config = _load_config(args.config)
    schema = _resolve_schema(args.schema or config.get("schema"))
    base = None
    if args.base:
        base = tuple(s.strip() for s in args.base.split(","))
    elif config.get("base_subset"):
        base = tuple(config["base_subset"])
    elif schema.preferred_base:
        base = schema.preferred_base

    try:
        if base is None:
            base = select_base_subset(schema)
        basis = derive_pi_basis(schema, base)
    except DegenerateDimensionsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out or config.get("out") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "pi_basis.json"
    save_basis(basis, out_path)

    print(f"base subset: {', '.join(basis.base_subset)}")
    for group in basis.all_groups():
        print(f"  {group.label} = {group.formula()}")
    print(f"wrote {out_path}")
    return 0


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    config = _load_config(args.config)
    synth_cfg = dict(config.get("synth") or {})
    schema = _resolve_schema(args.schema or config.get("schema"))
    base = tuple(config["base_subset"]) if config.get("base_subset") else schema.preferred_base
    if base is None:
        base = select_base_subset(schema)
    basis = derive_pi_basis(schema, base)
    law = _resolve_law(synth_cfg.get("law"), basis)

    n = args.n or int(synth_cfg.get("n_train", 200))
    seed = args.seed if args.seed is not None else int(synth_cfg.get("seed", 0))
    noise = args.noise_sigma if args.noise_sigma is not None else float(
        synth_cfg.get("noise_sigma", 0.05)
    )
    data = synth_generate(schema, n, law, noise, seed, base_subset=base)

    out_dir = Path(args.out or config.get("out") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "synthetic.csv"
    save_csv(data, out_path)
    print(f"wrote {out_path} ({data.n_rows} rows, seed {seed}, noise {noise})")
    return 0


# ---------------------------------------------------------------------------
# run


def _prepare_data(config: dict, schema, base) -> tuple[Dataset, Dataset]:
    train_path = config.get("train")
    test_path = config.get("test")
    if train_path and test_path:
        return load_csv(train_path, schema), load_csv(test_path, schema)
    if train_path or test_path:
        raise PiReduceError("config must give both 'train' and 'test', or neither")

    synth_cfg = dict(config.get("synth") or {})
    basis = derive_pi_basis(schema, base)
    law = _resolve_law(synth_cfg.get("law"), basis)
    n_train = int(synth_cfg.get("n_train", 200))
    n_test = int(synth_cfg.get("n_test", 100))
    noise = float(synth_cfg.get("noise_sigma", 0.05))
    seed = int(synth_cfg.get("seed", 0))
    scale = float(synth_cfg.get("test_range_scale", 1.0))
    train = synth_generate(schema, n_train, law, noise, seed, base_subset=base)
    test_schema = scale_schema_ranges(schema, scale) if scale != 1.0 else schema
    test = synth_generate(
        test_schema, n_test, law, noise, seed + 1, base_subset=base
    )
    return train, test


def _check_outdir(out_dir: Path, force: bool) -> None:
    markers = [out_dir / "manifest.json", out_dir / "comparison.csv"]
    existing = [p for p in markers if p.exists()]
    if existing and not force:
        raise PiReduceError(
            f"output directory {out_dir} already holds run artifacts "
            f"({', '.join(p.name for p in existing)}); pass --force to overwrite"
        )


def _write_comparison(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARISON_HEADER)
        for row in rows:
            writer.writerow(
                [row.method, _fmt(row.train_r2), _fmt(row.test_r2),
                 _fmt(row.train_smape), _fmt(row.test_smape)]
            )


def _write_loss_history(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOSS_HEADER)
        for row in rows:
            for result in row.seed_results:
                if result.train_report is None:
                    continue
                for fold, epoch, tm, vm, ta, va in result.train_report.history_rows():
                    writer.writerow(
                        [row.method, result.seed, fold, epoch,
                         _fmt(tm), _fmt(vm), _fmt(ta), _fmt(va)]
                    )


def _write_scatter(out_dir: Path, row) -> Path:
    path = out_dir / f"scatter_{row.method}.csv"
    y_pred = row.mean_test_predictions()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("y_true", "y_pred"))
        for yt, yp in zip(row.y_test, y_pred):
            writer.writerow([_fmt(yt), _fmt(yp)])
    return path


def _write_scores(path: Path, rows) -> None:
    doc = {}
    for row in rows:
        doc[row.method] = {
            "mean": {
                "train_r2": row.train_r2,
                "test_r2": row.test_r2,
                "train_smape": row.train_smape,
                "test_smape": row.test_smape,
            },
            "per_seed": [
                {
                    "seed": r.seed,
                    "train": r.train_scores.to_json(),
                    "test": r.test_scores.to_json(),
                    **({"group_space": r.extra_scores} if r.extra_scores else {}),
                }
                for r in row.seed_results
            ],
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def _write_models(out_dir: Path, row) -> None:
    models_dir = out_dir / "models"
    models_dir.mkdir(exist_ok=True)
    for result in row.seed_results:
        path = models_dir / f"{row.method}_seed{result.seed}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {"format": "pireduce-artifacts", "version": 1, **result.artifacts},
                fh,
                indent=2,
                ensure_ascii=False,
            )
            fh.write("\n")


def _render_figures(out_dir: Path, rows) -> list[Path]:
    fig_dir = out_dir / "figures"
    fig_dir.mkdir(exist_ok=True)
    written = []
    for row in rows:
        history = []
        for result in row.seed_results:
            if result.train_report is None:
                continue
            for rec in result.train_report.history_rows():
                history.append((result.seed,) + rec)
        if history:
            written.append(
                plots.save_loss_curves(history, row.method, fig_dir / f"loss_{row.method}.png")
            )
        scores = score_all(row.y_test, row.mean_test_predictions())
        note = (
            f"R² = {scores.r2:.3f}\nr = {scores.pearson_r:.3f}"
            f" (p = {scores.pearson_p:.2g})\nsMAPE = {scores.smape:.2f}"
        )
        written.append(
            plots.save_scatter(
                row.y_test, row.mean_test_predictions(), row.method,
                fig_dir / f"scatter_{row.method}.png", annotation=note,
            )
        )
    written.append(
        plots.save_comparison(
            [(r.method, r.train_r2, r.test_r2, r.train_smape, r.test_smape) for r in rows],
            fig_dir / "comparison.png",
        )
    )
    return written


def cmd_run(args) -> int:
    started = time.time()
    config = _load_config(args.config)
    out_dir = Path(args.out or config.get("out") or "run_output")
    try:
        _check_outdir(out_dir, args.force)
    except PiReduceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir.mkdir(parents=True, exist_ok=True)

    schema = _resolve_schema(args.schema or config.get("schema"))
    base = tuple(config["base_subset"]) if config.get("base_subset") else schema.preferred_base
    if base is None:
        base = select_base_subset(schema)

    methods = _method_names(config)
    seeds = _parse_seed_list(args.seed_list) if args.seed_list else tuple(
        config.get("seeds", MlpConfig().seeds)
    )
    mlp_config = MlpConfig.from_json({**config.get("mlp", {}), "seeds": list(seeds)})
    lambda_grid = tuple(config.get("lambda_grid", DEFAULT_LAMBDA_GRID))

    train, test = _prepare_data(config, schema, base)
    log.info("train rows=%d test rows=%d methods=%s", train.n_rows, test.n_rows, methods)

    basis = derive_pi_basis(schema, base)
    save_basis(basis, out_dir / "pi_basis.json")

    def run_one(name: str):
        reduction, model = METHOD_KEYS[name]
        return run_experiment(
            reduction, model, train, test,
            config=mlp_config, seeds=seeds, lambda_grid=lambda_grid, base_subset=base,
        )

    results: dict[str, object] = {}
    failures: dict[str, str] = {}
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {name: pool.submit(run_one, name) for name in methods}
        for name, future in futures.items():
            try:
                results[name] = future.result()
            except Exception as exc:  # noqa: BLE001 - reported per method
                failures[name] = str(exc)
    else:
        for name in methods:
            try:
                results[name] = run_one(name)
            except Exception as exc:  # noqa: BLE001 - reported per method
                failures[name] = str(exc)

    rows = [results[name] for name in methods if name in results]
    _write_comparison(out_dir / "comparison.csv", rows)
    _write_loss_history(out_dir / "loss_history.csv", rows)
    for row in rows:
        _write_scatter(out_dir, row)
        _write_models(out_dir, row)
    _write_scores(out_dir / "scores.json", rows)
    if not args.no_plots:
        _render_figures(out_dir, rows)

    manifest = {
        "package_version": __version__,
        "started_at": datetime.now(timezone.utc).isoformat(),
        "wall_time_s": round(time.time() - started, 3),
        "config": {
            "schema": args.schema or config.get("schema") or "builtin:training",
            "base_subset": list(base),
            "train": config.get("train"),
            "test": config.get("test"),
            "synth": config.get("synth"),
            "methods": methods,
            "seeds": list(seeds),
            "mlp": mlp_config.to_json(),
            "lambda_grid": list(lambda_grid),
        },
        "completed_methods": [name for name in methods if name in results],
        "failed_methods": failures,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    for row in rows:
        print(
            f"{row.method}: train R²={row.train_r2:.4f} test R²={row.test_r2:.4f} "
            f"train sMAPE={row.train_smape:.2f} test sMAPE={row.test_smape:.2f}"
        )
    if failures:
        for name, message in failures.items():
            print(f"method failed: {name}: {message}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# report


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_report(args) -> int:
    out_dir = Path(args.out or ".")
    manifest_path = out_dir / "manifest.json"
    comparison_path = out_dir / "comparison.csv"
    if not comparison_path.exists():
        print(f"error: no comparison.csv under {out_dir}", file=sys.stderr)
        return 2
    if manifest_path.exists():
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        print(f"run of pireduce {manifest.get('package_version', '?')} "
              f"at {manifest.get('started_at', '?')}")
        print(f"seeds: {manifest.get('config', {}).get('seeds')}")

    comparison = _read_csv(comparison_path)
    header = f"{'method':<14}{'train R²':>12}{'test R²':>12}{'train sMAPE':>14}{'test sMAPE':>13}"
    print(header)
    print("-" * len(header))
    for row in comparison:
        print(
            f"{row['method']:<14}{float(row['train_r2']):>12.4f}"
            f"{float(row['test_r2']):>12.4f}{float(row['train_smape']):>14.2f}"
            f"{float(row['test_smape']):>13.2f}"
        )

    fig_dir = out_dir / "figures"
    fig_dir.mkdir(exist_ok=True)
    loss_path = out_dir / "loss_history.csv"
    if loss_path.exists():
        loss_rows = _read_csv(loss_path)
        by_method: dict[str, list] = {}
        for row in loss_rows:
            by_method.setdefault(row["method"], []).append(
                (
                    int(row["seed"]), int(row["fold"]), int(row["epoch"]),
                    float(row["train_mse"]), float(row["val_mse"]),
                    float(row["train_mae"]), float(row["val_mae"]),
                )
            )
        for method, history in by_method.items():
            plots.save_loss_curves(history, method, fig_dir / f"loss_{method}.png")
    comparison_rows = [
        (
            row["method"], float(row["train_r2"]), float(row["test_r2"]),
            float(row["train_smape"]), float(row["test_smape"]),
        )
        for row in comparison
    ]
    plots.save_comparison(comparison_rows, fig_dir / "comparison.png")
    for row in comparison:
        scatter_path = out_dir / f"scatter_{row['method']}.csv"
        if not scatter_path.exists():
            continue
        data = _read_csv(scatter_path)
        y_true = np.array([float(r["y_true"]) for r in data])
        y_pred = np.array([float(r["y_pred"]) for r in data])
        scores = score_all(y_true, y_pred)
        note = (
            f"R² = {scores.r2:.3f}\nr = {scores.pearson_r:.3f}"
            f" (p = {scores.pearson_p:.2g})\nsMAPE = {scores.smape:.2f}"
        )
        plots.save_scatter(
            y_true, y_pred, row["method"],
            fig_dir / f"scatter_{row['method']}.png", annotation=note,
        )
    print(f"figures written under {fig_dir}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pireduce",
        description="Dimensionless-group derivation and predictor benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_derive = sub.add_parser("derive-pi", help="derive the dimensionless basis")
    p_derive.add_argument("--config", help="JSON config file")
    p_derive.add_argument("--schema", help="schema JSON path or builtin:<name>")
    p_derive.add_argument("--base", help="comma-separated preferred base subset")
    p_derive.add_argument("--out", help="output directory")
    p_derive.set_defaults(func=cmd_derive_pi)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--config", help="JSON config file")
    p_synth.add_argument("--schema", help="schema JSON path or builtin:<name>")
    p_synth.add_argument("--n", type=int, help="number of rows")
    p_synth.add_argument("--seed", type=int, help="random seed")
    p_synth.add_argument("--noise-sigma", type=float, help="log-scale noise sigma")
    p_synth.add_argument("--out", help="output directory")
    p_synth.set_defaults(func=cmd_synth)

    p_run = sub.add_parser("run", help="run the benchmark pipeline")
    p_run.add_argument("--config", help="JSON config file")
    p_run.add_argument("--schema", help="schema JSON path or builtin:<name>")
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--seed-list", help="comma-separated seeds, overrides config")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel method workers")
    p_run.add_argument("--force", action="store_true", help="overwrite run artifacts")
    p_run.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("report", help="re-render tables and figures from a run")
    p_report.add_argument("--out", help="run directory (default: current)")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PiReduceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
