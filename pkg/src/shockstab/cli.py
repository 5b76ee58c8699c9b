"""Command-line interface.

One subcommand per capability: schema inspection, distribution shift,
stabilization score/uplift, uplift grids, shock splitting, outlier
synthesis, slope calibration and sweeps, the built-in train/evaluate loop,
the full pipeline and report re-emission. All commands print JSON.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 partial
pipeline (some cells failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .calibration import AnchorPoint, calibrate, sensitivity_sweep
from .drift import DEFAULT_TAU, distribution_shift
from .errors import ConfigError, ShockStabError
from .frame import detect_schema, load_csv
from .model import evaluate_pair, import_auc_table, train_baseline, TrainConfig
from .pipeline import (
    PipelineConfig,
    emit_digest,
    emit_radial_data,
    run_pipeline,
)
from .splitting import ShockSplit, SplitSpec, aggregate, monte_carlo
from .stability import (
    UpliftCoefficients,
    batch_uplift,
    stabilization_score,
    stabilization_uplift,
)
from .synthesis import OutlierSpec, fit, generate, postprocess

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_PARTIAL = 4


def _emit(payload: dict, path: str | None = None) -> None:
    text = json.dumps(payload, indent=2, allow_nan=False)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    print(text)


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _auc_pair(text: str) -> tuple[float, float]:
    parts = _split_list(text)
    if len(parts) != 2:
        raise ConfigError(f"expected BASE,SHOCK got {text!r}")
    return float(parts[0]), float(parts[1])


def _coeffs(args) -> UpliftCoefficients:
    return UpliftCoefficients(k1=args.k1, k2=args.k2, k3=args.k3)


def _split_spec(args) -> SplitSpec:
    return SplitSpec(
        mode=args.mode,
        date_column=getattr(args, "date_col", None),
        shock_date=getattr(args, "shock_date", None),
        shock_fraction=getattr(args, "shock_fraction", None),
        train_fraction=args.train_fraction,
        mc_runs=args.runs,
        seed=args.seed,
    )


def _grid_records(path: str, ds_flag: float | None, per_run: bool = False):
    """Load either the flat su-grid record list or the nested AUC table."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load {path}: {exc}") from exc
    if isinstance(payload, list):
        if ds_flag is None:
            raise ConfigError("--ds is required with a flat record list")
        records = []
        for i, r in enumerate(payload):
            try:
                records.append(
                    (
                        r["model"],
                        r["outliers_pct"],
                        float(r["auc_base_a"]),
                        float(r["auc_shock_a"]),
                        float(r["auc_base_b"]),
                        float(r["auc_shock_b"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"{path}: record {i}: {exc!r}") from None
        return records, ds_flag
    table = import_auc_table(path)
    ds = table.ds if ds_flag is None else ds_flag
    records = table.per_run_records() if per_run else table.median_records()
    return records, ds


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_schema(args) -> int:
    frame = load_csv(
        args.file,
        missing_tokens=tuple(args.missing_tokens),
        categorical_override=args.categorical_override,
    )
    report = detect_schema(frame, categorical_override=args.categorical_override)
    _emit(report.to_dict(), args.json)
    return EXIT_OK


def _cmd_ds(args) -> int:
    base = load_csv(args.base)
    shock = load_csv(args.shock)
    excluded = _split_list(args.exclude) if args.exclude else []
    report = distribution_shift(base, shock, tau=args.tau, excluded=excluded)
    _emit(report.to_dict(), args.json)
    return EXIT_OK


def _cmd_ss(args) -> int:
    record = stabilization_score(args.auc_base, args.auc_shock, args.ds, args.epsilon)
    _emit(record.to_dict())
    return EXIT_OK


def _cmd_su(args) -> int:
    breakdown = stabilization_uplift(
        _auc_pair(args.a), _auc_pair(args.b), args.ds, _coeffs(args), args.epsilon
    )
    _emit(breakdown.to_dict())
    return EXIT_OK


def _cmd_su_grid(args) -> int:
    records, ds = _grid_records(args.file, args.ds, per_run=args.per_run)
    grid = batch_uplift(records, ds, _coeffs(args))
    payload = grid.to_dict()
    payload["dataset"] = args.dataset or Path(args.file).stem
    _emit(payload, args.json)
    return EXIT_OK


def _cmd_split(args) -> int:
    frame = load_csv(args.file)
    spec = _split_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for split in monte_carlo(frame, spec):
        tag = f"{split.run_index:03d}"
        for name, part in (
            ("train", split.train),
            ("test", split.test),
            ("shock", split.shocked_test),
        ):
            path = out / f"{name}_{tag}.csv"
            part.to_csv(path)
            written.append(str(path))
    _emit(
        {
            "runs": spec.mc_runs,
            "mode": spec.mode,
            "rows": frame.row_count,
            "files": written,
        }
    )
    return EXIT_OK


def _cmd_synth(args) -> int:
    frame = load_csv(args.file)
    generator = fit(frame)
    spec = OutlierSpec(
        family=args.family,
        outlier_fraction=args.outliers_pct / 100.0,
        total_rows=args.rows,
        seed=args.seed,
        tail_sigma=args.tail_sigma,
        nonneg_columns=tuple(_split_list(args.nonneg)) if args.nonneg else (),
    )
    batch = postprocess(generate(generator, spec), spec)
    batch.frame.to_csv(args.out)
    mask = {
        "outlier_rows": [int(i) for i in batch.outlier_mask.nonzero()[0]],
        "family": spec.family,
        "fraction": spec.outlier_fraction,
    }
    if args.mask_out:
        Path(args.mask_out).write_text(
            json.dumps(mask, indent=2) + "\n", encoding="utf-8"
        )
    _emit(
        {
            "rows": batch.frame.row_count,
            "outliers": int(batch.outlier_mask.sum()),
            "out": args.out,
            "mask_out": args.mask_out,
        }
    )
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    try:
        payload = json.loads(Path(args.anchors).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load {args.anchors}: {exc}") from exc
    try:
        anchors = [AnchorPoint(**a) for a in payload]
    except TypeError as exc:
        raise ConfigError(f"bad anchor record: {exc}") from None
    grid = None
    if args.grid:
        grid = {}
        for part in args.grid:
            for clause in part.split(";"):
                if not clause.strip():
                    continue
                key, _, values = clause.partition("=")
                if key.strip() not in ("k1", "k2", "k3") or not values:
                    raise ConfigError(f"bad --grid clause {clause!r}")
                grid[key.strip()] = [float(v) for v in _split_list(values)]
    result = calibrate(anchors, grid=grid)
    _emit(result.to_dict(), args.json)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    records, ds = _grid_records(args.file, args.ds)
    report = sensitivity_sweep(records, ds, baseline=_coeffs(args))
    _emit(report.to_dict(), args.json)
    return EXIT_OK


def _cmd_train_eval(args) -> int:
    frame = load_csv(args.file)
    spec = _split_spec(args)
    config = TrainConfig(
        learning_rate=args.learning_rate, epochs=args.epochs, l2=args.l2
    )
    drop = {spec.date_column} if spec.mode == "oot" else set()
    pairs = []
    for split in monte_carlo(frame, spec):
        train = split.train.drop_columns(drop)
        model = train_baseline(train, args.label, config)
        pairs.append(
            evaluate_pair(
                model,
                ShockSplit(
                    train,
                    split.test.drop_columns(drop),
                    split.shocked_test.drop_columns(drop),
                    split.run_index,
                ),
                args.label,
            )
        )
    base = aggregate([p.auc_base for p in pairs])
    shock = aggregate([p.auc_shock for p in pairs])
    _emit(
        {
            "runs": [p.to_dict() for p in pairs],
            "auc_base": {"median": base.median, "min": base.min, "max": base.max},
            "auc_shock": {"median": shock.median, "min": shock.min, "max": shock.max},
        },
        args.json,
    )
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    try:
        payload = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load {args.config}: {exc}") from exc
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.runs is not None:
        payload.setdefault("split", {})["mc_runs"] = args.runs
    if args.levels is not None:
        payload["levels"] = _split_list(args.levels)
    if args.output_dir is not None:
        payload["output_dir"] = args.output_dir
    config = PipelineConfig.from_dict(payload)
    report = run_pipeline(config)
    print(report.to_json())
    return EXIT_PARTIAL if report.partial else EXIT_OK


def _cmd_report(args) -> int:
    try:
        payloads = [
            json.loads(Path(p).read_text(encoding="utf-8")) for p in args.files
        ]
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load report: {exc}") from exc
    if args.kind == "radial":
        _emit(emit_radial_data(payloads[0], nonzero=args.nonzero), args.json)
    else:
        _emit(emit_digest(payloads), args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_coeff_flags(p):
    p.add_argument("--k1", type=float, default=100.0)
    p.add_argument("--k2", type=float, default=1000.0)
    p.add_argument("--k3", type=float, default=1000.0)


def _add_split_flags(p):
    p.add_argument("--mode", choices=("oot", "oos"), required=True)
    p.add_argument("--date-col", dest="date_col")
    p.add_argument("--shock-date", dest="shock_date")
    p.add_argument("--shock-fraction", dest="shock_fraction", type=float)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=0.8)
    p.add_argument("--runs", type=int, default=51)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shockstab",
        description="Shock-stability metrics for tabular classifiers",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schema", help="column kinds and summary statistics")
    p.add_argument("file")
    p.add_argument("--missing-tokens", nargs="*", default=["", "NA", "null"])
    p.add_argument("--categorical-override", type=int, default=0)
    p.add_argument("--json", help="also write the report to this path")
    p.set_defaults(func=_cmd_schema)

    p = sub.add_parser("ds", help="distribution shift between two CSVs")
    p.add_argument("base")
    p.add_argument("shock")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--exclude", help="comma-separated columns to skip")
    p.add_argument("--json", help="also write the report to this path")
    p.set_defaults(func=_cmd_ds)

    p = sub.add_parser("ss", help="stabilization score")
    p.add_argument("--auc-base", dest="auc_base", type=float, required=True)
    p.add_argument("--auc-shock", dest="auc_shock", type=float, required=True)
    p.add_argument("--ds", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.set_defaults(func=_cmd_ss)

    p = sub.add_parser("su", help="stabilization uplift for one A/B pair")
    p.add_argument("--a", required=True, metavar="BASE,SHOCK")
    p.add_argument("--b", required=True, metavar="BASE,SHOCK")
    p.add_argument("--ds", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1e-5)
    _add_coeff_flags(p)
    p.set_defaults(func=_cmd_su)

    p = sub.add_parser("su-grid", help="uplift grid from an AUC file")
    p.add_argument("file")
    p.add_argument("--ds", type=float)
    p.add_argument("--dataset")
    p.add_argument("--per-run", dest="per_run", action="store_true",
                   help="one grid row per run instead of medians")
    p.add_argument("--json", help="also write the grid to this path")
    _add_coeff_flags(p)
    p.set_defaults(func=_cmd_su_grid)

    p = sub.add_parser("split", help="write train/test/shock CSVs per run")
    p.add_argument("file")
    _add_split_flags(p)
    p.add_argument("--out", default="splits")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("synth", help="generate synthetic rows with outliers")
    p.add_argument("file")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--outliers-pct", dest="outliers_pct", type=float, default=0.0)
    p.add_argument(
        "--family",
        choices=("normal", "laplace", "gumbel", "weibull", "levy"),
        default="normal",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tail-sigma", dest="tail_sigma", type=float, default=3.0)
    p.add_argument("--nonneg", help="comma-separated nonnegative columns")
    p.add_argument("--out", required=True)
    p.add_argument("--mask-out", dest="mask_out")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("calibrate", help="grid-search logistic slopes")
    p.add_argument("anchors")
    p.add_argument("--grid", action="append", help="e.g. k1=50,100,200;k2=500,1000")
    p.add_argument("--json", help="also write the result to this path")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("sweep", help="slope sensitivity sweep over a grid file")
    p.add_argument("file")
    p.add_argument("--ds", type=float)
    p.add_argument("--json", help="also write the report to this path")
    _add_coeff_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("train-eval", help="train the baseline over MC splits")
    p.add_argument("file")
    p.add_argument("--label", required=True)
    _add_split_flags(p)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--json", help="also write the result to this path")
    p.set_defaults(func=_cmd_train_eval)

    p = sub.add_parser("pipeline", help="run the full evaluation pipeline")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--levels", help="comma-separated outlier levels")
    p.add_argument("--output-dir", dest="output_dir")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("report", help="re-emit radial or digest data")
    p.add_argument("kind", choices=("radial", "digest"))
    p.add_argument("files", nargs="+")
    p.add_argument("--nonzero", action="store_true")
    p.add_argument("--json", help="also write the output to this path")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ShockStabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
