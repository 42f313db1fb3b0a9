"""Command-line interface.

Thin composition of the library modules: each subcommand loads what it
needs, runs one operation, writes artifacts, and prints a short summary.
Training always happens here (or in scripts), never inside the HTTP
service process.

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bundle import load_bundle, save_bundle
from .config import load_config
from .controller import directives_for_series, directives_to_json, write_directives_json
from .errors import DustcastError
from .explain import write_summary_csv
from .forecast import DEFAULT_HORIZON_DAYS, ScenarioSpec, pipeline_forecast
from .ingestion import (
    FixtureSource,
    HttpSource,
    aggregate_aod,
    derive_efficiency_loss,
    fetch_aod,
    fetch_meteo,
    merge_and_interpolate,
    read_merged_csv,
    write_merged_csv,
)
from .pipeline import attribution_reports, evaluate_pipeline, train_pipeline
from .service.app import serve_api


def _source(arg: str):
    if arg.startswith(("http://", "https://")):
        return HttpSource(url=arg)
    return FixtureSource(path=arg)


def _print_metrics(stage: str, report) -> None:
    r2 = "undefined" if report.r2 is None else f"{report.r2:.6f}"
    print(f"{stage}: rmse={report.rmse:.6f} mae={report.mae:.6f} r2={r2} n={report.n}")


def _load_bundle_and_data(args):
    bundle = load_bundle(args.bundle)
    records = read_merged_csv(args.data)
    return bundle, records


def cmd_ingest(args) -> int:
    config = load_config(args.config)
    roi = config.require_site().roi()
    meteo = fetch_meteo(_source(args.meteo), roi, args.start, args.end)
    aod_samples = fetch_aod(_source(args.aod), roi, args.start, args.end)
    daily_aod = aggregate_aod(aod_samples, roi)
    merged = derive_efficiency_loss(merge_and_interpolate(meteo, daily_aod))
    write_merged_csv(merged, args.out)
    n_interp = sum(1 for r in merged if r.aod_interpolated)
    print(f"wrote {len(merged)} days to {args.out} ({n_interp} AOD values interpolated)")
    return 0


def cmd_train(args) -> int:
    config = load_config(args.config)
    records = read_merged_csv(args.data)
    result = train_pipeline(records, config)
    out = save_bundle(args.out, result.hybrid, result.eff_model,
                      result.metrics, seed=config.seed)
    metrics_path = Path(out) / "metrics.json"
    metrics_path.write_text(json.dumps(
        {stage: report.to_dict() for stage, report in result.metrics.items()},
        indent=2,
    ) + "\n")
    print(f"trained on {result.n_stage1_train} rows "
          f"(holdout {result.n_stage1_test}, warm-up dropped {result.dropped_rows})")
    _print_metrics("stage1", result.stage1_metrics)
    _print_metrics("stage2", result.stage2_metrics)
    print(f"bundle: {out}")
    return 0


def cmd_evaluate(args) -> int:
    config = load_config(args.config)
    bundle, records = _load_bundle_and_data(args)
    metrics = evaluate_pipeline(bundle.hybrid, bundle.eff_model, records,
                                config.test_fraction)
    for stage, report in metrics.items():
        _print_metrics(stage, report)
    if args.out:
        Path(args.out).write_text(json.dumps(
            {stage: report.to_dict() for stage, report in metrics.items()}, indent=2,
        ) + "\n")
        print(f"metrics: {args.out}")
    return 0


def cmd_forecast(args) -> int:
    bundle, records = _load_bundle_and_data(args)
    pf = pipeline_forecast(bundle.hybrid, bundle.eff_model, records,
                           horizon=args.horizon)
    payload = json.dumps(pf.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
        print(f"forecast: {args.out}")
    else:
        print(payload, end="")
    if args.csv:
        pf.write_csv(args.csv)
        print(f"forecast csv: {args.csv}")
    return 0


def cmd_explain(args) -> int:
    config = load_config(args.config)
    bundle, records = _load_bundle_and_data(args)
    reports = attribution_reports(
        bundle.hybrid, bundle.eff_model, records,
        n_instances=args.instances, mode=args.mode, seed=config.seed,
        n_permutations=args.n_permutations,
    )
    if args.stage == 1:
        named = {"stage1_static": reports.stage1_static,
                 "stage1_temporal": reports.stage1_temporal}
    else:
        named = {"stage2": reports.stage2}

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, report in named.items():
        (out_dir / f"{name}.json").write_text(
            json.dumps(report.to_dict(), indent=2) + "\n"
        )
        write_summary_csv(report, out_dir / f"{name}.csv")
        top = sorted(zip(report.rank, report.feature_names))[:3]
        ranked = ", ".join(f"{feat} (#{rank})" for rank, feat in top)
        print(f"{name}: top features {ranked}")
    print(f"reports: {out_dir}")
    return 0


def cmd_control(args) -> int:
    data = json.loads(Path(args.forecast).read_text())
    start = dt.date.fromisoformat(data["start_date"])
    dates = [start + dt.timedelta(days=k) for k in range(int(data["horizon"]))]
    salinity = None if args.salinity is None else [args.salinity] * len(dates)
    config = load_config(args.config)
    directives = directives_for_series(
        dates, data["aod"], data["solar_efficiency_pct"],
        salinity_series=salinity, settings=config.controller,
    )
    if args.out:
        write_directives_json(directives, args.out)
        print(f"wrote {len(directives)} directives to {args.out}")
    else:
        print(json.dumps(directives_to_json(directives), indent=2))
    return 0


def cmd_scenario(args) -> int:
    config = load_config(args.config)
    if args.preset is not None:
        if args.delta_t2m is not None or args.aod_multiplier is not None:
            args._parser.error("--preset conflicts with --delta-t2m/--aod-multiplier")
        spec = config.scenario_presets.get(args.preset)
        if spec is None:
            args._parser.error(
                f"unknown preset {args.preset!r}; configured: "
                f"{', '.join(sorted(config.scenario_presets)) or 'none'}"
            )
    else:
        if args.delta_t2m is None or args.aod_multiplier is None:
            args._parser.error(
                "provide --preset, or both --delta-t2m and --aod-multiplier"
            )
        spec = ScenarioSpec(delta_t2m=args.delta_t2m,
                            aod_multiplier=args.aod_multiplier, label="custom")

    bundle, records = _load_bundle_and_data(args)
    baseline = pipeline_forecast(bundle.hybrid, bundle.eff_model, records,
                                 horizon=args.horizon)
    stressed = pipeline_forecast(bundle.hybrid, bundle.eff_model, records,
                                 horizon=args.horizon, scenario=spec)

    n = args.horizon
    aod_delta = sum(s - b for s, b in zip(stressed.aod.values, baseline.aod.values)) / n
    loss_delta = sum(s - b for s, b in zip(stressed.efficiency_loss_pct,
                                           baseline.efficiency_loss_pct)) / n
    print(f"scenario delta_t2m={spec.delta_t2m:+g} aod_multiplier={spec.aod_multiplier:g}")
    print(f"mean AOD delta over {n} days: {aod_delta:+.6f}")
    print(f"mean efficiency-loss delta over {n} days: {loss_delta:+.4f} pct points")
    if args.out:
        Path(args.out).write_text(json.dumps({
            "baseline": baseline.to_dict(),
            "scenario": stressed.to_dict(),
            "mean_aod_delta": aod_delta,
            "mean_efficiency_loss_delta_pct": loss_delta,
        }, indent=2) + "\n")
        print(f"comparison: {args.out}")
    return 0


def cmd_serve(args) -> int:
    config = load_config(args.config)
    serve_api(config, args.bundle, args.data, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dustcast",
        description="Dust-aware forecasting and plant control toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bundle=True, data=True):
        p.add_argument("--config", type=Path, default=None,
                       help="TOML overriding the packaged defaults")
        if bundle:
            p.add_argument("--bundle", type=Path, required=True,
                           help="model bundle directory")
        if data:
            p.add_argument("--data", type=Path, required=True,
                           help="merged daily CSV")

    p = sub.add_parser("ingest", help="fetch, merge and gap-fill source data")
    common(p, bundle=False, data=False)
    p.add_argument("--meteo", required=True, help="meteo CSV path or http(s) URL")
    p.add_argument("--aod", required=True, help="AOD pixel CSV path or http(s) URL")
    p.add_argument("--start", type=dt.date.fromisoformat, required=True)
    p.add_argument("--end", type=dt.date.fromisoformat, required=True)
    p.add_argument("--out", type=Path, required=True, help="merged CSV to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train both stages and save a bundle")
    common(p, bundle=False)
    p.add_argument("--out", type=Path, required=True, help="bundle directory to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="holdout metrics for a saved bundle")
    common(p)
    p.add_argument("--out", type=Path, default=None, help="metrics JSON to write")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("forecast", help="recursive projection from latest data")
    common(p)
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON_DAYS)
    p.add_argument("--out", type=Path, default=None, help="forecast JSON to write")
    p.add_argument("--csv", type=Path, default=None, help="optional CSV export")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("explain", help="Shapley attribution reports")
    common(p)
    p.add_argument("--stage", type=int, choices=(1, 2), required=True)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--n-permutations", type=int, default=2000)
    p.add_argument("--instances", type=int, default=30,
                   help="how many recent rows to attribute")
    p.add_argument("--out", type=Path, required=True, help="report directory")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("control", help="directives from an exported forecast")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--forecast", type=Path, required=True, help="forecast JSON")
    p.add_argument("--salinity", type=float, default=None,
                   help="constant feedwater salinity in g/L")
    p.add_argument("--out", type=Path, default=None, help="directives JSON to write")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("scenario", help="baseline vs stressed forecast")
    common(p)
    p.add_argument("--preset", default=None, help="named preset from config")
    p.add_argument("--delta-t2m", type=float, default=None)
    p.add_argument("--aod-multiplier", type=float, default=None)
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON_DAYS)
    p.add_argument("--out", type=Path, default=None, help="comparison JSON to write")
    p.set_defaults(func=cmd_scenario, _parser=p)

    p = sub.add_parser("serve", help="run the HTTP API over a saved bundle")
    common(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DustcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
