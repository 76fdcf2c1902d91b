"""Command-line front end.

Subcommands: predict, compare, heatmap, fit, reassess. Structured inputs
come from a JSON config file (--config); method/reps/seed/level may be
overridden by flags. All output is CSV or JSON with explicit headers, no
plotting. Exit codes: 0 success, 2 validation, 3 numeric failure, 4 I/O.
"""

import argparse
import csv
import json
import math
import sys

from . import __version__
from .design_compare import (
    BiomarkerTrial,
    duration_difference,
    heatmap,
    write_heatmap_csv,
    write_heatmap_json,
)
from .distributions import EnrollmentBeta, ExponentialModel, WeibullModel
from .duration import TrialSpec, estimate_duration, order_statistic_cdf
from .errors import (
    ConfigurationError,
    DurasimError,
    NumericError,
    ParameterError,
)
from .event_time import SubgroupArm, mixture
from .fitting import read_patient_csv, fit_design, reassess, write_reassess_csv
from .heterogeneity import BiomarkerSpec, build_allcomers_spec

_EXIT_VALIDATION = 2
_EXIT_NUMERIC = 3
_EXIT_IO = 4


def _load_config(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        try:
            config = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigurationError("config must be a JSON object")
    return config


def _get(config: dict, key: str, kind, *, required: bool = True, default=None):
    if key not in config:
        if required:
            raise ConfigurationError(f"config.{key}: missing required field")
        return default
    value = config[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigurationError(f"config.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _enrollment_from(config: dict) -> EnrollmentBeta:
    has_rate = "enroll_rate" in config
    has_period = "period_a" in config
    if has_rate == has_period:
        raise ConfigurationError(
            "config: exactly one of enroll_rate / period_a is required"
        )
    n = _get(config, "n", int)
    if has_rate:
        period = n / _get(config, "enroll_rate", float)
    else:
        period = _get(config, "period_a", float)
    beta = _get(config, "enrollment_beta", float, required=False, default=1.0)
    return EnrollmentBeta(period_a=period, beta=beta)


def _survival_from(entry: dict, path: str):
    keys = [k for k in ("median", "rate", "weibull") if k in entry]
    if len(keys) != 1:
        raise ConfigurationError(
            f"{path}: exactly one of median / rate / weibull is required"
        )
    if keys[0] == "median":
        return ExponentialModel.from_median(_get(entry, "median", float))
    if keys[0] == "rate":
        return ExponentialModel(rate=_get(entry, "rate", float))
    weibull = _get(entry, "weibull", dict)
    return WeibullModel(shape=_get(weibull, "shape", float),
                        scale=_get(weibull, "scale", float))


def _spec_from_arms(config: dict) -> TrialSpec:
    enrollment = _enrollment_from(config)
    arms = []
    entries = _get(config, "arms", list)
    for i, entry in enumerate(entries):
        path = f"config.arms[{i}]"
        if not isinstance(entry, dict):
            raise ConfigurationError(f"{path}: expected an object")
        dropout_rate = _get(entry, "dropout_rate", float, required=False, default=0.0)
        dropout = ExponentialModel(rate=dropout_rate) if dropout_rate > 0.0 else None
        try:
            arms.append(SubgroupArm(
                weight=_get(entry, "weight", float),
                enrollment=enrollment,
                event=_survival_from(entry, path),
                dropout=dropout,
            ))
        except ParameterError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    return TrialSpec(n=_get(config, "n", int), d=_get(config, "d", int),
                     arms=tuple(arms))


def _biomarker_from(config: dict) -> BiomarkerSpec:
    entry = _get(config, "biomarker", dict)
    return BiomarkerSpec(prevalence=_get(entry, "prevalence", float),
                         hazard_ratio=_get(entry, "hazard_ratio", float))


def _trial_from(config: dict) -> BiomarkerTrial:
    biomarker = _biomarker_from(config)
    return BiomarkerTrial(
        n=_get(config, "n", int),
        d=_get(config, "d", int),
        enroll_rate=_get(config, "enroll_rate", float),
        pbo_median=_get(config, "mst_pbo", float),
        prevalence=biomarker.prevalence,
        hazard_ratio=biomarker.hazard_ratio,
        treatment_hr=_get(config, "treatment_hr", float, required=False, default=0.5),
    )


def _spec_for_predict(config: dict) -> TrialSpec:
    if "arms" in config:
        return _spec_from_arms(config)
    if "biomarker" in config:
        return build_allcomers_spec(
            n=_get(config, "n", int),
            d=_get(config, "d", int),
            enroll_rate=_get(config, "enroll_rate", float),
            pbo_median=_get(config, "mst_pbo", float),
            biomarker=_biomarker_from(config),
            treatment_hr=_get(config, "treatment_hr", float, required=False, default=0.5),
        )
    raise ConfigurationError("config: either arms or biomarker is required")


def _estimator_settings(config: dict, args) -> dict:
    method = args.method or config.get("method", "exact")
    if method not in ("percentile", "exact", "mc"):
        raise ConfigurationError(
            f"method must be percentile, exact or mc, got {method!r}"
        )
    level = args.level if args.level is not None else config.get("level", 0.05)
    reps = args.reps if args.reps is not None else config.get("reps", 10_000)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    if not isinstance(reps, int) or isinstance(reps, bool):
        raise ConfigurationError(f"reps must be an integer, got {reps!r}")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigurationError(f"seed must be an integer, got {seed!r}")
    return {"method": method, "level": float(level), "reps": reps, "seed": seed}


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _estimate_payload(estimate) -> dict:
    return {
        "method": estimate.method,
        "point_months": _finite_or_none(estimate.point),
        "interval_low_months": _finite_or_none(estimate.interval_low),
        "interval_high_months": _finite_or_none(estimate.interval_high),
        "confidence": estimate.confidence,
        "reachable": estimate.reachable,
        "diagnostics": dict(estimate.diagnostics),
    }


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def cmd_predict(args) -> int:
    config = _load_config(args.config)
    spec = _spec_for_predict(config)
    settings = _estimator_settings(config, args)
    estimate = estimate_duration(spec, settings["method"], level=settings["level"],
                                 reps=settings["reps"], seed=settings["seed"])
    if args.curve:
        if not args.out:
            raise ConfigurationError("--curve requires --out for the CSV path")
        _write_curve(spec, estimate, args.out)
    _emit(_estimate_payload(estimate))
    return 0


def _write_curve(spec: TrialSpec, estimate, path) -> None:
    cdf = mixture(spec.arms)
    finite = [x for x in (estimate.point, estimate.interval_high) if math.isfinite(x)]
    horizon = 1.5 * max([cdf.support_hint] + finite) if finite else 3.0 * cdf.support_hint
    steps = 400
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t_months", "mixture_cdf", "order_statistic_cdf"])
        for i in range(steps + 1):
            t = horizon * i / steps
            writer.writerow([
                f"{t:.12g}", f"{cdf(t):.12g}",
                f"{order_statistic_cdf(spec, t):.12g}",
            ])


def cmd_compare(args) -> int:
    config = _load_config(args.config)
    trial = _trial_from(config)
    settings = _estimator_settings(config, args)
    allcomers, enrichment = trial.specs()
    est_a = estimate_duration(allcomers, settings["method"], level=settings["level"],
                              reps=settings["reps"], seed=settings["seed"])
    est_e = estimate_duration(enrichment, settings["method"], level=settings["level"],
                              reps=settings["reps"], seed=settings["seed"])
    difference = (est_a.point - est_e.point
                  if est_a.reachable and est_e.reachable else None)
    _emit({
        "method": settings["method"],
        "allcomers": _estimate_payload(est_a),
        "enrichment": _estimate_payload(est_e),
        "difference_months": difference,
        "comparable": difference is not None,
        "enrichment_faster": None if difference is None else difference > 0.0,
    })
    return 0


def cmd_heatmap(args) -> int:
    config = _load_config(args.config)
    axes = _get(config, "heatmap", dict)
    trial = _trial_from(config)
    settings = _estimator_settings(config, args)
    grid = heatmap(
        trial,
        x_param=_get(axes, "x_param", str),
        x_values=_axis_values(axes, "x_values"),
        y_param=_get(axes, "y_param", str),
        y_values=_axis_values(axes, "y_values"),
        method=settings["method"],
    )
    if not args.out:
        raise ConfigurationError("heatmap requires --out as the output basename")
    csv_path = args.out + ".csv"
    json_path = args.out + ".json"
    write_heatmap_csv(grid, csv_path)
    write_heatmap_json(grid, json_path)
    _emit({
        "csv": csv_path,
        "json": json_path,
        "cells": len(grid.x_values) * len(grid.y_values),
        "boundary_points": len(grid.boundary),
    })
    return 0


def _axis_values(axes: dict, key: str) -> list[float]:
    values = _get(axes, key, list)
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigurationError(f"config.heatmap.{key}[{i}]: expected a number")
        out.append(float(v))
    return out


def cmd_fit(args) -> int:
    records = read_patient_csv(args.data)
    design = fit_design(records, period_a=args.period_a)
    payload = {
        "n_used": design.n_used,
        "enrollment": {"period_a": design.enrollment.period_a,
                       "beta": design.enrollment.beta},
        "cells": [
            {
                "arm": cell.arm,
                "subgroup": cell.subgroup,
                "weight": cell.weight,
                "n_patients": cell.n_patients,
                "n_events": cell.n_events,
                "weibull_shape": cell.model.shape,
                "weibull_scale": cell.model.scale,
            }
            for cell in design.cells
        ],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    _emit(payload)
    return 0


def cmd_reassess(args) -> int:
    records = read_patient_csv(args.data)
    d_values = _parse_d_values(args.d_values)
    n = args.n if args.n is not None else len(records)
    rows = reassess(records, n=n, d_values=d_values,
                    subgroup_filter=args.subgroup, period_a=args.period_a)
    if args.out:
        write_reassess_csv(rows, args.out)
        _emit({"out": args.out, "rows": len(rows)})
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["d", "actual_months", "calculated_months", "flag"])
        for row in rows:
            writer.writerow([
                row.d,
                "" if row.actual_months is None else f"{row.actual_months:.12g}",
                "" if math.isinf(row.calculated_months) else f"{row.calculated_months:.12g}",
                row.flag,
            ])
    return 0


def _parse_d_values(raw: str) -> list[int]:
    """Either comma-separated values ("30,60,88") or a range ("30:88")."""
    try:
        if ":" in raw:
            lo, _, hi = raw.partition(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(part) for part in raw.split(",") if part]
    except ValueError as exc:
        raise ConfigurationError(f"bad --d-values {raw!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="durasim",
        description="Study-duration prediction for event-driven trials",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--method", choices=("percentile", "exact", "mc"),
                       help="duration estimator (default from config, else exact)")
        p.add_argument("--reps", type=int, help="Monte Carlo replicates")
        p.add_argument("--seed", type=int, help="Monte Carlo master seed")
        p.add_argument("--level", type=float,
                       help="two-sided interval level (default 0.05)")
        p.add_argument("--out", help="output file path")

    predict = sub.add_parser("predict", help="estimate the study duration")
    predict.add_argument("--config", required=True, help="JSON scenario config")
    add_common(predict)
    predict.add_argument("--curve", action="store_true",
                         help="also dump the CDF curves as CSV (needs --out)")
    predict.set_defaults(run=cmd_predict)

    compare = sub.add_parser("compare",
                             help="all-comers vs enrichment duration difference")
    compare.add_argument("--config", required=True)
    add_common(compare)
    compare.set_defaults(run=cmd_compare)

    heatmap_p = sub.add_parser("heatmap",
                               help="duration-difference grid over two parameters")
    heatmap_p.add_argument("--config", required=True)
    add_common(heatmap_p)
    heatmap_p.set_defaults(run=cmd_heatmap)

    fit = sub.add_parser("fit", help="fit models from a patient-level CSV")
    fit.add_argument("data", help="patient CSV path")
    fit.add_argument("--period-a", dest="period_a", type=float,
                     help="enrollment period; default max enrollment time * (1 + 1e-6)")
    fit.add_argument("--out", help="output file path")
    fit.set_defaults(run=cmd_fit)

    reassess_p = sub.add_parser("reassess",
                                help="actual vs calculated duration curves")
    reassess_p.add_argument("data", help="patient CSV path")
    reassess_p.add_argument("--n", type=int, help="hypothetical sample size")
    reassess_p.add_argument("--d-values", dest="d_values", required=True,
                            help='event counts, "30:88" or "30,60,88"')
    reassess_p.add_argument("--subgroup", help="keep only this subgroup label")
    reassess_p.add_argument("--period-a", dest="period_a", type=float)
    reassess_p.add_argument("--out", help="output CSV path")
    reassess_p.set_defaults(run=cmd_reassess)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except DurasimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
