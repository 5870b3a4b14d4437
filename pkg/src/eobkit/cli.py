"""Command-line entry point wiring all modules together.

Subcommands: generate, eob, transform, diagnose, loss-check, simulate,
insight. Exit codes: 0 success, 1 validation error, 2 runtime failure.
Outputs go to the declared file or stdout; logs go to stderr (level from
the EOBKIT_LOG environment variable). All randomness flows from --seed
(or the seed embedded in a config document); absent seeds mean 0, never
wall-clock.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import diagnostics, experiments, gradcheck, theory, transforms
from .processes import (ARSpec, ar_spec_from_dict, hybrid_spec_from_dict,
                        synthesize_hybrid, calibrate_innovation)

log = logging.getLogger("eobkit")

SCHEMA_VERSION = 1


def _setup_logging() -> None:
    level_name = os.environ.get("EOBKIT_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    if level_name not in levels:
        raise ValueError(f"EOBKIT_LOG must be one of {sorted(levels)}, got {level_name!r}")
    logging.basicConfig(stream=sys.stderr, level=levels[level_name],
                        format="%(levelname)s %(name)s: %(message)s")


def _fmt(value: float) -> str:
    # 17 significant digits round-trip any float bit-exactly
    return format(float(value), ".17g")


def _write_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        log.info("wrote %s", path)


def _read_series(path: str) -> np.ndarray:
    """Single-column CSV, optional header row."""
    values = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if values:
                    raise ValueError(f"non-numeric value {row[0]!r} in {path}") from None
                # header row
    if not values:
        raise ValueError(f"no numeric data found in {path}")
    return np.asarray(values)


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"{path} must contain a JSON object")
    return obj


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_generate(args: argparse.Namespace) -> int:
    spec = hybrid_spec_from_dict(_load_json(args.spec))
    series = synthesize_hybrid(spec, seed=args.seed)
    rows = [["value"]] + [[_fmt(v)] for v in series]
    _write_csv(rows, args.out)
    return 0


def _write_csv(rows: list[list[str]], path: str | None) -> None:
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerows(rows)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
        log.info("wrote %s", path)


def _cmd_eob(args: argparse.Namespace) -> int:
    if args.estimate:
        if args.input is None:
            raise ValueError("--estimate requires --input series.csv")
        series = _read_series(args.input)
        ssnr = diagnostics.estimate_ssnr(series, order=args.order)
        out = {"ssnr_estimate": ssnr, "order": args.order, "n": int(series.shape[0])}
        if args.T is not None:
            out["eob_nats_at_T"] = 0.5 * args.T * math.log(ssnr)
        _write_json(out, args.out)
        return 0

    if args.spec is not None:
        spec = ar_spec_from_dict(_load_json(args.spec))
    elif args.phi is not None:
        sigma = args.sigma_eps2
        spec = ARSpec(c=0.0, phi=tuple(args.phi),
                      innovation=calibrate_innovation(args.noise, sigma), sigma_eps2=sigma)
    else:
        raise ValueError("eob requires --spec FILE or --phi ... (or --estimate)")
    if args.T is None:
        raise ValueError("eob requires --T")
    report = theory.eob_ar_closed_form(spec, args.T)
    payload = report.to_dict()
    if args.bits:
        payload["value_bits"] = report.value_bits
    _write_json(payload, args.out)
    return 0


def _cmd_transform(args: argparse.Namespace) -> int:
    series = _read_series(args.input)
    if args.pad:
        padded, original = transforms.pad_edge_pow2(series)
        if padded.shape[0] != original:
            log.info("padded input from %d to %d samples (edge replication)",
                     original, padded.shape[0])
        series = padded
    if args.kind == "dft":
        spec = transforms.dft_forward(series)
        rows = [["index", "re", "im"]]
        rows += [[str(i), _fmt(r), _fmt(m)] for i, (r, m) in enumerate(zip(spec.re, spec.im))]
    else:
        coeffs = transforms.dwt_forward(series, args.wavelet, args.levels)
        rows = [["index", "band", "coeff"]]
        i = 0
        for band, block in coeffs.blocks().items():
            for v in block:
                rows.append([str(i), band, _fmt(v)])
                i += 1
    _write_csv(rows, args.out)
    return 0


def _transformed_windows(windows: np.ndarray, kind: str, wavelet: str, levels: int) -> np.ndarray:
    if kind == "none":
        return windows
    if kind == "dft":
        return transforms.real_fourier_coordinates(windows)
    return np.stack([transforms.dwt_forward(row, wavelet, levels).coeffs for row in windows])


def _cmd_diagnose(args: argparse.Namespace) -> int:
    series = _read_series(args.input)
    windows = diagnostics.sliding_windows(series, args.window)
    data = _transformed_windows(windows, args.transform, args.wavelet, args.levels)
    report = diagnostics.orthogonality_report(data)
    _write_json(report.to_dict(), args.out)
    return 0


def _cmd_loss_check(args: argparse.Namespace) -> int:
    names = tuple(args.losses.split(",")) if args.losses != "all" else None
    lengths = tuple(int(v) for v in args.lengths.split(","))
    reports = gradcheck.run_gradient_suite(lengths=lengths, instances=args.instances,
                                           seed=args.seed, names=names)
    payload = {"checks": [r.to_dict() for r in reports],
               "all_passed": all(r.passed for r in reports)}
    _write_json(payload, args.out)
    if not payload["all_passed"]:
        log.error("gradient check failed for: %s",
                  ", ".join(r.name for r in reports if not r.passed))
        return 2
    return 0


def _parse_experiment_config(obj: dict, seed_override: int | None):
    unknown = set(obj) - {"schema_version", "grid", "model", "train", "loss"}
    if unknown:
        raise ValueError(f"unknown field(s) in experiment config: {sorted(unknown)}")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"schema_version must be {SCHEMA_VERSION}, got {obj.get('schema_version')!r}")
    if "grid" not in obj:
        raise ValueError("experiment config requires a 'grid' section")

    grid_fields = {f for f in experiments.GridSpec.__dataclass_fields__}
    unknown = set(obj["grid"]) - grid_fields
    if unknown:
        raise ValueError(f"unknown field(s) in grid config: {sorted(unknown)}")
    grid_kwargs = dict(obj["grid"])
    if seed_override is not None:
        grid_kwargs["seed"] = seed_override
    grid = experiments.GridSpec(**grid_kwargs)

    model_obj = dict(obj.get("model", {"kind": "linear"}))
    unknown = set(model_obj) - {"kind", "hidden", "activation", "init_seed"}
    if unknown:
        raise ValueError(f"unknown field(s) in model config: {sorted(unknown)}")
    model = experiments.ModelSpec(kind=model_obj.get("kind", "linear"),
                                  input_len=grid.history, output_len=grid.horizons[0],
                                  hidden=model_obj.get("hidden", 64),
                                  activation=model_obj.get("activation", "tanh"),
                                  init_seed=model_obj.get("init_seed", 0))

    train_obj = dict(obj.get("train", {}))
    train_fields = {"optimizer", "lr", "max_epochs", "patience", "batch_size", "split",
                    "check_gradients"}
    unknown = set(train_obj) - train_fields
    if unknown:
        raise ValueError(f"unknown field(s) in train config: {sorted(unknown)}")
    loss = experiments.loss_spec_from_dict(obj.get("loss", {}))
    cfg = experiments.TrainConfig(loss=loss, **train_obj)
    return grid, model, cfg


def _cmd_simulate(args: argparse.Namespace) -> int:
    grid, model, cfg = _parse_experiment_config(_load_json(args.grid), args.seed)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    log.info("running %d grid cells with %d worker(s)",
             len(grid.ssnr_x_values) * len(grid.horizons) * grid.replications, jobs)
    result = experiments.run_grid(grid, model, cfg, jobs=jobs)
    for label, error in result.failures:
        log.error("cell %s failed: %s", label, error)

    rows = [["ssnr_x", "horizon", "replication", "mse_actual", "mse_relative",
             "mse_opt_rel", "inefficiency"]]
    for pt in result.points:
        rows.append([_fmt(pt.ssnr_x), str(pt.horizon), str(pt.replication),
                     _fmt(pt.mse_actual), _fmt(pt.mse_relative),
                     _fmt(pt.mse_opt_rel), _fmt(pt.inefficiency)])
    _write_csv(rows, args.out)

    if args.out is not None:
        meta = {
            "grid": {"ssnr_x_values": list(grid.ssnr_x_values),
                     "horizons": list(grid.horizons), "history": grid.history,
                     "series_length": grid.series_length,
                     "replications": grid.replications, "seed": grid.seed},
            "amplitudes": {f"{pt.ssnr_x:g}/{pt.horizon}/{pt.replication}": pt.amplitude
                           for pt in result.points},
            "failures": [{"cell": c, "error": e} for c, e in result.failures],
        }
        _write_json(meta, args.out + ".meta.json")
    if result.failures and not result.points:
        return 2
    return 0


def _cmd_insight(args: argparse.Namespace) -> int:
    report = experiments.insight_experiment(K=args.K, fmax=args.fmax, n=args.n,
                                            seed=args.seed)
    _write_json(report.to_dict(), args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eobkit",
        description="Optimization-bias calculators, synthetic processes, orthogonal "
                    "transforms, harmonized losses and desk-scale experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize a series from a process spec JSON")
    p.add_argument("--spec", required=True, help="process spec JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("eob", help="closed-form bias report for an AR spec")
    p.add_argument("--spec", default=None, help="AR spec JSON file")
    p.add_argument("--phi", type=float, nargs="+", default=None,
                   help="AR coefficients (alternative to --spec)")
    p.add_argument("--sigma-eps2", type=float, default=0.25, dest="sigma_eps2")
    p.add_argument("--noise", default="gaussian",
                   choices=["binomial", "geometric", "gaussian", "poisson",
                            "student_t", "uniform"])
    p.add_argument("--T", type=int, default=None, help="window length")
    p.add_argument("--bits", action="store_true", help="also report the value in bits")
    p.add_argument("--estimate", action="store_true",
                   help="estimate SSNR from a series instead of using a spec")
    p.add_argument("--input", default=None, help="series CSV (with --estimate)")
    p.add_argument("--order", type=int, default=1, help="fit order (with --estimate)")
    p.add_argument("--out", default=None, help="output JSON (default stdout)")
    p.set_defaults(fn=_cmd_eob)

    p = sub.add_parser("transform", help="DFT/DWT coefficients of a series CSV")
    p.add_argument("--input", required=True, help="series CSV")
    p.add_argument("--kind", default="dft", choices=["dft", "dwt"])
    p.add_argument("--wavelet", default="haar", choices=sorted(transforms.WAVELET_FILTERS))
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--pad", action="store_true",
                   help="edge-pad to the next power of two before transforming")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.set_defaults(fn=_cmd_transform)

    p = sub.add_parser("diagnose", help="structural-orthogonality report for a series")
    p.add_argument("--input", required=True, help="series CSV")
    p.add_argument("--window", type=int, required=True, help="window length L")
    p.add_argument("--transform", default="none", choices=["dft", "dwt", "none"])
    p.add_argument("--wavelet", default="haar", choices=sorted(transforms.WAVELET_FILTERS))
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--out", default=None, help="output JSON (default stdout)")
    p.set_defaults(fn=_cmd_diagnose)

    p = sub.add_parser("loss-check", help="finite-difference check of loss gradients")
    p.add_argument("--losses", default="all", help="comma-separated case names or 'all'")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--lengths", default="8,32,128")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output JSON (default stdout)")
    p.set_defaults(fn=_cmd_loss_check)

    p = sub.add_parser("simulate", help="run an error-surface grid experiment")
    p.add_argument("--grid", required=True, help="experiment config JSON")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers (default: cores)")
    p.add_argument("--seed", type=int, default=None, help="override the grid seed")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("insight", help="sinusoid recovery under two loss regimes")
    p.add_argument("--K", type=int, default=3, help="number of tones")
    p.add_argument("--fmax", type=int, default=15, help="maximum tone frequency")
    p.add_argument("--n", type=int, default=3072, help="series length")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output JSON (default stdout)")
    p.set_defaults(fn=_cmd_insight)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        _setup_logging()
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse exits 0 for --help, 2 for usage errors
            return 0 if exc.code == 0 else 1
        return args.fn(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 -- CLI boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
