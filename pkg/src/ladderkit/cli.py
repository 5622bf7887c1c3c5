"""Command-line entry point: ``ladderkit {synth,simulate,fit,metrics,export}``.

Exit codes: 0 success, 2 bad input, 3 no result (no passband / resonance).
Errors go to stderr as one line, ``ladderkit: error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .errors import InputError, LadderKitError, NoResult, SingularNetwork
from .fitting import FitOptions, fit_mbvd, fit_report, initial_guess
from .ladder import optimize_c0, sweep
from .metrics import filter_metrics, to_db
from .network import one_port_s11
from .touchstone import document_from_sweep, ports_from_path, read_touchstone, sweep_from_document, write_touchstone

EXIT_OK, EXIT_INPUT, EXIT_NO_RESULT = 0, 2, 3


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _stem(output: str) -> Path:
    path = Path(output)
    if path.suffix.lower() in (".s2p", ".json"):
        path = path.with_suffix("")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _design(args, allow_optimisation: bool):
    cfg = load_config(args.config)
    z0 = cfg.z0 if args.z0 is None else args.z0
    if not z0 > 0:
        raise ConfigError("--z0", f"must be positive, got {z0!r}")
    try:
        grid = cfg.frequency_grid(args.grid_points)
    except InputError as exc:
        raise ConfigError("--grid-points", str(exc)) from None
    sidecar = {"tool": "ladderkit", "version": __version__, "z0_ohm": z0, "topology": cfg.topology,
               "order": cfg.order, "grid": {"f_start_hz": grid.f_start, "f_stop_hz": grid.f_stop,
                                            "n_points": grid.n_points}}
    if cfg.needs_optimisation:
        if not allow_optimisation:
            raise ConfigError("c0_series_f", "simulate needs fixed c0_series_f and c0_shunt_f values")
        series_range, shunt_range = cfg.c0_ranges()
        result = optimize_c0(cfg.base, series_range, shunt_range, grid, z0, cfg.coarse_points,
                             cfg.min_rejection_db, cfg.rejection_offset)
        c0_series, c0_shunt = result.c0_series, result.c0_shunt
        sidecar["optimised"] = True
        sidecar["objective_db"] = result.objective
    else:
        c0_series, c0_shunt = cfg.c0_series, cfg.c0_shunt
        sidecar["optimised"] = False
    sidecar["c0_series_f"] = c0_series
    sidecar["c0_shunt_f"] = c0_shunt
    topology = cfg.base.build(c0_series, c0_shunt)
    sidecar["stages"] = [s.orientation.value for s in topology.stages]
    response = sweep(topology, grid, z0)
    return cfg, z0, response, sidecar


def _write_design(args, response, z0, sidecar, with_metrics: bool, rejection_offset: float) -> None:
    stem = _stem(args.output)
    doc = document_from_sweep(response, 2, "S", "RI", "GHz", z0, comments=("ladderkit simulated ladder response",))
    with open(stem.with_suffix(".s2p"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_touchstone(doc))
    if with_metrics:
        metrics = filter_metrics(response, rejection_offset)
        _emit(_dump_json(metrics.to_dict()), str(stem) + ".metrics.json")
    _emit(_dump_json(sidecar), str(stem) + ".run.json")


def cmd_synth(args) -> int:
    cfg, z0, response, sidecar = _design(args, allow_optimisation=True)
    _write_design(args, response, z0, sidecar, True, cfg.rejection_offset)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg, z0, response, sidecar = _design(args, allow_optimisation=False)
    _write_design(args, response, z0, sidecar, False, cfg.rejection_offset)
    return EXIT_OK


def cmd_fit(args) -> int:
    if ports_from_path(args.input) != 1:
        raise InputError("fit expects a one-port .s1p file")
    doc = read_touchstone(args.input)
    data = sweep_from_document(doc)
    opts = FitOptions(args.max_iterations, args.tolerance, args.weighting, args.fit_parasitics,
                      args.f_min_hz, args.f_max_hz)
    data = data.window(opts.f_min, opts.f_max)
    result = fit_mbvd(data, initial_guess(data), opts)
    _emit(_dump_json(fit_report(result)), args.output)
    return EXIT_OK


def cmd_metrics(args) -> int:
    doc = read_touchstone(args.input)
    if doc.n_ports != 2:
        raise InputError("metrics expects a two-port .s2p file")
    metrics = filter_metrics(sweep_from_document(doc), args.rejection_offset)
    _emit(_dump_json(metrics.to_dict()), args.output)
    return EXIT_OK


def cmd_export(args) -> int:
    if args.format != "csv":
        raise InputError(f"unsupported export format {args.format!r}")
    doc = read_touchstone(args.input)
    data = sweep_from_document(doc)
    columns = [("freq_hz", data.frequencies)]
    names = ("S21", "S11") if doc.n_ports == 2 else ("S11",)
    for name in names:
        trace = data[name] if name in data else one_port_s11(data["Y"], doc.r_ref)
        columns.append((f"{name.lower()}_db", to_db(trace)))
        columns.append((f"{name.lower()}_deg", np.degrees(np.angle(trace))))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([name for name, _ in columns])
    for row in zip(*(values for _, values in columns)):
        writer.writerow([format(float(v), ".12g") for v in row])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ladderkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (
        ("synth", cmd_synth, "synthesise (optimising C0 if ranges are given), simulate and report metrics"),
        ("simulate", cmd_simulate, "simulate a ladder with fixed C0 values"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON design configuration")
        p.add_argument("--output", required=True, help="output path stem (writes <stem>.s2p and sidecars)")
        p.add_argument("--z0", type=float, help="reference impedance in ohms (overrides config)")
        p.add_argument("--grid-points", type=int, help="number of frequency points (overrides config)")
        p.set_defaults(func=func)

    p = sub.add_parser("fit", help="fit an MBVD model to a one-port .s1p measurement")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="report JSON path (default: stdout)")
    p.add_argument("--max-iterations", type=int, default=FitOptions.max_iterations)
    p.add_argument("--tolerance", type=float, default=FitOptions.tolerance)
    p.add_argument("--weighting", choices=("magnitude", "uniform"), default=FitOptions.weighting)
    p.add_argument("--fit-parasitics", action="store_true", help="also fit series routing rs and ls")
    p.add_argument("--f-min-hz", type=float, help="lower edge of the fit window")
    p.add_argument("--f-max-hz", type=float, help="upper edge of the fit window")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("metrics", help="filter figures of merit of a two-port .s2p file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="metrics JSON path (default: stdout)")
    p.add_argument("--rejection-offset", type=float, default=0.5)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export", help="export a Touchstone file to CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--format", default="csv", choices=("csv",))
    p.set_defaults(func=cmd_export)
    return parser


def _fail(kind: str, exc: BaseException) -> None:
    message = " ".join(str(exc).split()) or type(exc).__name__
    sys.stderr.write(f"ladderkit: error[{kind}]: {type(exc).__name__}: {message}\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except NoResult as exc:
        _fail("no-result", exc)
        return EXIT_NO_RESULT
    except (InputError, SingularNetwork) as exc:
        _fail("input", exc)
        return EXIT_INPUT
    except OSError as exc:
        _fail("input", exc)
        return EXIT_INPUT
    except LadderKitError as exc:
        _fail("input", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
