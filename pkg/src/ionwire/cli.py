"""Command-line front end: subcommand dispatch and file emission.

Exit codes are a contract: 0 success, 1 expectation-band failure,
2 usage or configuration error. All computation happens in the library
modules; this layer owns argument parsing, the master seed, output
paths, and atomic writes. Only two environment overrides exist,
IONWIRE_OUT (output directory) and IONWIRE_THREADS (worker count);
every physical parameter must come from the scenario file or flags so
runs stay auditable.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import hashlib
import json
import math
import os
import sys
import tempfile
from importlib import resources

import numpy as np

from . import __version__, analysis, circuit, experiments, geometry, svgplot
from .core import calcium_40, mhz_to_rad_s, per_s_to_quanta_per_ms, rad_s_to_hz
from .experiments import (ScheduleResonanceScan, ScheduleSwap,
                          ScheduleSympathetic)
from .scenario import ScenarioError, parse_scenario, parse_scenario_text, \
    scenario_digest

EXIT_OK = 0
EXIT_BAND_FAILURE = 1
EXIT_USAGE = 2

BUNDLED = ("scan_benchmark", "sympathetic_benchmark", "swap_benchmark")
CSV_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# output plumbing

class _Writer:
    """Single-writer context: atomic file emission under one directory."""

    def __init__(self, outdir):
        self.outdir = outdir
        self.outputs = []
        os.makedirs(outdir, exist_ok=True)

    def _emit(self, name, text):
        path = os.path.join(self.outdir, name)
        fd, tmp = tempfile.mkstemp(dir=self.outdir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.outputs.append(name)
        return path

    def csv(self, name, table_id, columns, rows):
        lines = [f"# ionwire csv schema v{CSV_SCHEMA_VERSION} table={table_id}",
                 ",".join(columns)]
        for row in rows:
            lines.append(",".join(_csv_cell(v) for v in row))
        return self._emit(name, "\n".join(lines) + "\n")

    def json(self, name, payload):
        return self._emit(name, json.dumps(payload, indent=2,
                                           sort_keys=True) + "\n")

    def text(self, name, text):
        return self._emit(name, text)


def _csv_cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value != value:
        return "nan"
    if value in (math.inf, -math.inf):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, np.integer):
        return int(value)
    return value


def _table(writer, name, table_id, columns, rows, fmt):
    if fmt == "json":
        payload = [{c: _json_safe(v) for c, v in zip(columns, row)}
                   for row in rows]
        writer.json(name + ".json", {"schema": f"ionwire.{table_id}.v1",
                                     "rows": payload})
    else:
        writer.csv(name + ".csv", table_id, columns, rows)


def _trajectory_rows(traj):
    return [(t, n1, s1, n2, s2) for t, n1, s1, n2, s2 in
            zip(traj.times, traj.n_bar_1, traj.n_bar_sem_1,
                traj.n_bar_2, traj.n_bar_sem_2)]


def _report_markdown(report):
    lines = [f"# {report.name}", "",
             f"scenario digest: `{report.scenario_digest}`",
             f"wall time: {report.wall_time_s:.2f} s",
             f"overall: {'PASS' if report.passed else 'FAIL'}", "",
             "| headline | value | unit | band | source | status |",
             "|---|---|---|---|---|---|"]
    for h in report.headline:
        band = "" if h.band is None else f"[{h.band[0]:g}, {h.band[1]:g}]"
        status = "" if h.passed is None else ("pass" if h.passed else "FAIL")
        lines.append(f"| {h.name} | {h.value:.6g} | {h.unit} | {band} "
                     f"| {h.source} | {status} |")
    if report.artifact_choices:
        lines += ["", "## artifact choices", ""]
        for k, v in sorted(report.artifact_choices.items()):
            lines.append(f"- {k}: {v}")
    if report.notes:
        lines += ["", "## notes", ""]
        for note in report.notes:
            lines.append(f"- {note}")
    return "\n".join(lines) + "\n"


def _write_report(writer, report, fmt, svg=False):
    headline_rows = [(h.name, h.value, h.unit,
                      "" if h.band is None else h.band[0],
                      "" if h.band is None else h.band[1],
                      h.source, "" if h.passed is None else h.passed)
                     for h in report.headline]
    _table(writer, f"{report.name}_headline", "headline",
           ("name", "value", "unit", "band_lo", "band_hi", "source", "passed"),
           headline_rows, fmt)
    for name, traj in report.trajectories.items():
        _table(writer, f"{report.name}_{name}_trajectory", "trajectory",
               ("time_s", "n_bar_1", "sem_1", "n_bar_2", "sem_2"),
               _trajectory_rows(traj), fmt)
    for name, fit in report.fits.items():
        writer.json(f"{report.name}_fit_{name}.json", fit.as_dict())
    for name, tab in report.tables.items():
        if isinstance(tab, dict) and all(isinstance(v, np.ndarray)
                                         for v in tab.values()):
            cols = list(tab)
            rows = list(zip(*(tab[c] for c in cols)))
            _table(writer, f"{report.name}_{name}", name, cols, rows, fmt)
        else:
            writer.json(f"{report.name}_{name}.json", _json_safe(tab))
    writer.text(f"{report.name}_report.md", _report_markdown(report))
    if svg:
        _write_svg(writer, report)


def _write_svg(writer, report):
    if report.trajectories:
        series = []
        for name, traj in sorted(report.trajectories.items()):
            series.append((f"{name} ion1", traj.times * 1e3, traj.n_bar_1))
            series.append((f"{name} ion2", traj.times * 1e3, traj.n_bar_2))
        writer.text(f"{report.name}_nbar.svg",
                    svgplot.line_plot(series, title=report.name,
                                      xlabel="time (ms)",
                                      ylabel="mean occupation"))
    scan = report.tables.get("scan")
    if scan is not None:
        f_mhz = scan["omega_rad_s"] / (2e6 * math.pi)
        rate = scan["rate_quanta_per_s"] * 1e-3
        err = scan["sigma_quanta_per_s"] * 1e-3
        writer.text(f"{report.name}_rate.svg",
                    svgplot.line_plot(
                        [("measured", f_mhz, rate, err)], title=report.name,
                        xlabel="probe frequency (MHz)",
                        ylabel="heating rate (quanta/ms)"))


def _manifest(writer, args, digest, started, extra=None):
    finished = datetime.datetime.now(datetime.timezone.utc).isoformat()
    payload = {"tool": "ionwire", "version": __version__,
               "command": args.command, "config_digest": digest,
               "seed": getattr(args, "seed", None),
               "started": started, "finished": finished,
               "outputs": sorted(writer.outputs)}
    if extra:
        payload.update(extra)
    writer.json("manifest.json", payload)


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# scenario access

def _load_scenario(args, default_bundled):
    name = args.scenario or default_bundled
    if name in BUNDLED:
        text = resources.files("ionwire.data").joinpath(
            name + ".scenario").read_text(encoding="utf-8")
        scn = parse_scenario_text(text, path=f"bundled:{name}")
    else:
        scn = parse_scenario(name)
    if args.seed is not None:
        scn = dataclasses.replace(scn, seed=args.seed)
    if args.ensemble is not None:
        scn = dataclasses.replace(scn, ensemble_size=args.ensemble)
    return scn


def _resolve_outdir(args, scn=None):
    if args.out:
        return args.out
    env = os.environ.get("IONWIRE_OUT")
    if env:
        return env
    if scn is not None and scn.output_dir:
        return scn.output_dir
    return "ionwire-out"


def _n_workers():
    value = os.environ.get("IONWIRE_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        raise ScenarioError("invalid", f"IONWIRE_THREADS must be an integer, "
                            f"got {value!r}")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_report(args, runner, default_bundled):
    scn = _load_scenario(args, default_bundled)
    started = _now()
    report = runner(scn, n_workers=_n_workers())
    writer = _Writer(_resolve_outdir(args, scn))
    _write_report(writer, report, args.format, svg=args.svg)
    _manifest(writer, args, report.scenario_digest, started,
              {"passed": report.passed})
    print(f"{report.name}: {'PASS' if report.passed else 'FAIL'} "
          f"({writer.outdir})")
    return EXIT_OK if report.passed else EXIT_BAND_FAILURE


def _cmd_predict(args):
    started = _now()
    report = experiments.run_prediction_table()
    writer = _Writer(_resolve_outdir(args))
    _write_report(writer, report, args.format, svg=False)
    rows = report.tables["rows"]
    _table(writer, "prediction_rows", "prediction",
           ("case", "kappa_hz"),
           [(r["case"], r["kappa_hz"]) for r in rows], args.format)
    _manifest(writer, args, report.scenario_digest, started,
              {"passed": report.passed})
    for h in report.headline:
        band = "" if h.band is None else \
            f"  band [{h.band[0]:g}, {h.band[1]:g}]" \
            f" {'pass' if h.passed else 'FAIL'}"
        print(f"{h.name:32s} {h.value:12.6g} {h.unit}{band}")
    print(f"{report.name}: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_BAND_FAILURE


def _cmd_rate(args):
    scn = _load_scenario(args, "sympathetic_benchmark")
    started = _now()
    pred = circuit.enhancement_report(scn.species, scn.site1, scn.site2,
                                      scn.wire)
    lc1 = circuit.circuit_equivalent(scn.species, scn.site1)
    lc2 = circuit.circuit_equivalent(scn.species, scn.site2)
    rows = [
        ("kappa_wire_hz", rad_s_to_hz(pred.kappa)),
        ("kappa_scenario_hz", rad_s_to_hz(scn.kappa())),
        ("coulomb_rate_hz", rad_s_to_hz(pred.coulomb_rate)),
        ("enhancement_ratio", pred.enhancement_ratio),
        ("site1_inductance_h", lc1.inductance),
        ("site1_capacitance_f", lc1.capacitance),
        ("site2_inductance_h", lc2.inductance),
        ("site2_capacitance_f", lc2.capacitance),
    ]
    writer = _Writer(_resolve_outdir(args, scn))
    _table(writer, "rate", "rate", ("quantity", "value"), rows, args.format)
    _manifest(writer, args, scenario_digest(scn), started)
    for name, value in rows:
        print(f"{name:24s} {value:.6g}")
    return EXIT_OK


def _cmd_deff(args):
    started = _now()
    heights = np.asarray([float(tok) for tok in args.heights_um.split(",")])
    if np.any(heights <= 0):
        raise ScenarioError("invalid", "heights must be positive")
    table = geometry.effective_distance_table(args.paddle_um * 1e-6,
                                              heights * 1e-6)
    rows = [(h * 1e6, d * 1e6) for h, d in table]
    writer = _Writer(_resolve_outdir(args))
    _table(writer, "deff", "deff", ("height_um", "deff_um"), rows, args.format)
    digest = hashlib.sha256(
        f"deff:{args.paddle_um}:{args.heights_um}".encode()).hexdigest()
    _manifest(writer, args, digest, started)
    for h_um, d_um in rows:
        print(f"height {h_um:8.2f} um   deff {d_um:8.2f} um")
    return EXIT_OK


def _cmd_thermometry(args):
    started = _now()
    seed = args.seed if args.seed is not None else 0
    carrier_rabi = 2 * math.pi * args.rabi_khz * 1e3
    t_pi = math.pi / carrier_rabi
    times = np.linspace(0.05 * t_pi, 6.0 * t_pi, args.points)
    dataset, truth = analysis.synthesize_rabi(
        args.nbar, carrier_rabi, args.lamb_dicke, times, args.shots, seed)
    fit = analysis.fit_rabi_nbar(dataset)
    n_fit = fit.parameters["n_bar"]
    rel = abs(n_fit - args.nbar) / args.nbar if args.nbar > 0 else n_fit

    writer = _Writer(_resolve_outdir(args))
    _table(writer, "thermometry_data", "rabi",
           ("pulse_time_s", "excitation_probability", "shots"),
           [(t, p, dataset.shots_per_point)
            for t, p in zip(dataset.pulse_times,
                            dataset.excitation_probability)], args.format)
    writer.json("thermometry_fit.json", fit.as_dict())
    writer.json("thermometry_truth.json", _json_safe(truth))
    digest = hashlib.sha256(json.dumps(_json_safe(truth),
                                       sort_keys=True).encode()).hexdigest()
    _manifest(writer, args, digest, started)
    sig = fit.sigmas.get("n_bar", float("nan"))
    print(f"injected n_bar {args.nbar:g}, fitted {n_fit:.4g} "
          f"+- {sig:.2g} ({100 * rel:.2f}% off), method {fit.method}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="ionwire",
        description="Simulation and analysis of wire-mediated motional "
                    "coupling between remotely trapped ions.")
    parser.add_argument("--version", action="version",
                        version=f"ionwire {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="master seed override (default: scenario value)")
    common.add_argument("--out", default=None, metavar="DIR",
                        help="output directory (default: IONWIRE_OUT or "
                             "./ionwire-out)")
    common.add_argument("--ensemble", type=int, default=None, metavar="N",
                        help="ensemble size override")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="tabular output format (default csv)")
    common.add_argument("--svg", action="store_true",
                        help="also emit SVG line plots")
    scenario_opt = argparse.ArgumentParser(add_help=False)
    scenario_opt.add_argument("--scenario", default=None, metavar="PATH",
                              help="scenario file, or one of: "
                                   + ", ".join(BUNDLED))

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("rate", parents=[common, scenario_opt],
                   help="coupling rates and circuit equivalents")
    deff = sub.add_parser("deff", parents=[common],
                          help="effective ion-wire distance vs height")
    deff.add_argument("--paddle-um", type=float, default=120.0)
    deff.add_argument("--heights-um", default="40,50,60,70,80,100,150,200")
    sub.add_parser("swap", parents=[common, scenario_opt],
                   help="noiseless resonant exchange demonstration")
    sub.add_parser("scan", parents=[common, scenario_opt],
                   help="heating-rate spectroscopy across the resonance")
    sub.add_parser("sympathetic", parents=[common, scenario_opt],
                   help="sympathetic heating-rate reduction")
    thermo = sub.add_parser("thermometry", parents=[common],
                            help="Rabi thermometry round trip")
    thermo.add_argument("--nbar", type=float, default=182.0)
    thermo.add_argument("--shots", type=int, default=200)
    thermo.add_argument("--points", type=int, default=60)
    thermo.add_argument("--rabi-khz", type=float, default=50.0)
    thermo.add_argument("--lamb-dicke", type=float, default=0.05)
    sub.add_parser("predict", parents=[common],
                   help="predicted rates vs expectation bands")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "predict":
            return _cmd_predict(args)
        if args.command == "rate":
            return _cmd_rate(args)
        if args.command == "deff":
            return _cmd_deff(args)
        if args.command == "thermometry":
            return _cmd_thermometry(args)
        if args.command == "swap":
            return _cmd_report(args, experiments.run_swap_demo, "swap_benchmark")
        if args.command == "scan":
            return _cmd_report(args, experiments.run_resonance_scan,
                               "scan_benchmark")
        if args.command == "sympathetic":
            return _cmd_report(args, experiments.run_sympathetic,
                               "sympathetic_benchmark")
        raise AssertionError(f"unhandled command {args.command}")
    except ScenarioError as exc:
        print(f"ionwire: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"ionwire: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"ionwire: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry():
    sys.exit(main())
