"""Command-line front end: pole tables, trajectory sweeps, occupation curves,
the double-pole report and wavefunction samples.

Every table is CSV with ``#`` metadata lines echoing the full configuration,
or JSON with the same content; identical inputs give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .continuation import (SweepSpec, TrackingError, classify_regimes, find_double_pole, track,
                           unfolding_exponent)
from .poles import ContourError, PoleCountMismatch, SearchRegion, find_poles
from .potential import SWEEP_PARAMETERS, DoubleWellParams, build_double_well
from .scattering import occupation, wavefunction, well_intervals

EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_COUNT_MISMATCH = 3
EXIT_CONTOUR = 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


class Table:
    def __init__(self, command, config, options, columns):
        self.command = command
        self.config = config
        self.options = options
        self.columns = list(columns)
        self.rows = []
        self.summary = {}

    def render(self, fmt):
        if fmt == "json":
            doc = {
                "command": self.command,
                "config": self.config,
                "options": self.options,
                "columns": self.columns,
                "rows": [[_json_value(v) for v in row] for row in self.rows],
                "summary": self.summary,
            }
            return json.dumps(doc, indent=2, sort_keys=True) + "\n"
        lines = [
            f"# dwpoles {__version__} {self.command}",
            f"# config: {json.dumps(self.config, sort_keys=True)}",
            f"# options: {json.dumps(self.options, sort_keys=True)}",
            ",".join(self.columns),
        ]
        lines += [",".join(_fmt(v) for v in row) for row in self.rows]
        lines += [f"# {k}: {_summary_text(v)}" for k, v in self.summary.items()]
        return "\n".join(lines) + "\n"


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _summary_text(v):
    if isinstance(v, dict):
        return " ".join(f"{k}={_fmt(x) if x is not None else 'none'}" for k, x in v.items())
    return str(v)


def _load_params(path):
    if path is None:
        return DoubleWellParams()
    try:
        with open(path) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config must be a JSON object")
        return DoubleWellParams.from_config(cfg)
    except (OSError, ValueError, TypeError) as exc:
        raise CliError(f"config error: {exc}", EXIT_CONFIG) from exc


def _region(args):
    try:
        return SearchRegion((args.re_min, args.re_max), (args.im_min, args.im_max), args.density)
    except ValueError as exc:
        raise CliError(f"bad search region: {exc}", EXIT_CONFIG) from exc


def _options(args, names):
    return {n: getattr(args, n) for n in names}


def _poles_or_fail(spec, region, threads):
    try:
        return find_poles(spec, region, threads=threads)
    except ContourError as exc:
        raise CliError(f"refusing region: a pole lies on the contour ({exc})", EXIT_CONTOUR) from exc
    except PoleCountMismatch as exc:
        raise CliError(f"winding-count mismatch: {exc}", EXIT_COUNT_MISMATCH) from exc


REGION_OPTS = ["re_min", "re_max", "im_min", "im_max", "density"]


def cmd_poles(args, params):
    region = _region(args)
    poles = _poles_or_fail(build_double_well(params), region, args.threads)
    table = Table("poles", params.to_config(), _options(args, REGION_OPTS),
                  ["E_r", "Gamma", "order", "residual"])
    for p in poles:
        table.rows.append([p.e_r, p.gamma, p.order, p.residual])
    return table


def cmd_sweep(args, params):
    if args.param not in SWEEP_PARAMETERS:
        raise CliError(f"unknown parameter {args.param}", EXIT_CONFIG)
    region = _region(args)
    start_params = params.with_param(args.param, args.start)
    seeds = _poles_or_fail(build_double_well(start_params), region, args.threads)
    try:
        sweep = SweepSpec(args.param, args.start, args.stop, args.step, args.min_step)
        trajs = track(start_params, sweep, seeds)
    except ValueError as exc:
        raise CliError(f"bad sweep: {exc}", EXIT_CONFIG) from exc
    except TrackingError as exc:
        raise CliError(f"tracking failed: {exc}", EXIT_COUNT_MISMATCH) from exc

    base = ["param_value", "trajectory_id", "E_r", "Gamma"]
    columns = ["trajectory_id", "param_value", "E_r", "Gamma"] if args.layout == "gnuplot" else base
    opts = _options(args, REGION_OPTS + ["param", "start", "stop", "step", "min_step", "layout"])
    table = Table("sweep", params.to_config(), opts, columns)
    for i, value in enumerate(trajs[0].values if trajs else []):
        for tid, t in enumerate(trajs):
            p = t.poles[i]
            row = dict(param_value=value, trajectory_id=tid, E_r=p.e_r, Gamma=p.gamma)
            table.rows.append([row[c] for c in columns])
    report = classify_regimes(trajs) if len(trajs) == 2 and len(trajs[0].values) > 2 else None
    if report is None:
        table.summary["transition"] = {args.param: None}
    else:
        table.summary["transition"] = {
            args.param: report.transition_parameter_value,
            "regime_before": report.regime_before,
            "regime_after": report.regime_after,
            "min_gap": report.min_pole_gap,
        }
    return table


def _chunked_map(fn, items, threads):
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def cmd_occupancy(args, params):
    spec = build_double_well(params)
    try:
        inner, outer = well_intervals(spec)
    except ValueError as exc:
        raise CliError(f"occupancy needs a double well with D > 0: {exc}", EXIT_CONFIG) from exc
    if args.count < 0 or args.e_min <= 0 or args.e_max < args.e_min:
        raise CliError("energy grid needs 0 < e_min <= e_max and count >= 0", EXIT_CONFIG)
    energies = np.linspace(args.e_min, args.e_max, args.count)

    def row(E):
        return [E, occupation(spec, E, inner), occupation(spec, E, outer)]

    table = Table("occupancy", params.to_config(), _options(args, ["e_min", "e_max", "count"]),
                  ["E", "P1", "P2"])
    table.rows = _chunked_map(row, list(energies), args.threads)
    return table


def cmd_wavefunction(args, params):
    spec = build_double_well(params)
    E = complex(args.energy_re, args.energy_im)
    x_max = args.x_max if args.x_max is not None else spec.extent + 2.0
    if args.count < 0 or args.x_min < 0 or x_max < args.x_min:
        raise CliError("position grid needs 0 <= x_min <= x_max and count >= 0", EXIT_CONFIG)
    xs = np.linspace(args.x_min, x_max, args.count)
    psi = wavefunction(spec, E, xs) if len(xs) else np.array([], dtype=complex)
    opts = _options(args, ["energy_re", "energy_im", "x_min", "count"])
    opts["x_max"] = x_max
    table = Table("wavefunction", params.to_config(), opts, ["x", "re_psi", "im_psi", "abs2"])
    table.rows = [[x, v.real, v.imag, abs(v) ** 2] for x, v in zip(xs, psi)]
    return table


def cmd_double_pole(args, params):
    region = _region(args)
    box = ((args.d_min, args.d_max), (args.v_min, args.v_max))
    result = find_double_pole(params, box, region=region, sweep_step=args.sweep_step)
    report = {
        "command": "double-pole",
        "config": params.to_config(),
        "options": _options(args, REGION_OPTS + ["d_min", "d_max", "v_min", "v_max", "sweep_step"]),
        "result": result.to_dict(),
    }
    if result.converged:
        exponent, samples = unfolding_exponent(params, result)
        report["unfolding"] = {
            "parameter": result.parameters[1],
            "exponent": exponent,
            "samples": [{"delta": d, "separation": s} for d, s in samples],
        }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    return text, (0 if result.converged else EXIT_FAILURE)


def _add_common(p, suppress):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=default, help="model parameters as JSON")
    p.add_argument("--out", default=default, help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=argparse.SUPPRESS if suppress else "csv")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS if suppress else 1,
                   help="worker threads for independent grid points")


def _add_region(p):
    p.add_argument("--re-min", type=float, default=1.0)
    p.add_argument("--re-max", type=float, default=4.0)
    p.add_argument("--im-min", type=float, default=-1.0)
    p.add_argument("--im-max", type=float, default=0.0)
    p.add_argument("--density", type=float, default=40.0, help="seed grid points per unit")


def build_parser():
    parser = argparse.ArgumentParser(prog="dwpoles", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poles", help="S-matrix poles in a search region")
    _add_common(p, suppress=True)
    _add_region(p)

    p = sub.add_parser("sweep", help="pole trajectories under a parameter sweep")
    _add_common(p, suppress=True)
    _add_region(p)
    p.add_argument("--param", default="D", choices=sorted(SWEEP_PARAMETERS))
    p.add_argument("--start", type=float, default=2.0)
    p.add_argument("--stop", type=float, default=0.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--min-step", type=float, default=1e-6)
    p.add_argument("--layout", choices=["default", "gnuplot"], default="default",
                   help="gnuplot puts trajectory_id first")

    p = sub.add_parser("occupancy", help="well occupation probabilities P1(E), P2(E)")
    _add_common(p, suppress=True)
    p.add_argument("--e-min", type=float, default=1.5)
    p.add_argument("--e-max", type=float, default=3.5)
    p.add_argument("--count", type=int, default=1000, help="grid points, endpoints included")

    p = sub.add_parser("double-pole", help="locate the coalescence of two poles")
    _add_common(p, suppress=True)
    _add_region(p)
    p.add_argument("--d-min", type=float, default=0.9)
    p.add_argument("--d-max", type=float, default=1.3)
    p.add_argument("--v-min", type=float, default=1.02)
    p.add_argument("--v-max", type=float, default=1.05)
    p.add_argument("--sweep-step", type=float, default=0.005)

    p = sub.add_parser("wavefunction", help="regular solution sampled on a grid")
    _add_common(p, suppress=True)
    p.add_argument("--energy-re", type=float, default=2.5)
    p.add_argument("--energy-im", type=float, default=0.0)
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--count", type=int, default=1000)
    return parser


COMMANDS = {
    "poles": cmd_poles,
    "sweep": cmd_sweep,
    "occupancy": cmd_occupancy,
    "wavefunction": cmd_wavefunction,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        params = _load_params(args.config)
        if args.command == "double-pole":
            text, code = cmd_double_pole(args, params)
        else:
            text, code = COMMANDS[args.command](args, params).render(args.format), 0
    except CliError as exc:
        print(f"dwpoles: {exc}", file=sys.stderr)
        return exc.code
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
