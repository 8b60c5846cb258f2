"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import experiments as ex
from . import output
from .config import KEYS, ConfigError, parse_config
from .kk import classify_regime, d_kk
from .model import validate_params
from .transfer import SingularIndexError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

COMMANDS = ("profile", "spectrum", "dkk", "map", "lengths", "lattice", "validate")
EXTENSIONS = {"csv": "csv", "structured": "json"}


class NumericalError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat JSON config file")
    common.add_argument("--out", metavar="PATH", help="output file (default: <command>.<ext>)")
    common.add_argument("--format", choices=sorted(EXTENSIONS), default="csv")
    common.add_argument("--threads", type=int, default=None, help="worker threads (env KKSPACE_THREADS)")
    over = common.add_argument_group("parameter overrides (same names as config keys)")
    for key in KEYS:
        if key == "schema_version":
            continue
        over.add_argument(_flag(key), dest=key, metavar="V", default=None)

    parser = _Parser(prog="kkspace", description="Spatial Kramers-Kronig susceptibility and transfer-matrix scans.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    helps = {
        "profile": "chi(x) and its KK reconstruction at one detuning",
        "spectrum": "R_l, R_r, T, C and D_kk against delta_p",
        "dkk": "print D_kk at one detuning",
        "map": "D_kk, R_l, R_r over (delta0, delta_p)",
        "lengths": "spectra for several sample lengths",
        "lattice": "Bragg-lattice spectrum and contrast band",
        "validate": "check the configuration and exit",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _threads(value):
    if value is None:
        return ex.default_threads()
    if value < 1:
        raise ConfigError("threads", "must be at least 1")
    return value


def _grid(values, with_delta0=False) -> ex.ScanGrid:
    kw = dict(
        delta_p_min=values["delta_p_min"],
        delta_p_max=values["delta_p_max"],
        delta_p_step=values["delta_p_step"],
        max_evaluations=values["max_evaluations"],
    )
    if with_delta0:
        kw.update(delta0_min=values["delta0_min"], delta0_max=values["delta0_max"], delta0_step=values["delta0_step"])
    return ex.ScanGrid(**kw)


def _check_rows(rows):
    if any(math.isnan(r.R_l) or math.isnan(r.T) for r in rows):
        raise NumericalError("non-finite reflectivity in spectrum")


def run(config) -> int:
    values = config.values
    params = config.params()
    thresholds = config.thresholds()
    model = config.model
    cmd = config.command
    threads = config.threads

    if cmd == "validate":
        report = validate_params(params)
        for key, msg in report.warnings:
            print(f"warning: {key}: {msg}")
        print("ok" if report.ok else "invalid")
        return EXIT_OK if report.ok else EXIT_CONFIG

    for key, msg in validate_params(params).warnings:
        print(f"warning: {key}: {msg}", file=sys.stderr)

    if cmd == "dkk":
        value = d_kk(values["delta_p"], params, model, thresholds)
        if math.isnan(value):
            raise NumericalError(f"D_kk is indeterminate at delta_p = {values['delta_p']}")
        print(output.fmt(value))
        print(f"regime: {classify_regime(value, thresholds).value}", file=sys.stderr)
        if config.out:
            row = {"delta_p_over_gamma12": output.num(values["delta_p"]), "D_kk": output.num(value)}
            table = (["delta_p_over_gamma12", "D_kk"], [[output.fmt(values["delta_p"]), output.fmt(value)]], row)
            output.write_output(table, config.format, config.out)
        return EXIT_OK

    if cmd == "profile":
        table = output.profile_table(ex.run_profile(values["delta_p"], params, model))
    elif cmd == "spectrum":
        rows = ex.run_spectrum(_grid(values), params, model, thresholds, threads)
        _check_rows(rows)
        table = output.spectrum_table(rows)
    elif cmd == "map":
        table = output.map_table(ex.run_map(_grid(values, True), params, model, thresholds, threads))
    elif cmd == "lengths":
        sweep = ex.run_length_sweep(values["lengths"], _grid(values), params, model, thresholds, threads)
        table = output.lengths_table(sweep)
    elif cmd == "lattice":
        rep = ex.run_lattice(params, _grid(values), values["contrast_threshold"], model=model, thresholds=thresholds, threads=threads)
        _check_rows(rep.rows)
        header, cells, objs = output.spectrum_table(rep.rows)
        summary = {
            "max_C": output.num(rep.max_C),
            "delta_p_at_max_C": output.num(rep.delta_p_at_max_C),
            "max_R_r": output.num(rep.max_R_r),
            "R_l_at_max_R_r": output.num(rep.R_l_at_max_R_r),
            "delta_p_at_max_R_r": output.num(rep.delta_p_at_max_R_r),
            "band": None if rep.band is None else [output.num(v) for v in rep.band],
            "contrast_threshold": output.num(rep.contrast_threshold),
        }
        table = (header, cells, {"rows": objs, "report": summary})
        for key, val in summary.items():
            print(f"{key}: {val}")
    else:  # pragma: no cover - argparse restricts the choices
        raise ConfigError("command", f"unknown command {cmd}")

    out = config.out or f"{cmd}.{EXTENSIONS[config.format]}"
    output.write_output(table, config.format, out)
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    overrides = {key: getattr(args, key) for key in KEYS if key != "schema_version"}
    try:
        threads = _threads(args.threads)
        config = parse_config(args.command, args.config, overrides, args.out, args.format, threads)
    except ConfigError as exc:
        print(f"kkspace: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return run(config)
    except ConfigError as exc:
        print(f"kkspace: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"kkspace: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalError, SingularIndexError, ZeroDivisionError, FloatingPointError, ex.InsufficientDataError) as exc:
        print(f"kkspace: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"kkspace: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
