"""Run configuration: a flat JSON object, overridable from the command line.

Rates in rad/s, lengths in m, detunings and shifts in units of gamma12.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .kk import Thresholds
from .model import AtomMedium, ControlField, Lattice, Params, SampleGeometry, Uniform, validate
from .susceptibility import Model

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


_NUMBER = "number"
_INT = "int"
_STR = "str"
_LIST = "list"

# key -> (kind, default); None means "use the subcommand default"
KEYS: dict[str, tuple[str, object]] = {
    "schema_version": (_INT, SCHEMA_VERSION),
    "d12": (_NUMBER, 1.79e-29),
    "gamma12": (_NUMBER, 2.87e6),
    "gamma13": (_NUMBER, 3.03e6),
    "N0": (_NUMBER, 2.0e19),
    "lambda_p": (_NUMBER, 795e-9),
    "L": (_NUMBER, 5.0e-6),
    "slice_len": (_NUMBER, 10e-9),
    "density": (_STR, "uniform"),
    "lattice_period": (_NUMBER, 400e-9),
    "lattice_width": (_NUMBER, 400e-9 / 6),
    "delta0": (_NUMBER, 100.0),
    "detuning_ratio": (_NUMBER, 100.0),
    "model": (_STR, Model.TWO_LEVEL.value),
    "delta_p": (_NUMBER, -50.0),
    "delta_p_min": (_NUMBER, None),
    "delta_p_max": (_NUMBER, None),
    "delta_p_step": (_NUMBER, None),
    "delta0_min": (_NUMBER, -100.0),
    "delta0_max": (_NUMBER, 100.0),
    "delta0_step": (_NUMBER, 1.0),
    "lengths": (_LIST, [10e-6, 15e-6, 20e-6]),
    "t_unbroken": (_NUMBER, 0.05),
    "t_broken": (_NUMBER, 0.95),
    "contrast_threshold": (_NUMBER, 0.9),
    "max_evaluations": (_INT, 4_000_000),
}

# Bragg-lattice sample used by the ``lattice`` subcommand
LATTICE_DEFAULTS = {
    "N0": 2.0e18,
    "L": 60e-6,
    "delta0": 30.0,
    "density": "lattice",
    "lattice_period": 400e-9,
    "lattice_width": 400e-9 / 6,
}

GRID_DEFAULTS = {
    "profile": (-150.0, 50.0, 0.25),
    "spectrum": (-150.0, 50.0, 0.25),
    "dkk": (-150.0, 50.0, 0.25),
    "map": (-150.0, 150.0, 1.5),
    "lengths": (-130.0, 30.0, 0.25),
    "lattice": (-45.0, 15.0, 0.25),
    "validate": (-150.0, 50.0, 0.25),
}


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    threads: int | None = None

    def params(self) -> Params:
        return build_params(self.values)

    def thresholds(self) -> Thresholds:
        return Thresholds(unbroken=self.values["t_unbroken"], broken=self.values["t_broken"])

    @property
    def model(self) -> Model:
        return Model(self.values["model"])


def _coerce(key: str, value):
    kind = KEYS[key][0]
    if kind == _NUMBER:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            if isinstance(value, str):
                try:
                    value = float(value)
                except ValueError:
                    raise ConfigError(key, f"expected a number, got {value!r}") from None
            else:
                raise ConfigError(key, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(key, "must be finite")
        return value
    if kind == _INT:
        try:
            iv = int(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected an integer, got {value!r}") from None
        if isinstance(value, bool) or float(value) != iv:
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return iv
    if kind == _LIST:
        if isinstance(value, str):
            value = [v for v in value.split(",") if v.strip()]
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigError(key, "expected a non-empty list of numbers")
        out = []
        for v in value:
            try:
                out.append(float(v))
            except (TypeError, ValueError):
                raise ConfigError(key, f"expected numbers, got {v!r}") from None
        return out
    if not isinstance(value, str):
        raise ConfigError(key, f"expected a string, got {value!r}")
    return value


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    return data


def resolve(command: str, file_values: dict | None = None, overrides: dict | None = None) -> dict:
    """Merge defaults, file values and overrides; unknown keys are rejected."""
    values = {k: default for k, (_, default) in KEYS.items()}
    if command == "lattice":
        values.update(LATTICE_DEFAULTS)
    lo, hi, step = GRID_DEFAULTS.get(command, GRID_DEFAULTS["spectrum"])
    values.update(delta_p_min=lo, delta_p_max=hi, delta_p_step=step)

    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if key not in KEYS:
                raise ConfigError(key, "unknown key")
            if value is None:
                continue
            values[key] = _coerce(key, value)

    if values["schema_version"] != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {values['schema_version']}")
    if values["density"] not in ("uniform", "lattice"):
        raise ConfigError("density", "must be 'uniform' or 'lattice'")
    try:
        Model(values["model"])
    except ValueError:
        raise ConfigError("model", "must be 'two-level' or 'three-level'") from None
    if values["detuning_ratio"] <= 0:
        raise ConfigError("detuning_ratio", "must be positive")
    for key in ("delta_p_step", "delta0_step"):
        if values[key] <= 0:
            raise ConfigError(key, "must be positive")
    if values["delta_p_max"] < values["delta_p_min"]:
        raise ConfigError("delta_p_max", "must not be below delta_p_min")
    if values["delta0_max"] < values["delta0_min"]:
        raise ConfigError("delta0_max", "must not be below delta0_min")
    if any(L <= 0 for L in values["lengths"]):
        raise ConfigError("lengths", "lengths must be positive")
    if not 0 <= values["t_unbroken"] <= values["t_broken"]:
        raise ConfigError("t_unbroken", "need 0 <= t_unbroken <= t_broken")
    if values["max_evaluations"] <= 0:
        raise ConfigError("max_evaluations", "must be positive")

    report = validate(*_parts(values))
    if report.errors:
        key, msg = report.errors[0]
        raise ConfigError(key, msg)
    return values


def _parts(values: dict):
    g12 = values["gamma12"]
    g13 = values["gamma13"]
    medium = AtomMedium(
        d12=values["d12"],
        gamma12=g12,
        gamma13=g13,
        gamma23=g12 + g13,
        N0=values["N0"],
        lambda_p=values["lambda_p"],
    )
    control = ControlField.from_shift(values["delta0"], values["detuning_ratio"])
    if values["density"] == "lattice":
        density = Lattice(period=values["lattice_period"], delta_x=values["lattice_width"])
    else:
        density = Uniform()
    geometry = SampleGeometry(L=values["L"], slice_len=values["slice_len"], density=density)
    return medium, control, geometry


def build_params(values: dict) -> Params:
    return Params(*_parts(values))


def parse_config(command: str, path=None, overrides: dict | None = None, out=None, fmt="csv", threads=None) -> RunConfig:
    file_values = load_config_file(path) if path else {}
    return RunConfig(command, resolve(command, file_values, overrides), out, fmt, threads)


def write_config(config: RunConfig, path) -> None:
    """Write the fully resolved values; ``parse_config`` on the file reproduces them."""
    text = json.dumps(config.values, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")
