"""Flat ``key = value`` run configuration.

Values come from three layers, later ones winning: the profile defaults
(``desk`` or ``paper``), a config file, and command-line overrides. Unknown
keys are rejected and every value is range-checked when loaded.
"""

import configparser
import math
from dataclasses import dataclass

from .arm import ArmParams
from .errors import ConfigError, SoftArmError
from .harness import PhaseSplit
from .readout import DEFAULT_LAMBDA
from .sweep import SweepGrid

PROFILES = {
    "desk": {
        "amplitudes": (2.0, 6.0),
        "taus": (0.125, 1.0),
        "trials": 5,
        "narma_orders": (2, 5, 9),
        "washout": 200,
        "train": 1000,
        "eval": 1000,
    },
    "paper": {
        "amplitudes": (1.0, 2.0, 3.0, 4.0, 5.0, 6.0),
        "taus": (0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0),
        "trials": 20,
        "narma_orders": (2, 3, 4, 5, 6, 7, 8, 9),
        "washout": 500,
        "train": 2000,
        "eval": 2500,
    },
}


@dataclass(frozen=True)
class Option:
    name: str
    kind: str
    default: object
    unit: str
    help: str


_ARM = ArmParams()

OPTIONS = [
    Option("profile", "profile", "desk", "", "default set: desk (small grid, short phases) or paper"),
    Option("rest_length", "float", _ARM.rest_length, "m", "unactuated actuator length"),
    Option("max_extension", "float", _ARM.max_extension, "m", "extension at full pressure"),
    Option("neutral_offset", "float", _ARM.neutral_offset, "m", "actuator distance from the neutral axis"),
    Option("section_joint_offset", "float", _ARM.section_joint_offset, "rad", "twist between sections"),
    Option("section_mass", "float", _ARM.section_mass, "kg", "mass of one section"),
    Option("pma_radius", "float", _ARM.pma_radius, "m", "mean actuator radius"),
    Option("stiffness", "float", _ARM.stiffness, "N/m", "axial stiffness per actuator"),
    Option("damping", "auto_float", None, "N*s/m", "damping per actuator (auto: damping ratio 0.15)"),
    Option("effective_mass", "auto_float", None, "kg", "inertia per coordinate (auto: section_mass/3)"),
    Option("gravity", "float", _ARM.gravity, "m/s^2", "gravitational acceleration (0 disables)"),
    Option("deadzone_pressure", "float", _ARM.deadzone_pressure, "Pa", "pressure producing no force"),
    Option("pressure_unit", "float", _ARM.pressure_unit, "Pa", "pressure per unit input weight"),
    Option("deadzone", "bool", _ARM.deadzone, "", "subtract the deadzone pressure"),
    Option("hanging", "bool", _ARM.hanging, "", "arm hangs along gravity (false: upright)"),
    Option("washout", "int", None, "steps", "washout phase length"),
    Option("train", "int", None, "steps", "training phase length"),
    Option("eval", "int", None, "steps", "evaluation phase length"),
    Option("normalize", "bool", True, "", "z-score nodes with training statistics"),
    Option("h_max", "float", 1e-3, "s", "largest RK4 step"),
    Option("ridge_lambda", "float", DEFAULT_LAMBDA, "", "ridge regularisation"),
    Option("narma_orders", "ints", None, "", "NARMA orders (2..9)"),
    Option("degrees", "ints", tuple(range(1, 11)), "", "Legendre degrees (1..10)"),
    Option("max_delay", "int", 50, "steps", "largest delay in the memory function"),
    Option("legendre_remap", "bool", True, "", "map inputs from [0, 1] to [-1, 1] before P_n"),
    Option("amplitudes", "floats", None, "", "input weight ranges A"),
    Option("taus", "floats", None, "s", "input hold times"),
    Option("trials", "int", None, "", "trials per grid cell"),
    Option("base_seed", "int", 0, "", "root of all derived seeds"),
    Option("workers", "int", 1, "", "worker processes for sweeps"),
    Option("output_dir", "str", "results", "", "directory for sweep output"),
]
OPTION_BY_NAME = {opt.name: opt for opt in OPTIONS}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_ints(text):
    out = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part or "-" in part[1:]:
            lo, hi = part.split("..") if ".." in part else part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def parse_value(opt, text):
    text = text.strip()
    try:
        if opt.kind == "float":
            return float(text)
        if opt.kind == "auto_float":
            return None if text.lower() == "auto" else float(text)
        if opt.kind == "int":
            return int(text)
        if opt.kind == "bool":
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if opt.kind == "floats":
            return tuple(float(x) for x in text.split(",") if x.strip())
        if opt.kind == "ints":
            return _parse_ints(text)
        if opt.kind == "profile":
            if text not in PROFILES:
                raise ValueError(f"unknown profile {text!r} (choose from {', '.join(PROFILES)})")
            return text
        return text
    except ValueError as exc:
        raise ConfigError(f"{opt.name}: {exc}") from exc


def format_value(opt, value):
    if value is None:
        return "auto"
    if opt.kind == "bool":
        return "true" if value else "false"
    if opt.kind in ("floats", "ints"):
        return ", ".join(repr(v) for v in value)
    if opt.kind in ("float", "auto_float"):
        return repr(float(value))
    return str(value)


class Config:
    """Validated option values; attribute access by option name."""

    def __init__(self, values):
        self._values = dict(values)
        self.validate()

    def __getattr__(self, name):
        try:
            return self.__dict__["_values"][name]
        except KeyError:
            raise AttributeError(name) from None

    def as_dict(self):
        return dict(self._values)

    @classmethod
    def load(cls, path=None, profile=None, overrides=None):
        file_values = read_config_file(path) if path else {}
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        for key in overrides:
            if key not in OPTION_BY_NAME:
                raise ConfigError(f"unknown option {key!r}")
        chosen = overrides.get("profile") or profile or file_values.get("profile") or "desk"
        values = {opt.name: opt.default for opt in OPTIONS}
        values.update(PROFILES[parse_value(OPTION_BY_NAME["profile"], chosen)])
        values.update(file_values)
        for key, value in overrides.items():
            values[key] = parse_value(OPTION_BY_NAME[key], value) if isinstance(value, str) else value
        values["profile"] = chosen
        return cls(values)

    def validate(self):
        v = self._values
        for key in v:
            if key not in OPTION_BY_NAME:
                raise ConfigError(f"unknown option {key!r}")
        for key in ("h_max",):
            if not (math.isfinite(v[key]) and 0 < v[key] <= 1e-3):
                raise ConfigError(f"{key} must be in (0, 1e-3] s")
        if v["ridge_lambda"] < 0:
            raise ConfigError("ridge_lambda must be >= 0")
        if not v["amplitudes"] or any(not (a > 0 and math.isfinite(a)) for a in v["amplitudes"]):
            raise ConfigError("amplitudes must be a non-empty list of positive numbers")
        if not v["taus"] or any(not (t > 0 and math.isfinite(t)) for t in v["taus"]):
            raise ConfigError("taus must be a non-empty list of positive numbers")
        if any(not 1 <= n <= 10 for n in v["degrees"]):
            raise ConfigError("degrees must lie in 1..10")
        if v["workers"] < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 <= v["max_delay"] <= 50:
            raise ConfigError("max_delay must lie in 0..50")
        if v["base_seed"] < 0 or v["base_seed"] >= 1 << 64:
            raise ConfigError("base_seed must fit in 64 unsigned bits")
        try:
            self.arm_params()
            split = self.split()
            self.grid()
        except SoftArmError as exc:
            raise ConfigError(str(exc)) from exc
        if split.washout < v["max_delay"]:
            raise ConfigError("washout must be at least max_delay steps")

    def arm_params(self):
        v = self._values
        return ArmParams(**{name: v[name] for name in ArmParams.__dataclass_fields__})

    def split(self):
        return PhaseSplit(self.washout, self.train, self.eval)

    def grid(self, **changes):
        v = self._values
        fields = dict(
            amplitudes=v["amplitudes"], taus=v["taus"], trials=v["trials"],
            narma_orders=v["narma_orders"], degrees=v["degrees"], max_delay=v["max_delay"],
            base_seed=v["base_seed"], split=self.split(), legendre_remap=v["legendre_remap"],
            normalize=v["normalize"], h_max=v["h_max"],
        )
        fields.update(changes)
        return SweepGrid(**fields)

    def dumps(self):
        lines = []
        for opt in OPTIONS:
            unit = f" [{opt.unit}]" if opt.unit else ""
            lines.append(f"# {opt.help}{unit}")
            lines.append(f"{opt.name} = {format_value(opt, self._values[opt.name])}")
        return "\n".join(lines) + "\n"

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())


def read_config_file(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def parse_config_text(text, source="<config>"):
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    values = {}
    for key, raw in parser.items("config"):
        if key not in OPTION_BY_NAME:
            raise ConfigError(f"{source}: unknown option {key!r}")
        values[key] = parse_value(OPTION_BY_NAME[key], raw)
    return values
