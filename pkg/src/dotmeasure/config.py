"""Run configuration files.

A configuration is an INI document with three sections::

    [model]
    name = double_dot

    [params]
    Gamma_L = 1
    Gamma_R = 1
    Omega = 1

    [run]
    tmax = 20
    npoints = 401

Primed widths default to their unprimed counterparts.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import re
from dataclasses import dataclass, field

from .errors import ConfigError, DotMeasureError
from .models import (
    DetectorRegime,
    DoubleDotDetectorParams,
    DoubleDotParams,
    EnergyConfig,
    Liouvillian,
    SingleDotDetectorParams,
    build_double_dot,
    build_double_dot_detector,
    build_reduced_double_dot,
    build_single_dot_detector,
)

# (required, optional) parameter keys per model
MODEL_KEYS = {
    "single_dot_detector": (
        ("Gamma_L", "Gamma_R", "gamma_L", "gamma_R"),
        ("Gamma_Lp", "Gamma_Rp", "gamma_Lp", "gamma_Rp"),
    ),
    "double_dot": (("Gamma_L", "Gamma_R", "Omega"), ("epsilon",)),
    "reduced": (("Gamma_L", "Gamma_R", "Omega", "gamma_L"), ("epsilon",)),
    "double_dot_detector": (
        ("Gamma_L", "Gamma_R", "Omega", "gamma_L", "gamma_R"),
        ("epsilon", "Omega_p", "Gamma_Lp", "gamma_Lp", "gamma_Rp", "U1", "U2",
         "regime", "E0", "E1", "E2", "EF_det", "EF_sys"),
    ),
}
STRING_PARAMS = {"regime"}
ENERGY_KEYS = ("E0", "E1", "E2", "EF_det", "EF_sys")

MODES = ("evolve", "steady", "sweep", "scenario")
METHODS = ("exact", "rk-adaptive")
SCALES = ("linear", "log")


@dataclass(frozen=True)
class RunSpec:
    mode: str | None = None
    tmax: float = 10.0
    npoints: int = 201
    tol: float = 1e-10
    method: str = "exact"
    initial: str | None = None
    parameter: str | None = None
    start: float | None = None
    stop: float | None = None
    count: int = 11
    scale: str = "linear"
    scenario: str | None = None


RUN_KEYS = tuple(f.name for f in dataclasses.fields(RunSpec))
_INT_RUN_KEYS = {"npoints", "count"}
_STR_RUN_KEYS = {"mode", "method", "initial", "parameter", "scale", "scenario"}


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict = field(default_factory=dict)
    run: RunSpec = field(default_factory=RunSpec)

    def __post_init__(self):
        validate(self)


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if current == section and key is not None:
            if re.match(rf"^{re.escape(key)}\s*[=:]", line):
                return n
    return None


def _number(value: str, key: str, line: int | None, integer: bool = False):
    try:
        return int(value) if integer else float(value)
    except ValueError:
        kind = "an integer" if integer else "a number"
        where = f" (line {line})" if line else ""
        raise ConfigError(f"{key} must be {kind}, got {value!r}{where}", key=key, line=line)


def read_ini(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except (configparser.MissingSectionHeaderError, configparser.DuplicateOptionError,
            configparser.DuplicateSectionError) as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"parse error at line {line}: {exc.message}", line=line) from None
    except configparser.ParsingError as exc:
        line, bad = exc.errors[0] if exc.errors else (None, exc)
        raise ConfigError(f"parse error at line {line}: {bad}", line=line) from None
    return cp


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    cp = read_ini(text)
    for section in cp.sections():
        if section not in ("model", "params", "run"):
            raise ConfigError(f"unknown section [{section}]", key=section,
                              line=_line_of(text, section))
    if not cp.has_section("model") or "name" not in cp["model"]:
        raise ConfigError("missing [model] name", key="name")
    for key in cp["model"]:
        if key != "name":
            raise ConfigError(f"unknown key {key!r} in [model]", key=key,
                              line=_line_of(text, "model", key))
    model = cp["model"]["name"].strip()

    params = {}
    if cp.has_section("params"):
        for key, value in cp["params"].items():
            line = _line_of(text, "params", key)
            if key in STRING_PARAMS:
                params[key] = value.strip()
            else:
                params[key] = _number(value, key, line)

    run = {}
    if cp.has_section("run"):
        for key, value in cp["run"].items():
            line = _line_of(text, "run", key)
            if key not in RUN_KEYS:
                raise ConfigError(f"unknown key {key!r} in [run] (line {line})", key=key, line=line)
            if key in _STR_RUN_KEYS:
                run[key] = value.strip()
            else:
                run[key] = _number(value, key, line, integer=key in _INT_RUN_KEYS)
    try:
        return RunConfig(model, params, RunSpec(**run))
    except ConfigError as exc:
        if exc.line is None and exc.key is not None:
            exc.line = _line_of(text, "params", exc.key) or _line_of(text, "run", exc.key)
        raise


def _coerce_override(key, value):
    if key in STRING_PARAMS or key in _STR_RUN_KEYS:
        return value
    return _number(value, key, None, integer=key in _INT_RUN_KEYS)


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Apply ``key=value`` overrides; ``run.<key>`` targets the [run] section."""
    params = dict(cfg.params)
    run = dataclasses.asdict(cfg.run)
    model = cfg.model
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value", key=item)
        key, value = (s.strip() for s in item.split("=", 1))
        if key == "model":
            model = value
        elif key.startswith("run."):
            k = key[4:]
            if k not in RUN_KEYS:
                raise ConfigError(f"unknown run key {k!r}", key=k)
            run[k] = _coerce_override(k, value)
        else:
            params[key] = _coerce_override(key, value)
    return RunConfig(model, params, RunSpec(**run))


def validate(cfg: RunConfig) -> None:
    if cfg.model not in MODEL_KEYS:
        raise ConfigError(f"unknown model {cfg.model!r}; expected one of {sorted(MODEL_KEYS)}",
                          key="name")
    required, optional = MODEL_KEYS[cfg.model]
    allowed = set(required) | set(optional)
    for key in cfg.params:
        if key not in allowed:
            raise ConfigError(f"parameter {key!r} is not valid for model {cfg.model}", key=key)
    for key in required:
        if key not in cfg.params:
            raise ConfigError(f"model {cfg.model} requires parameter {key!r}", key=key)

    r = cfg.run
    if r.mode is not None and r.mode not in MODES:
        raise ConfigError(f"unknown run mode {r.mode!r}", key="mode")
    if not r.tmax > 0:
        raise ConfigError("tmax must be positive", key="tmax")
    if r.npoints < 2:
        raise ConfigError("npoints must be at least 2", key="npoints")
    if not r.tol > 0:
        raise ConfigError("tol must be positive", key="tol")
    if r.method not in METHODS:
        raise ConfigError(f"unknown method {r.method!r}; expected one of {METHODS}", key="method")
    if r.scale not in SCALES:
        raise ConfigError(f"unknown scale {r.scale!r}; expected linear or log", key="scale")
    if r.count < 2:
        raise ConfigError("sweep count must be at least 2", key="count")
    if r.parameter is not None:
        if r.parameter not in allowed or r.parameter in STRING_PARAMS:
            raise ConfigError(
                f"cannot sweep {r.parameter!r} for model {cfg.model}", key="parameter"
            )
        if r.start is None or r.stop is None:
            raise ConfigError("sweep needs start and stop", key="start" if r.start is None else "stop")
        if r.scale == "log" and (r.start <= 0 or r.stop <= 0):
            raise ConfigError("log sweep needs positive start and stop", key="scale")
    if r.mode == "sweep" and r.parameter is None:
        raise ConfigError("sweep mode requires a parameter", key="parameter")
    # surface physics errors (negative widths, bad regime) at parse time
    try:
        build_model(cfg.model, cfg.params)
    except DotMeasureError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _double_dot_detector_params(params: dict) -> DoubleDotDetectorParams:
    widths = {k: v for k, v in params.items() if k not in ENERGY_KEYS}
    if "E0" in params and "EF_det" in params:
        energies = EnergyConfig(
            E0=params["E0"],
            U1=params.get("U1", 0.0),
            U2=params.get("U2", 0.0),
            EF_det=params["EF_det"],
            E1=params.get("E1", 0.0),
            E2=params.get("E2", params.get("E1", 0.0) + params.get("epsilon", 0.0)),
            EF_sys=params.get("EF_sys", math.inf),
        )
        if "epsilon" in params and not math.isclose(energies.epsilon, params["epsilon"]):
            raise ConfigError("epsilon disagrees with E2 - E1", key="epsilon")
        regime = widths.pop("regime", None)
        widths.pop("U1", None)
        widths.pop("U2", None)
        p = DoubleDotDetectorParams.from_energies(energies, **widths)
        if regime is not None and DetectorRegime.parse(regime) is not p.regime:
            raise ConfigError(
                f"regime {regime} contradicts energies (classified {p.regime.value})",
                key="regime",
            )
        return p
    if any(k in params for k in ENERGY_KEYS):
        raise ConfigError("energy keys need at least E0 and EF_det", key="EF_det")
    return DoubleDotDetectorParams(**widths)


def build_model(model: str, params: dict) -> Liouvillian:
    """Construct the generator for ``model`` from a flat parameter map."""
    if model == "single_dot_detector":
        return build_single_dot_detector(SingleDotDetectorParams(**params))
    if model == "double_dot":
        return build_double_dot(DoubleDotParams(**params))
    if model == "reduced":
        rest = {k: v for k, v in params.items() if k != "gamma_L"}
        return build_reduced_double_dot(DoubleDotParams(**rest), params["gamma_L"])
    if model == "double_dot_detector":
        return build_double_dot_detector(_double_dot_detector_params(params))
    raise ConfigError(f"unknown model {model!r}", key="name")
