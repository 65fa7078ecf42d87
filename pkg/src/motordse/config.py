"""Run configuration: one self-describing .cfg file per experiment.

The file is INI-style with five sections (``motor``, ``source``, ``load``,
``fault``, ``sim``, ``dse``); every key has a documented default and unknown
sections or keys are hard errors, so typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

from .errors import ConfigError
from .estimation import DseConfig
from .motor import MotorParams
from .simulate import FaultKind, FaultSpec, LoadSpec, Scenario, SimSpec, SourceSpec

# Bundled 5 hp / 460 V / 60 Hz squirrel-cage machine.  Table-style catalog
# data; the friction coefficient is the usual value for this machine class.
DEFAULT_MOTOR = MotorParams(
    Rs=1.115,
    Lls=5.974e-3,
    Rr=1.083,
    Llr=5.974e-3,
    Lm=203.7e-3,
    pole_pairs=2,
    inertia=0.02,
    friction=5.752e-3,
    f_nom=60.0,
    V_ll=460.0,
)


@dataclass(frozen=True)
class DseSettings:
    """Estimator configuration plus pipeline-level analysis start.

    ``t_start`` delays the analyzed span past the direct-online start
    transient (motor-start supervision); windows before it are not scored.
    """

    config: DseConfig = field(default_factory=DseConfig)
    t_start: float = 1.0

    def __post_init__(self):
        if self.t_start < 0.0:
            raise ValueError("dse t_start must be non-negative")


@dataclass(frozen=True)
class RunConfig:
    motor: MotorParams = DEFAULT_MOTOR
    source: SourceSpec = field(default_factory=SourceSpec)
    load: LoadSpec = field(default_factory=LoadSpec)
    fault: FaultSpec = field(default_factory=FaultSpec)
    sim: SimSpec = field(default_factory=SimSpec)
    dse: DseSettings = field(default_factory=DseSettings)

    def scenario(self) -> Scenario:
        return Scenario(
            motor=self.motor, source=self.source, load=self.load,
            fault=self.fault, sim=self.sim,
        )


def _parse_phases(text: str):
    return tuple(ch for ch in text.strip().lower() if not ch.isspace())


def _parse_bool(text: str) -> bool:
    val = text.strip().lower()
    if val in ("true", "yes", "on", "1"):
        return True
    if val in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _fmt_phases(phases) -> str:
    return "".join(phases)


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def _fmt_plain(value) -> str:
    if isinstance(value, FaultKind):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


# section -> key -> (parse, format)
_SCHEMA = {
    "motor": {
        "Rs": (float, _fmt_plain),
        "Lls": (float, _fmt_plain),
        "Rr": (float, _fmt_plain),
        "Llr": (float, _fmt_plain),
        "Lm": (float, _fmt_plain),
        "pole_pairs": (int, _fmt_plain),
        "inertia": (float, _fmt_plain),
        "friction": (float, _fmt_plain),
        "f_nom": (float, _fmt_plain),
        "V_ll": (float, _fmt_plain),
    },
    "source": {
        "V_ll": (float, _fmt_plain),
        "f": (float, _fmt_plain),
        "theta0": (float, _fmt_plain),
        "R_src": (float, _fmt_plain),
    },
    "load": {
        "T_m": (float, _fmt_plain),
        "t_load": (float, _fmt_plain),
    },
    "fault": {
        "kind": (FaultKind, _fmt_plain),
        "phases": (_parse_phases, _fmt_phases),
        "R_f": (float, _fmt_plain),
        "R_g": (float, _fmt_plain),
        "t_on": (float, _fmt_plain),
        "t_off": (float, _fmt_plain),
    },
    "sim": {
        "dt": (float, _fmt_plain),
        "t_end": (float, _fmt_plain),
        "seed": (int, _fmt_plain),
        "sigma_v": (float, _fmt_plain),
        "sigma_i": (float, _fmt_plain),
        "f_sample": (float, _fmt_plain),
    },
    "dse": {
        "window": (int, _fmt_plain),
        "stride": (int, _fmt_plain),
        "tol_dj": (float, _fmt_plain),
        "max_iter": (int, _fmt_plain),
        "sigma_init": (float, _fmt_plain),
        "seed": (int, _fmt_plain),
        "sigma_voltage": (float, _fmt_plain),
        "sigma_current": (float, _fmt_plain),
        "sigma_flux": (float, _fmt_plain),
        "sigma_torque": (float, _fmt_plain),
        "sigma_speed": (float, _fmt_plain),
        "p_threshold": (float, _fmt_plain),
        "include_speed_residual": (_parse_bool, _fmt_bool),
        "t_start": (float, _fmt_plain),
    },
}


def _build(values: dict) -> RunConfig:
    try:
        motor = MotorParams(**values["motor"])
        source = SourceSpec(**values["source"])
        load = LoadSpec(**values["load"])
        fault = FaultSpec(**values["fault"])
        sim = SimSpec(**values["sim"])
        dse_vals = dict(values["dse"])
        t_start = dse_vals.pop("t_start")
        dse = DseSettings(config=DseConfig(**dse_vals), t_start=t_start)
        cfg = RunConfig(motor=motor, source=source, load=load,
                        fault=fault, sim=sim, dse=dse)
        cfg.scenario()  # cross-field checks
        return cfg
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _defaults() -> dict:
    base = RunConfig()
    return {
        "motor": {k: getattr(base.motor, k) for k in _SCHEMA["motor"]},
        "source": {k: getattr(base.source, k) for k in _SCHEMA["source"]},
        "load": {k: getattr(base.load, k) for k in _SCHEMA["load"]},
        "fault": {k: getattr(base.fault, k) for k in _SCHEMA["fault"]},
        "sim": {k: getattr(base.sim, k) for k in _SCHEMA["sim"]},
        "dse": {
            **{k: getattr(base.dse.config, k)
               for k in _SCHEMA["dse"] if k != "t_start"},
            "t_start": base.dse.t_start,
        },
    }


def parse_config_text(text: str, origin: str = "<config>") -> RunConfig:
    """Parse .cfg content into a validated RunConfig."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (Rs vs rs)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from exc

    values = _defaults()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"{origin}: unknown section [{section}]; expected one of "
                f"{', '.join(_SCHEMA)}"
            )
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"{origin}: unknown key {key!r} in section [{section}]"
                )
            parse, _ = _SCHEMA[section][key]
            try:
                values[section][key] = parse(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{origin}: bad value for {section}.{key}: {exc}"
                ) from exc
    return _build(values)


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, origin=str(path))


def dump_config(cfg: RunConfig) -> str:
    """Render a RunConfig as .cfg text that reparses to an equal config."""
    out = io.StringIO()
    sections = {
        "motor": cfg.motor,
        "source": cfg.source,
        "load": cfg.load,
        "fault": cfg.fault,
        "sim": cfg.sim,
    }
    for name, obj in sections.items():
        out.write(f"[{name}]\n")
        for key, (_, fmt) in _SCHEMA[name].items():
            out.write(f"{key} = {fmt(getattr(obj, key))}\n")
        out.write("\n")
    out.write("[dse]\n")
    for key, (_, fmt) in _SCHEMA["dse"].items():
        value = (cfg.dse.t_start if key == "t_start"
                 else getattr(cfg.dse.config, key))
        out.write(f"{key} = {fmt(value)}\n")
    return out.getvalue()
