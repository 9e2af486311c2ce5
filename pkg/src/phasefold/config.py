"""Run configuration: dataclasses plus the flat key-value file format.

Config files are INI-style: a ``[run]`` section with the sweep controls and
one section named after the problem kind with its coefficient selections.
Unknown sections or keys are errors.  Numeric values may use ``pi`` (e.g.
``lower = -pi/2``).  Lists are comma separated.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace

from .registry import ConfigError

KINDS = ("scalar", "system", "hopping")
PHASE_CHOICES = ("exact", "upwind1", "spectral_rk4")
INIT_CHOICES = ("corrected", "uncorrected", "one_mode")


@dataclass
class ScalarSpec:
    c: str = "cos2"
    a: str = "three_halves_plus_cos2x"
    r: str = "rational_r"
    alpha: str = "scalar_smooth_complex"
    beta: str = ""  # empty means no initial phase


@dataclass
class SystemSpec:
    a1: str = "const:1"
    a2: str = "const:4"
    bigE: str = "E_3half_cos"
    f1: str = "system_smooth_complex"
    f2: str = "system_smooth_complex"
    c11: float = 0.0
    c12: float = 1.0
    c21: float = -1.0
    c22: float = 0.0
    dxs_sign: float = 1.0


@dataclass
class HoppingSpec:
    bigE: str = "E_avoided"
    bi: str = "sin_b_coupling"
    upot: str = ""  # empty means U = 0
    f_plus: str = "gaussian_maxwellian"
    f_minus: str = "gaussian_maxwellian"
    f_i: str = "gaussian_maxwellian_complex"
    n_x: int = 32
    n_p: int = 64
    dt: float = 0.05
    ref_n_x: int = 256
    ref_dt: float = 0.05
    tau_integrator: str = "implicit"


@dataclass
class RunConfig:
    kind: str = "scalar"
    preset: str = ""
    epsilons: list[float] = field(default_factory=lambda: [1.0, 1e-1, 1e-2, 1e-3])
    nts: list[int] = field(default_factory=lambda: [20, 40, 100, 200])
    n_tau: int = 64
    phase: str = "exact"
    init: str = "corrected"
    t_final: float = 0.1
    lower: float = -math.pi / 2
    length: float = math.pi
    dt_rule: float = 0.0  # dt = dt_rule * dx; 0 selects the kind's default
    ref_n: int = 0  # direct-reference points; 0 selects max(4000, 20/eps) capped at 2e4
    ref_dt: float = 0.0  # 0 selects dx_ref * dt_rule
    corr_cap: float = 10.0
    out: str = "results"
    scalar: ScalarSpec = field(default_factory=ScalarSpec)
    system: SystemSpec = field(default_factory=SystemSpec)
    hopping: HoppingSpec = field(default_factory=HoppingSpec)

    def validate(self) -> "RunConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.phase not in PHASE_CHOICES:
            raise ConfigError(f"phase must be one of {PHASE_CHOICES}, got {self.phase!r}")
        if self.init not in INIT_CHOICES:
            raise ConfigError(f"init must be one of {INIT_CHOICES}, got {self.init!r}")
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise ConfigError("epsilons must be a non-empty list of positive values")
        if not self.nts or any(n < 2 for n in self.nts):
            raise ConfigError("nts must be a non-empty list of integers >= 2")
        if self.t_final <= 0:
            raise ConfigError("t_final must be positive")
        if self.hopping.tau_integrator not in ("implicit", "exact"):
            raise ConfigError("tau_integrator must be 'implicit' or 'exact'")
        return self


_RUN_KEYS = {
    "kind": str,
    "preset": str,
    "epsilons": "float_list",
    "nts": "int_list",
    "n_tau": int,
    "phase": str,
    "init": str,
    "t_final": "float_expr",
    "lower": "float_expr",
    "length": "float_expr",
    "dt_rule": "float_expr",
    "ref_n": int,
    "ref_dt": "float_expr",
    "corr_cap": "float_expr",
    "out": str,
}


def parse_number(text: str) -> float:
    """Float literal that may mention pi (e.g. '-pi/2', '2*pi/3')."""
    allowed = set("0123456789.+-*/() epi")
    if not text or not set(text) <= allowed:
        raise ConfigError(f"bad numeric value {text!r}")
    try:
        return float(eval(text, {"__builtins__": {}}, {"pi": math.pi, "e": math.e}))
    except Exception as exc:
        raise ConfigError(f"bad numeric value {text!r}") from exc


def _convert(value: str, kind) -> object:
    value = value.strip()
    if kind is str:
        return value
    if kind is int:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"expected integer, got {value!r}") from exc
    if kind is float or kind == "float_expr":
        return parse_number(value)
    if kind == "float_list":
        return [parse_number(v) for v in value.split(",") if v.strip()]
    if kind == "int_list":
        return [int(v) for v in value.split(",") if v.strip()]
    raise AssertionError(kind)


def _apply_section(obj, section: str, items, allowed: dict) -> None:
    for key, value in items:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        setattr(obj, key, _convert(value, allowed[key]))


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    """Parse a config file on top of ``base`` (or library defaults).

    A ``preset`` key in [run] pulls that preset in as the new base before the
    file's remaining keys are applied.
    """
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    cfg = replace(base) if base is not None else RunConfig()
    if parser.has_section("run") and parser.has_option("run", "preset"):
        from .presets import get_preset  # local import to avoid a cycle

        name = parser.get("run", "preset").strip()
        if name:
            cfg = get_preset(name)
            cfg.preset = name
    spec_keys = {
        "scalar": {f.name: type(getattr(ScalarSpec(), f.name)) for f in fields(ScalarSpec)},
        "system": {f.name: type(getattr(SystemSpec(), f.name)) for f in fields(SystemSpec)},
        "hopping": {f.name: type(getattr(HoppingSpec(), f.name)) for f in fields(HoppingSpec)},
    }
    for section in parser.sections():
        if section == "run":
            items = [(k, v) for k, v in parser.items("run") if k != "preset"]
            _apply_section(cfg, "run", items, _RUN_KEYS)
        elif section in spec_keys:
            _apply_section(getattr(cfg, section), section, parser.items(section), spec_keys[section])
        else:
            raise ConfigError(f"unknown config section [{section}]")
    return cfg.validate()
