"""Scenario configuration: a small YAML document with four sections.

    scenario: continuum_decay        # required
    physical:                        # required, keys below default individually
      n_qubits: 512
      e_j: 1000.0
      ...
    integrator: {}                   # optional overrides
    scenario_args: {}                # optional, keys depend on the scenario
    output: {dir: out, format: csv}  # optional

Every rate is in rad/ns with hbar = 1. Unknown keys, wrong types and
out-of-range values raise :class:`ConfigError` naming the dotted key and
the line it sits on.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field

import yaml

from .device import PhysicalParams, band_width_for_top
from .errors import ConfigError, InvalidParameterError

SCENARIOS = ("spectrum", "continuum_decay", "two_mode", "rabi_sweep", "fig3_surface", "epr_report")
FORMATS = ("csv", "json")

# desk-scale defaults: eps0 = 200 sits mid-band
PHYSICAL_DEFAULTS = {
    "n_qubits": 512,
    "e_j": 1000.0,
    "e_c0": 10.0,
    "e_dc": 10.0,
    "omega_0": 100.0,
    "omega_top": 400.0,
    "drive_ev": 2.0,
    "capacitance_profile": None,
}

INTEGRATOR_KEYS = ("rel_tol", "abs_tol", "max_step", "t_end", "sample_dt", "max_wall_time")

# None means "derived from the physical parameters at run time"
SCENARIO_ARG_DEFAULTS = {
    "spectrum": {},
    "continuum_decay": {
        "gamma_t_max": 3.0,
        "gamma_t_min": 0.2,
        "n_samples": 300,
        "burst": 9,
        "spectrum_slices": 20,
        "tol_phi2": 0.05,
        "tol_balance": 0.05,
        "tol_rk": 0.10,
    },
    "two_mode": {
        "k_sel": None,
        "delta_tilde": None,
        "t_tilde_end": None,
        "samples_per_period": 8,
        "tol": 0.10,
    },
    "rabi_sweep": {
        "k_sel": None,
        "delta_tilde": None,
        "n_periods": 4,
        "samples_per_period": 8,
        "workers": 1,
        "tol": 0.05,
    },
    "fig3_surface": {
        "gamma_t_max": 5.0,
        "n_t": 51,
        "delta_over_gamma_max": 5.0,
        "n_delta": 41,
        "tol": 1e-9,
    },
    "epr_report": {
        "r_max": 1.0,
        "n_r": 10,
        "n_phase": 10,
        "n_max": 60,
        "tol": 1e-6,
    },
}

OUTPUT_DEFAULTS = {"dir": "out", "format": "csv"}


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot, such as 1e-9."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                  |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                  |\.[0-9_]+(?:[eE][-+][0-9]+)?
                  |[-+]?\.(?:inf|Inf|INF)
                  |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."),
)

_SECTIONS = ("scenario", "physical", "integrator", "scenario_args", "output")
_REQUIRED = ("scenario", "physical")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    physical: dict
    integrator: dict = field(default_factory=dict)
    scenario_args: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: dict(OUTPUT_DEFAULTS))

    def physical_params(self) -> PhysicalParams:
        p = self.physical
        profile = p["capacitance_profile"]
        return PhysicalParams(
            n_qubits=p["n_qubits"],
            e_j=p["e_j"],
            e_c0=p["e_c0"],
            e_dc=p["e_dc"],
            omega_0=p["omega_0"],
            band_width=band_width_for_top(p["omega_0"], p["omega_top"]),
            drive_ev=p["drive_ev"],
            capacitance_profile=None if profile is None else tuple(profile),
        )

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "physical": copy.deepcopy(self.physical),
            "integrator": copy.deepcopy(self.integrator),
            "scenario_args": copy.deepcopy(self.scenario_args),
            "output": copy.deepcopy(self.output),
        }


def default_config(scenario: str) -> ScenarioConfig:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}",
                          key="scenario")
    return ScenarioConfig(
        scenario=scenario,
        physical=dict(PHYSICAL_DEFAULTS),
        integrator={},
        scenario_args=dict(SCENARIO_ARG_DEFAULTS[scenario]),
        output=dict(OUTPUT_DEFAULTS),
    )


def dump_config(config: ScenarioConfig) -> str:
    """YAML text that :func:`parse_config` maps back to an equal config."""
    return yaml.safe_dump(config.as_dict(), sort_keys=False, default_flow_style=False)


def parse_config(text: str) -> ScenarioConfig:
    try:
        root = yaml.compose(text, Loader=_Loader)
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"syntax error: {getattr(exc, 'problem', exc)}", line=line) from None
    lines = {}
    if root is not None:
        _collect_lines(root, "", lines)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("the top level must be a mapping", line=1)

    def fail(message, key):
        return ConfigError(message, key=key, line=lines.get(key))

    for key in data:
        if key not in _SECTIONS:
            raise fail(f"unknown key {key!r}", str(key))
    for key in _REQUIRED:
        if key not in data:
            raise ConfigError(f"missing required section {key!r}", key=key)

    scenario = data["scenario"]
    if scenario not in SCENARIOS:
        raise fail(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}", "scenario")

    sections = {}
    for name in ("physical", "integrator", "scenario_args", "output"):
        value = data.get(name)
        if value is None:
            value = {}
        if not isinstance(value, dict):
            raise fail(f"section {name!r} must be a mapping", name)
        sections[name] = value

    physical = _check_keys(sections["physical"], PHYSICAL_DEFAULTS, "physical", fail)
    _validate_physical(physical, fail)
    integrator = _check_keys(sections["integrator"], dict.fromkeys(INTEGRATOR_KEYS), "integrator", fail)
    integrator = {k: v for k, v in integrator.items() if v is not None}
    for key, value in integrator.items():
        _positive(value, f"integrator.{key}", fail)
    args = _check_keys(sections["scenario_args"], SCENARIO_ARG_DEFAULTS[scenario], "scenario_args", fail)
    _validate_args(scenario, args, fail)
    output = _check_keys(sections["output"], OUTPUT_DEFAULTS, "output", fail)
    if not isinstance(output["dir"], str) or not output["dir"]:
        raise fail("output.dir must be a non-empty string", "output.dir")
    if output["format"] not in FORMATS:
        raise fail(f"output.format must be one of {', '.join(FORMATS)}", "output.format")

    config = ScenarioConfig(scenario, physical, integrator, args, output)
    try:
        config.physical_params()
    except InvalidParameterError as exc:
        raise ConfigError(str(exc), key="physical", line=lines.get("physical")) from None
    return config


def _collect_lines(node, prefix, lines):
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = f"{prefix}{key_node.value}"
            lines[key] = key_node.start_mark.line + 1
            _collect_lines(value_node, key + ".", lines)


def _check_keys(section, defaults, name, fail):
    for key in section:
        if key not in defaults:
            raise fail(f"unknown key '{name}.{key}'", f"{name}.{key}")
    merged = dict(defaults)
    merged.update(section)
    return merged


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _number(value, key, fail):
    if not _is_number(value) or not math.isfinite(value):
        raise fail(f"{key} must be a finite number, got {value!r}", key)
    return float(value)


def _positive(value, key, fail):
    if _number(value, key, fail) <= 0:
        raise fail(f"{key} must be > 0, got {value!r}", key)


def _non_negative(value, key, fail):
    if _number(value, key, fail) < 0:
        raise fail(f"{key} must be >= 0, got {value!r}", key)


def _count(value, key, fail, minimum=1):
    if not _is_int(value) or value < minimum:
        raise fail(f"{key} must be an integer >= {minimum}, got {value!r}", key)


def _validate_physical(p, fail):
    n = p["n_qubits"]
    if not _is_int(n) or n < 2 or n % 2:
        raise fail(f"physical.n_qubits must be an even integer >= 2, got {n!r}", "physical.n_qubits")
    for key in ("e_j", "e_c0", "omega_0", "omega_top"):
        _positive(p[key], f"physical.{key}", fail)
    for key in ("e_dc", "drive_ev"):
        _non_negative(p[key], f"physical.{key}", fail)
    if p["omega_top"] <= p["omega_0"]:
        raise fail("physical.omega_top must exceed physical.omega_0", "physical.omega_top")
    profile = p["capacitance_profile"]
    if profile is not None:
        if not isinstance(profile, list) or len(profile) != n:
            raise fail(f"physical.capacitance_profile must be a list of {n} numbers",
                       "physical.capacitance_profile")
        for value in profile:
            _positive(value, "physical.capacitance_profile", fail)


def _validate_args(scenario, a, fail):
    def key(name):
        return f"scenario_args.{name}"

    if scenario == "continuum_decay":
        for name in ("gamma_t_max", "tol_phi2", "tol_balance", "tol_rk"):
            _positive(a[name], key(name), fail)
        _non_negative(a["gamma_t_min"], key("gamma_t_min"), fail)
        if a["gamma_t_min"] >= a["gamma_t_max"]:
            raise fail("scenario_args.gamma_t_min must be below gamma_t_max", key("gamma_t_min"))
        _count(a["n_samples"], key("n_samples"), fail, 2)
        _count(a["burst"], key("burst"), fail, 1)
        _count(a["spectrum_slices"], key("spectrum_slices"), fail, 1)
    elif scenario == "two_mode":
        if a["k_sel"] is not None:
            _count(a["k_sel"], key("k_sel"), fail, 1)
        if a["delta_tilde"] is not None:
            _number(a["delta_tilde"], key("delta_tilde"), fail)
        if a["t_tilde_end"] is not None:
            _positive(a["t_tilde_end"], key("t_tilde_end"), fail)
        _count(a["samples_per_period"], key("samples_per_period"), fail, 2)
        _positive(a["tol"], key("tol"), fail)
    elif scenario == "rabi_sweep":
        if a["k_sel"] is not None:
            _count(a["k_sel"], key("k_sel"), fail, 1)
        grid = a["delta_tilde"]
        if grid is not None:
            if not isinstance(grid, list) or not grid:
                raise fail("scenario_args.delta_tilde must be a non-empty list", key("delta_tilde"))
            for value in grid:
                _number(value, key("delta_tilde"), fail)
        _positive(a["n_periods"], key("n_periods"), fail)
        _count(a["samples_per_period"], key("samples_per_period"), fail, 2)
        _count(a["workers"], key("workers"), fail, 1)
        _positive(a["tol"], key("tol"), fail)
    elif scenario == "fig3_surface":
        _positive(a["gamma_t_max"], key("gamma_t_max"), fail)
        _non_negative(a["delta_over_gamma_max"], key("delta_over_gamma_max"), fail)
        _count(a["n_t"], key("n_t"), fail, 2)
        _count(a["n_delta"], key("n_delta"), fail, 1)
        _positive(a["tol"], key("tol"), fail)
    elif scenario == "epr_report":
        _non_negative(a["r_max"], key("r_max"), fail)
        if a["r_max"] > 1.2:
            raise fail("scenario_args.r_max must be <= 1.2 for the Fock cross-check", key("r_max"))
        _count(a["n_r"], key("n_r"), fail, 1)
        _count(a["n_phase"], key("n_phase"), fail, 1)
        _count(a["n_max"], key("n_max"), fail, 40)
        _positive(a["tol"], key("tol"), fail)
