"""Declarative scenario files: parsing, validation, serialisation, drive construction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import jsonschema

from .errors import ParseError, ValidationError
from .excitation import DEFAULT_EPSILON_START, SignalSpec
from .load_model import DelaySpec, LineParams, LoadKind, LoadTopology
from .scattering import ZeroChoice, analytic_singularities, select_excitable_zero
from .timedomain import default_tail, recommended_dt

_FREQUENCY = {
    "type": "object",
    "oneOf": [
        {"required": ["rad_per_s"], "properties": {"rad_per_s": {"type": "number"}},
         "additionalProperties": False},
        {"required": ["hz"], "properties": {"hz": {"type": "number"}}, "additionalProperties": False},
    ],
}

SCHEMA = {
    "type": "object",
    "required": ["load", "line"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "load": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": [k.value for k in LoadKind]},
                "l_henry": {"type": "number", "exclusiveMinimum": 0},
                "c_farad": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "line": {
            "type": "object",
            "required": ["r0_ohm"],
            "additionalProperties": False,
            "properties": {"r0_ohm": {"type": "number", "exclusiveMinimum": 0}},
        },
        "zero_choice": {"enum": [c.value for c in ZeroChoice]},
        "excitation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epsilon_start": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "amplitude_v": {"type": "number", "exclusiveMinimum": 0},
                "phase_rad": {"type": "number"},
                "t_kickoff_s": {"type": "number"},
                "dt_s": {"type": "number", "exclusiveMinimum": 0},
                "t_end_s": {"type": "number"},
            },
        },
        "delay": {
            "type": "object",
            "required": ["length_m"],
            "additionalProperties": False,
            "properties": {
                "length_m": {"type": "number", "minimum": 0},
                "eps_eff": {"type": "number", "minimum": 1},
            },
        },
        "override_frequency": {
            "type": "object",
            "required": ["omega_r", "omega_i"],
            "additionalProperties": False,
            "properties": {"omega_r": _FREQUENCY, "omega_i": _FREQUENCY},
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

# carrier periods of steady state kept before kick-off for constant-envelope drives
STEADY_PERIODS = 10


@dataclass(frozen=True)
class Excitation:
    epsilon_start: float = DEFAULT_EPSILON_START
    amplitude: float = 1.0
    phase: float = 0.0
    t_kickoff: float | None = None
    dt: float | None = None
    t_end: float | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    load: LoadTopology
    line: LineParams
    zero_choice: ZeroChoice | None = ZeroChoice.AUTO
    excitation: Excitation = field(default_factory=Excitation)
    override: complex | None = None

    def __post_init__(self):
        if self.override is not None and self.zero_choice is not None:
            raise ValidationError("override_frequency and zero_choice are mutually exclusive",
                                  "override_frequency")

    @property
    def delay(self) -> DelaySpec | None:
        return self.line.delay


def _to_rad_per_s(freq: dict) -> float:
    if "hz" in freq:
        return 2.0 * math.pi * freq["hz"]
    return float(freq["rad_per_s"])


def _path(error: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in error.absolute_path)


def scenario_from_dict(data: dict) -> Scenario:
    error = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(data))
    if error is not None:
        raise ValidationError(error.message, _path(error))
    for key in ("t_kickoff_s", "t_end_s", "phase_rad"):
        value = data.get("excitation", {}).get(key)
        if value is not None and not math.isfinite(value):
            raise ValidationError("must be finite", f"excitation.{key}")

    ld = data["load"]
    load = LoadTopology(LoadKind(ld["kind"]), ld.get("l_henry"), ld.get("c_farad"))
    delay = None
    if "delay" in data:
        delay = DelaySpec(data["delay"]["length_m"], data["delay"].get("eps_eff", 1.0))
    line = LineParams(data["line"]["r0_ohm"], delay)

    ex = data.get("excitation", {})
    excitation = Excitation(
        epsilon_start=ex.get("epsilon_start", DEFAULT_EPSILON_START),
        amplitude=ex.get("amplitude_v", 1.0),
        phase=ex.get("phase_rad", 0.0),
        t_kickoff=ex.get("t_kickoff_s"),
        dt=ex.get("dt_s"),
        t_end=ex.get("t_end_s"),
    )
    override = None
    if "override_frequency" in data:
        if "zero_choice" in data:
            raise ValidationError("override_frequency and zero_choice are mutually exclusive",
                                  "override_frequency")
        of = data["override_frequency"]
        override = complex(_to_rad_per_s(of["omega_r"]), _to_rad_per_s(of["omega_i"]))
        choice = None
    else:
        choice = ZeroChoice(data.get("zero_choice", "auto"))
    return Scenario(data.get("name", "scenario"), load, line, choice, excitation, override)


def parse_scenario(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed scenario JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("scenario must be a JSON object")
    return scenario_from_dict(data)


def scenario_to_dict(sc: Scenario) -> dict:
    load = {"kind": sc.load.kind.value}
    if sc.load.inductance is not None:
        load["l_henry"] = sc.load.inductance
    if sc.load.capacitance is not None:
        load["c_farad"] = sc.load.capacitance
    out = {"name": sc.name, "load": load, "line": {"r0_ohm": sc.line.r0}}
    if sc.zero_choice is not None:
        out["zero_choice"] = sc.zero_choice.value
    ex = sc.excitation
    exd = {"epsilon_start": ex.epsilon_start, "amplitude_v": ex.amplitude, "phase_rad": ex.phase}
    for key, value in (("t_kickoff_s", ex.t_kickoff), ("dt_s", ex.dt), ("t_end_s", ex.t_end)):
        if value is not None:
            exd[key] = value
    out["excitation"] = exd
    if sc.delay is not None:
        out["delay"] = {"length_m": sc.delay.length, "eps_eff": sc.delay.eps_eff}
    if sc.override is not None:
        out["override_frequency"] = {"omega_r": {"rad_per_s": sc.override.real},
                                     "omega_i": {"rad_per_s": sc.override.imag}}
    return out


def serialize_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2)


def drive_frequency(sc: Scenario) -> complex:
    if sc.override is not None:
        return sc.override
    return select_excitable_zero(analytic_singularities(sc.load, sc.line), sc.zero_choice)


def build_signal_spec(sc: Scenario, dt: float | None = None) -> SignalSpec:
    """Turn a scenario into a concrete excitation.

    Growing drives start at t = 0 unless a kick-off time is given. Constant or
    decaying drives (overrides only) run for the settling time of the load's
    slowest natural mode plus ten carrier periods before kick-off. Records end after the default
    release tail unless ``t_end_s`` is set.
    """
    ex = sc.excitation
    w = drive_frequency(sc)
    step = dt or ex.dt or recommended_dt(sc.load, sc.line, w)
    tail = default_tail(sc.load, sc.line, step)
    sigma = -w.imag
    if sigma > 0:
        lead = math.log(1.0 / ex.epsilon_start) / sigma
        t0 = ex.t_kickoff if ex.t_kickoff is not None else lead
        t_end = ex.t_end if ex.t_end is not None else t0 + tail
        return SignalSpec(w, t0, t_end, ex.amplitude, ex.epsilon_start, ex.phase, step)
    lead = tail + (STEADY_PERIODS * 2.0 * math.pi / abs(w.real) if w.real else 0.0)
    t0 = ex.t_kickoff if ex.t_kickoff is not None else lead
    t_end = ex.t_end if ex.t_end is not None else t0 + tail
    return SignalSpec(w, t0, t_end, ex.amplitude, ex.epsilon_start, ex.phase, step,
                      pole_study=True, t_start=t0 - lead)
