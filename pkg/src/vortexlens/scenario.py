"""Declarative scenario files: schema validation and runtime assembly.

A scenario is a JSON object (``"schema": 1``) naming a field profile, beam
kinematics, envelope initial conditions, a mode or superposition, a z-grid,
and a list of output artifacts.  Validation errors carry the dotted path of
the offending key; assembly errors (failed solves, out-of-domain grids) are
left to the solver exception types so the CLI can map them to exit code 2.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .constants import CODATA2018, BeamParams, landau_width, larmor_from_B
from .errors import ScenarioError
from .fields import (Free, Glaser, LinearRamp, Piecewise, SmoothRamp, Tabulated,
                     Uniform)
from .lensing import EnvelopeInit, solve_envelope
from .modes import ModeSpec, QuantumNumbers, Superposition

SCHEMA_VERSION = 1

DEFAULT_THRESHOLDS = {
    "invariant_drift": 1e-6,
    "angular_momentum_drift": 1e-6,
    "norm_drift": 1e-6,
}

_OUTPUT_KINDS = ("width", "observables", "wavefunction", "interference", "spectrum")


@dataclass(frozen=True)
class OutputSpec:
    kind: str
    path: str
    options: dict


@dataclass(frozen=True)
class Scenario:
    """Validated scenario configuration (still declarative, not yet solved)."""

    field_spec: dict
    beam_spec: dict
    init_spec: dict
    mode_spec: list          # list of {n, l, re_c, im_c}
    z_start: float
    z_stop: float
    z_count: int
    outputs: tuple           # OutputSpec
    time_domain: bool = False
    thresholds: dict = dataclass_field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))


def _expect(mapping, key, types, path, required=True, default=None):
    if key not in mapping:
        if required:
            raise ScenarioError(f"{path}.{key}" if path else key, "missing required key")
        return default
    value = mapping[key]
    if types is not None and not isinstance(value, types):
        type_names = types.__name__ if isinstance(types, type) else "/".join(t.__name__ for t in types)
        raise ScenarioError(f"{path}.{key}" if path else key,
                            f"expected {type_names}, got {type(value).__name__}")
    if types in ((int, float), float) and isinstance(value, bool):
        raise ScenarioError(f"{path}.{key}" if path else key, "expected a number, got a boolean")
    return value


def _number(mapping, key, path, required=True, default=None):
    value = _expect(mapping, key, (int, float), path, required, default)
    if value is None:
        return None
    if isinstance(value, bool):
        raise ScenarioError(f"{path}.{key}" if path else key, "expected a number, got a boolean")
    return float(value)


def parse_scenario(raw: dict) -> Scenario:
    """Validate a raw scenario dict; ScenarioError names the offending key."""
    if not isinstance(raw, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    schema = _expect(raw, "schema", int, "")
    if schema != SCHEMA_VERSION:
        raise ScenarioError("schema", f"unsupported schema version {schema!r} (expected {SCHEMA_VERSION})")

    field_spec = _expect(raw, "field", dict, "")
    _validate_field(field_spec, "field")

    beam_spec = _expect(raw, "beam", dict, "")
    if ("kinetic_energy_eV" in beam_spec) == ("speed_fraction_c" in beam_spec):
        raise ScenarioError("beam", "give exactly one of kinetic_energy_eV or speed_fraction_c")
    for key in beam_spec:
        if key not in ("kinetic_energy_eV", "speed_fraction_c"):
            raise ScenarioError(f"beam.{key}", "unknown key")
        _number(beam_spec, key, "beam")

    init_spec = _expect(raw, "init", dict, "")
    w0 = _expect(init_spec, "w0_m", (int, float, str), "init")
    if isinstance(w0, str) and w0 != "landau":
        raise ScenarioError("init.w0_m", f"expected a number or 'landau', got {w0!r}")
    r0 = _expect(init_spec, "R0_m", (int, float, str), "init")
    if isinstance(r0, str) and r0 not in ("inf", "+inf", "-inf"):
        raise ScenarioError("init.R0_m", f"expected a number or 'inf'/'+inf'/'-inf', got {r0!r}")
    if isinstance(r0, (int, float)) and r0 == 0:
        raise ScenarioError("init.R0_m", "R0 must be nonzero (use 'inf' for a flat front)")
    _number(init_spec, "z0_m", "init")
    for key in init_spec:
        if key not in ("w0_m", "R0_m", "z0_m"):
            raise ScenarioError(f"init.{key}", "unknown key")

    mode_raw = raw.get("mode")
    if isinstance(mode_raw, dict):
        mode_spec = [_validate_mode_entry({"re_c": 1.0, "im_c": 0.0} | dict(mode_raw), "mode")]
    elif isinstance(mode_raw, list) and mode_raw:
        mode_spec = [_validate_mode_entry(entry, f"mode[{i}]") for i, entry in enumerate(mode_raw)]
    else:
        raise ScenarioError("mode", "expected an object {n, l} or a non-empty list of components")

    grid = _expect(raw, "z_grid", dict, "")
    z_start = _number(grid, "start_m", "z_grid")
    z_stop = _number(grid, "stop_m", "z_grid")
    z_count = _expect(grid, "count", int, "z_grid")
    if not z_start < z_stop:
        raise ScenarioError("z_grid.start_m", f"start {z_start!r} must be below stop {z_stop!r}")
    if z_count < 2:
        raise ScenarioError("z_grid.count", f"need at least 2 grid points, got {z_count!r}")

    outputs_raw = _expect(raw, "outputs", list, "")
    outputs = []
    for i, entry in enumerate(outputs_raw):
        path_i = f"outputs[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(path_i, "expected an object")
        kind = _expect(entry, "kind", str, path_i)
        if kind not in _OUTPUT_KINDS:
            raise ScenarioError(f"{path_i}.kind", f"unknown kind {kind!r}; choose from {_OUTPUT_KINDS}")
        path_v = _expect(entry, "path", str, path_i)
        options = _expect(entry, "options", dict, path_i, required=False, default={})
        outputs.append(OutputSpec(kind=kind, path=path_v, options=options))

    time_domain = _expect(raw, "time_domain", bool, "", required=False, default=False)

    thresholds = dict(DEFAULT_THRESHOLDS)
    for key, value in _expect(raw, "thresholds", dict, "", required=False, default={}).items():
        if key not in DEFAULT_THRESHOLDS:
            raise ScenarioError(f"thresholds.{key}", "unknown threshold")
        thresholds[key] = _number({key: value}, key, "thresholds")

    known = {"schema", "field", "beam", "init", "mode", "z_grid", "outputs",
             "time_domain", "thresholds", "name"}
    for key in raw:
        if key not in known:
            raise ScenarioError(key, "unknown top-level key")

    return Scenario(field_spec=field_spec, beam_spec=beam_spec, init_spec=init_spec,
                    mode_spec=mode_spec, z_start=z_start, z_stop=z_stop, z_count=z_count,
                    outputs=tuple(outputs), time_domain=time_domain, thresholds=thresholds)


def _validate_mode_entry(entry, path) -> dict:
    if not isinstance(entry, dict):
        raise ScenarioError(path, "expected an object")
    n = _expect(entry, "n", int, path)
    l = _expect(entry, "l", int, path)
    if n < 0:
        raise ScenarioError(f"{path}.n", f"radial index must be >= 0, got {n!r}")
    re_c = _number(entry, "re_c", path, required=False, default=1.0)
    im_c = _number(entry, "im_c", path, required=False, default=0.0)
    for key in entry:
        if key not in ("n", "l", "re_c", "im_c"):
            raise ScenarioError(f"{path}.{key}", "unknown key")
    return {"n": n, "l": l, "re_c": re_c, "im_c": im_c}


def _validate_field(spec, path):
    if not isinstance(spec, dict):
        raise ScenarioError(path, "expected an object")
    kind = _expect(spec, "kind", str, path)
    known_by_kind = {
        "uniform": {"omega0_rad_per_s", "b_tesla"},
        "free": set(),
        "glaser": {"omega0_rad_per_s", "b_tesla", "a_m", "c_m"},
        "linear_ramp": {"z_i_m", "z_f_m", "omega_i_rad_per_s", "omega_f_rad_per_s",
                        "b_i_tesla", "b_f_tesla"},
        "smooth_ramp": {"z_i_m", "z_f_m", "omega_i_rad_per_s", "omega_f_rad_per_s",
                        "b_i_tesla", "b_f_tesla"},
        "piecewise": {"pieces"},
        "tabulated": {"csv_path", "z_m", "omega_rad_per_s"},
    }
    if kind not in known_by_kind:
        raise ScenarioError(f"{path}.kind", f"unknown kind {kind!r}")
    for key in spec:
        if key != "kind" and key not in known_by_kind[kind]:
            raise ScenarioError(f"{path}.{key}", f"unknown key for kind {kind!r}")
    if kind == "uniform":
        _one_of(spec, ("omega0_rad_per_s", "b_tesla"), path)
    elif kind == "glaser":
        _one_of(spec, ("omega0_rad_per_s", "b_tesla"), path)
        if _number(spec, "a_m", path) <= 0:
            raise ScenarioError(f"{path}.a_m", "half-width must be positive")
        _number(spec, "c_m", path)
    elif kind in ("linear_ramp", "smooth_ramp"):
        _one_of(spec, ("omega_i_rad_per_s", "b_i_tesla"), path)
        _one_of(spec, ("omega_f_rad_per_s", "b_f_tesla"), path)
        if not _number(spec, "z_i_m", path) < _number(spec, "z_f_m", path):
            raise ScenarioError(f"{path}.z_i_m", "ramp needs z_i_m < z_f_m")
    elif kind == "piecewise":
        pieces = _expect(spec, "pieces", list, path)
        if not pieces:
            raise ScenarioError(f"{path}.pieces", "needs at least one piece")
        for i, piece in enumerate(pieces):
            ppath = f"{path}.pieces[{i}]"
            if not isinstance(piece, dict):
                raise ScenarioError(ppath, "expected an object")
            if not _number(piece, "z_start_m", ppath) < _number(piece, "z_stop_m", ppath):
                raise ScenarioError(f"{ppath}.z_start_m", "piece needs z_start_m < z_stop_m")
            _validate_field(_expect(piece, "field", dict, ppath), f"{ppath}.field")
            for key in piece:
                if key not in ("z_start_m", "z_stop_m", "field"):
                    raise ScenarioError(f"{ppath}.{key}", "unknown key")
    elif kind == "tabulated":
        if ("csv_path" in spec) == ("z_m" in spec):
            raise ScenarioError(path, "tabulated needs either csv_path or inline z_m/omega_rad_per_s")
        if "z_m" in spec:
            z = _expect(spec, "z_m", list, path)
            om = _expect(spec, "omega_rad_per_s", list, path)
            if len(z) != len(om) or len(z) < 4:
                raise ScenarioError(f"{path}.z_m", "need >= 4 samples matching omega_rad_per_s in length")


def _one_of(spec, keys, path):
    present = [k for k in keys if k in spec]
    if len(present) != 1:
        raise ScenarioError(path, f"give exactly one of {'/'.join(keys)}")
    _number(spec, present[0], path)


def build_field(spec: dict, constants=CODATA2018):
    """Materialize a FieldProfile from a validated field spec."""
    kind = spec["kind"]

    def omega_of(prefix=""):
        om_key = f"omega{prefix}_rad_per_s"
        b_key = f"b{prefix}_tesla" if prefix else "b_tesla"
        if om_key in spec:
            return float(spec[om_key])
        return larmor_from_B(float(spec[b_key]), constants)

    if kind == "uniform":
        if "omega0_rad_per_s" in spec:
            return Uniform(float(spec["omega0_rad_per_s"]))
        return Uniform(larmor_from_B(float(spec["b_tesla"]), constants))
    if kind == "free":
        return Free()
    if kind == "glaser":
        om0 = (float(spec["omega0_rad_per_s"]) if "omega0_rad_per_s" in spec
               else larmor_from_B(float(spec["b_tesla"]), constants))
        return Glaser(om0, float(spec["a_m"]), float(spec["c_m"]))
    if kind in ("linear_ramp", "smooth_ramp"):
        cls = LinearRamp if kind == "linear_ramp" else SmoothRamp
        return cls(float(spec["z_i_m"]), float(spec["z_f_m"]),
                   omega_of("_i"), omega_of("_f"))
    if kind == "piecewise":
        return Piecewise(tuple(
            (float(p["z_start_m"]), float(p["z_stop_m"]), build_field(p["field"], constants))
            for p in spec["pieces"]))
    if kind == "tabulated":
        if "csv_path" in spec:
            return Tabulated.from_csv(spec["csv_path"])
        return Tabulated(np.asarray(spec["z_m"], dtype=float),
                         np.asarray(spec["omega_rad_per_s"], dtype=float))
    raise ScenarioError("field.kind", f"unknown kind {kind!r}")


@dataclass(frozen=True)
class RuntimeBundle:
    """Everything a run needs, assembled from a Scenario."""

    scenario: Scenario
    field: object
    beam: BeamParams
    init: EnvelopeInit
    envelope: object
    state: object          # ModeSpec or Superposition
    z_values: np.ndarray


def build_runtime(scenario: Scenario, constants=CODATA2018) -> RuntimeBundle:
    """Solve the scenario's envelope and build the mode state.

    Raises solver/domain exceptions (exit code 2 territory); anything
    wrong with the declarative content was already caught by
    parse_scenario.
    """
    field = build_field(scenario.field_spec, constants)
    if "speed_fraction_c" in scenario.beam_spec:
        beam = BeamParams.from_speed_fraction(scenario.beam_spec["speed_fraction_c"], constants)
    else:
        beam = BeamParams.from_kinetic_energy_ev(scenario.beam_spec["kinetic_energy_eV"], constants)

    z0 = float(scenario.init_spec["z0_m"])
    w0_raw = scenario.init_spec["w0_m"]
    if w0_raw == "landau":
        w0 = landau_width(field.omega(z0), constants)  # DomainError if the field vanishes there
    else:
        w0 = float(w0_raw)
    r0_raw = scenario.init_spec["R0_m"]
    if isinstance(r0_raw, str):
        r0 = -math.inf if r0_raw == "-inf" else math.inf
    else:
        r0 = float(r0_raw)
    init = EnvelopeInit(z0=z0, w0=w0, r0=r0)

    domain = (min(scenario.z_start, z0), max(scenario.z_stop, z0))
    envelope = solve_envelope(field, beam, init, domain)

    modes = [(complex(m["re_c"], m["im_c"]),
              ModeSpec(qn=QuantumNumbers(m["n"], m["l"]), envelope=envelope,
                       beam=beam, field=field))
             for m in scenario.mode_spec]
    if len(modes) == 1 and modes[0][0] == 1.0:
        state = modes[0][1]
    else:
        total = math.fsum(abs(c) ** 2 for c, _m in modes)
        if abs(total - 1.0) > 1e-12:
            warnings.warn(
                f"superposition coefficients had squared norm {total!r}; renormalizing",
                stacklevel=2)
        state = Superposition.normalized(modes)

    z_values = np.linspace(scenario.z_start, scenario.z_stop, scenario.z_count)
    return RuntimeBundle(scenario=scenario, field=field, beam=beam, init=init,
                         envelope=envelope, state=state, z_values=z_values)


def load_scenario_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError("", f"invalid JSON in {path}: {exc}") from exc


def apply_override(raw: dict, assignment: str) -> None:
    """Apply one ``dotted.path=value`` override in place (value parsed as
    JSON, falling back to a bare string)."""
    if "=" not in assignment:
        raise ScenarioError(assignment, "override must look like key.path=value")
    dotted, text = assignment.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    parts = dotted.split(".")
    target = raw
    for part in parts[:-1]:
        key = _index_or_key(part)
        if isinstance(target, list):
            target = target[key]
        else:
            target = target.setdefault(key, {})
        if not isinstance(target, (dict, list)):
            raise ScenarioError(dotted, f"cannot descend into non-object at {part!r}")
    last = _index_or_key(parts[-1])
    if isinstance(target, list):
        target[last] = value
    else:
        target[last] = value


def _index_or_key(part):
    return int(part) if part.lstrip("-").isdigit() else part
