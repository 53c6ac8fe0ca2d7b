"""Built-in scenario presets (the exact configurations used in the docs).

Each preset is generated as a fresh dict so callers can apply overrides
without mutating shared state.  Derived numbers (stationary widths, the
baseline adiabatic ramp length) are computed from the same library
routines the solver uses, so preset output is reproducible bit for bit.
"""

from __future__ import annotations

import math

from .constants import CODATA2018, BeamParams, landau_width, larmor_from_B
from .splitting import adiabatic_ramp_length

_SPEED_FRACTION = 0.02
_B_INITIAL = 0.1
_B_FINAL = 0.2
_Z_TRANSITION = 1e-4
_POST_PERIODS = 6.0


def _fig1_common(constants=CODATA2018):
    beam = BeamParams.from_speed_fraction(_SPEED_FRACTION, constants)
    omega_i = larmor_from_B(_B_INITIAL, constants)
    omega_f = larmor_from_B(_B_FINAL, constants)
    period_f = math.pi * beam.axial_speed_v / abs(omega_f)
    return beam, omega_i, omega_f, period_f


def _fig1_abrupt(constants=CODATA2018):
    _beam, _om_i, _om_f, period_f = _fig1_common(constants)
    z_end = _Z_TRANSITION + _POST_PERIODS * period_f
    return {
        "schema": 1,
        "name": "fig1-abrupt",
        "field": {"kind": "piecewise", "pieces": [
            {"z_start_m": 0.0, "z_stop_m": _Z_TRANSITION,
             "field": {"kind": "uniform", "b_tesla": _B_INITIAL}},
            {"z_start_m": _Z_TRANSITION, "z_stop_m": z_end,
             "field": {"kind": "uniform", "b_tesla": _B_FINAL}},
        ]},
        "beam": {"speed_fraction_c": _SPEED_FRACTION},
        "init": {"w0_m": "landau", "R0_m": "inf", "z0_m": 0.0},
        "mode": {"n": 0, "l": 0},
        "z_grid": {"start_m": 0.0, "stop_m": z_end, "count": 1201},
        "outputs": [
            {"kind": "width", "path": "width.csv"},
            {"kind": "observables", "path": "observables.csv"},
            {"kind": "spectrum", "path": "spectrum.csv",
             "options": {"b_f_tesla": _B_FINAL, "n_max": 32}},
        ],
    }


def _fig1_gradual(constants=CODATA2018):
    beam, omega_i, omega_f, period_f = _fig1_common(constants)
    ramp_length = adiabatic_ramp_length(omega_i, omega_f, beam.axial_speed_v)
    z_f = _Z_TRANSITION + ramp_length
    z_end = z_f + _POST_PERIODS * period_f
    return {
        "schema": 1,
        "name": "fig1-gradual",
        "field": {"kind": "smooth_ramp", "z_i_m": _Z_TRANSITION, "z_f_m": z_f,
                  "b_i_tesla": _B_INITIAL, "b_f_tesla": _B_FINAL},
        "beam": {"speed_fraction_c": _SPEED_FRACTION},
        "init": {"w0_m": "landau", "R0_m": "inf", "z0_m": 0.0},
        "mode": {"n": 0, "l": 0},
        "z_grid": {"start_m": 0.0, "stop_m": z_end, "count": 1201},
        "outputs": [
            {"kind": "width", "path": "width.csv"},
            {"kind": "observables", "path": "observables.csv"},
            {"kind": "spectrum", "path": "spectrum.csv",
             "options": {"b_f_tesla": _B_FINAL, "n_max": 32}},
        ],
    }


def _glaser_focus(constants=CODATA2018):
    beam = BeamParams.from_speed_fraction(_SPEED_FRACTION, constants)
    omega0 = larmor_from_B(_B_INITIAL, constants)
    a = 1e-3
    beta = math.sqrt(1.0 + (a * omega0 / beam.axial_speed_v) ** 2)
    w_center = math.sqrt(2.0 * a / (beta * beam.wavenumber_k))  # oscillation-free waist
    return {
        "schema": 1,
        "name": "glaser-focus",
        "field": {"kind": "glaser", "b_tesla": _B_INITIAL, "a_m": a, "c_m": 0.0},
        "beam": {"speed_fraction_c": _SPEED_FRACTION},
        "init": {"w0_m": w_center, "R0_m": "inf", "z0_m": 0.0},
        "mode": {"n": 0, "l": 1},
        "z_grid": {"start_m": -5 * a, "stop_m": 5 * a, "count": 1001},
        "outputs": [
            {"kind": "width", "path": "width.csv"},
            {"kind": "observables", "path": "observables.csv"},
        ],
    }


def _free_gouy(constants=CODATA2018):
    beam = BeamParams.from_speed_fraction(_SPEED_FRACTION, constants)
    w0 = 1.6e-7
    z_r = beam.rayleigh_length(w0)
    return {
        "schema": 1,
        "name": "free-gouy",
        "field": {"kind": "free"},
        "beam": {"speed_fraction_c": _SPEED_FRACTION},
        "init": {"w0_m": w0, "R0_m": "inf", "z0_m": 0.0},
        "mode": {"n": 0, "l": 0},
        "z_grid": {"start_m": -3 * z_r, "stop_m": 3 * z_r, "count": 601},
        "outputs": [
            {"kind": "width", "path": "width.csv"},
            {"kind": "observables", "path": "observables.csv"},
        ],
    }


def _landau(constants=CODATA2018):
    beam = BeamParams.from_speed_fraction(_SPEED_FRACTION, constants)
    omega = larmor_from_B(_B_INITIAL, constants)
    period = math.pi * beam.axial_speed_v / abs(omega)
    return {
        "schema": 1,
        "name": "landau",
        "field": {"kind": "uniform", "b_tesla": _B_INITIAL},
        "beam": {"speed_fraction_c": _SPEED_FRACTION},
        "init": {"w0_m": "landau", "R0_m": "inf", "z0_m": 0.0},
        "mode": {"n": 0, "l": 1},
        "z_grid": {"start_m": 0.0, "stop_m": 3 * period, "count": 601},
        "outputs": [
            {"kind": "width", "path": "width.csv"},
            {"kind": "observables", "path": "observables.csv"},
        ],
    }


_BUILDERS = {
    "fig1-abrupt": _fig1_abrupt,
    "fig1-gradual": _fig1_gradual,
    "glaser-focus": _glaser_focus,
    "free-gouy": _free_gouy,
    "landau": _landau,
}

PRESET_NAMES = tuple(sorted(_BUILDERS))


def get_preset(name: str, constants=CODATA2018) -> dict:
    """A fresh scenario dict for a built-in preset name."""
    if name not in _BUILDERS:
        raise KeyError(name)
    return _BUILDERS[name](constants)
