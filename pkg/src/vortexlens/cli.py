"""Scenario-driven command line front end.

    vortexlens run scenario.json [--set key=value ...] [--out DIR]
    vortexlens run --preset fig1-abrupt [--out DIR]

Runs the requested computations and writes plot-ready CSV artifacts plus a
``summary.json`` with invariant diagnostics.  Exit codes: 0 success,
1 parse/validation error (the message names the offending key), 2 solver
or invariant failure.  Output is deterministic: the same scenario yields
byte-identical files.  Numbers are printed with shortest round-trip
precision so CSVs re-ingest exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from .errors import ScenarioError, VortexLensError
from .modes import ModeSpec, QuantumNumbers, Superposition, norm_integral
from .observables import (canonical_angular_momentum, ermakov_lewis,
                          propagate_observables, quadrature_moments,
                          single_mode_observables)
from .presets import PRESET_NAMES, get_preset
from .scenario import (RuntimeBundle, apply_override, build_runtime,
                       load_scenario_file, parse_scenario)
from .splitting import decompose_into_landau, first_width_extremum_after

PRESET_DIR_ENV = "VORTEXLENS_PRESET_DIR"


def _fmt(x) -> str:
    """Shortest round-trip decimal form (repr of a Python float); integers
    (the spectrum index columns) print as integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _write_atomic(path, "\n".join(lines) + "\n")


def _z_column(z_values, time_domain: bool, speed: float):
    if time_domain:
        return "t_s", z_values / speed
    return "z_m", z_values


def emit_width(envelope, z_values, path: str, *, time_domain: bool = False) -> None:
    """CSV columns z_m,w_m,dw_dz,R_m (R prints inf at width extrema)."""
    label, axis = _z_column(np.asarray(z_values, dtype=float), time_domain,
                            envelope.beam.axial_speed_v)
    w = envelope.width(z_values)
    wd = envelope.width_deriv(z_values)
    r = envelope.curvature_radius(z_values)
    _write_csv(path, (label, "w_m", "dw_dz", "R_m"), zip(axis, w, wd, r))


def emit_observables(trajectory, z_values, path: str, *, time_domain: bool = False) -> None:
    label, axis = _z_column(np.asarray(z_values, dtype=float), time_domain,
                            trajectory.beam.axial_speed_v)
    t, r2, lm, g = trajectory.sample(z_values)
    _write_csv(path, (label, "t_perp_J", "rho2_m2", "l_mech_Js", "g_perp_Js"),
               zip(axis, t, r2, lm, g))


def emit_wavefunction(state, z: float, path: str, *, half_span: float,
                      resolution: int, reference=None) -> None:
    """Cartesian grid of the complex amplitude.

    Columns x_m,y_m,re_chi,im_chi,abs2,phase_rad; the phase column is the
    gauge-independent arg(chi * conj(chi_ref)) when a reference mode is
    configured, otherwise the bare arg(chi).
    """
    axis = np.linspace(-half_span, half_span, resolution)
    x = axis[:, None]
    y = axis[None, :]
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)
    chi = state.evaluate(rho, phi, z)
    if reference is not None:
        phase = np.angle(chi * np.conj(reference.evaluate(rho, phi, z)))
    else:
        phase = np.angle(chi)
    rows = []
    for i in range(resolution):
        for j in range(resolution):
            rows.append((axis[i], axis[j], chi[i, j].real, chi[i, j].imag,
                         abs(chi[i, j]) ** 2, phase[i, j]))
    _write_csv(path, ("x_m", "y_m", "re_chi", "im_chi", "abs2", "phase_rad"), rows)


def emit_interference(state, reference, z: float, path: str, *, half_span: float,
                      resolution: int) -> None:
    """chi * conj(chi_ref) plus the rendered intensity |chi + chi_ref|^2."""
    axis = np.linspace(-half_span, half_span, resolution)
    x = axis[:, None]
    y = axis[None, :]
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)
    chi = state.evaluate(rho, phi, z)
    ref = reference.evaluate(rho, phi, z)
    term = chi * np.conj(ref)
    intensity = np.abs(chi + ref) ** 2
    rows = []
    for i in range(resolution):
        for j in range(resolution):
            rows.append((axis[i], axis[j], term[i, j].real, term[i, j].imag,
                         intensity[i, j], float(np.angle(term[i, j]))))
    _write_csv(path, ("x_m", "y_m", "re_interf", "im_interf", "intensity", "phase_rad"), rows)


def emit_spectrum(spectrum, path: str) -> None:
    rows = [(n, spectrum.l, c.real, c.imag, abs(c) ** 2)
            for n, c in enumerate(spectrum.coefficients)]
    _write_csv(path, ("n", "l", "re_c", "im_c", "abs_c_squared"), rows)


def _initial_observables(bundle: RuntimeBundle):
    z0 = float(bundle.z_values[0])
    if isinstance(bundle.state, ModeSpec):
        return single_mode_observables(bundle.state.qn, bundle.envelope,
                                       bundle.field, bundle.beam, z0)
    w_hint = bundle.envelope.width(z0)
    return quadrature_moments(lambda r, p: bundle.state.evaluate(r, p, z0),
                              w_hint, z0, bundle.field, bundle.beam)


def _reference_mode(bundle: RuntimeBundle, spec: dict):
    return ModeSpec(qn=QuantumNumbers(int(spec["n"]), int(spec["l"])),
                    envelope=bundle.envelope, beam=bundle.beam, field=bundle.field)


def _spectrum_for(bundle: RuntimeBundle, options: dict):
    from .constants import larmor_from_B

    if "omega_f_rad_per_s" in options:
        omega_f = float(options["omega_f_rad_per_s"])
    elif "b_f_tesla" in options:
        omega_f = larmor_from_B(float(options["b_f_tesla"]), bundle.beam.constants)
    else:
        omega_f = bundle.field.omega(float(bundle.z_values[-1]))
    n_max = int(options.get("n_max", 32))
    z_probe = options.get("z_probe_m", "auto")
    if z_probe == "auto":
        bps = [b for b in bundle.field.breakpoints() if b < bundle.z_values[-1]]
        search_from = max(bps) if bps else float(bundle.z_values[0])
        z_probe = first_width_extremum_after(bundle.envelope, search_from, omega_f)
    return decompose_into_landau(bundle.state, float(z_probe), omega_f,
                                 bundle.beam, n_max)


def _diagnostics(bundle: RuntimeBundle) -> dict:
    z_values = bundle.z_values
    trajectory = propagate_observables(bundle.field, bundle.beam,
                                       _initial_observables(bundle),
                                       (float(z_values[0]), float(z_values[-1])))
    inv = np.array([ermakov_lewis(trajectory.state_at(z), bundle.envelope,
                                  bundle.field, bundle.beam) for z in z_values])
    lz = np.array([canonical_angular_momentum(trajectory.state_at(z), bundle.field,
                                              bundle.beam) for z in z_values])
    hbar = bundle.beam.constants.hbar
    norm_samples = [norm_integral(bundle.state, z)
                    for z in np.linspace(z_values[0], z_values[-1], 5)]
    return {
        "trajectory": trajectory,
        "max_rel_invariant_drift": float((inv.max() - inv.min()) / abs(inv.mean())),
        "max_angular_momentum_drift_hbar": float((lz.max() - lz.min()) / hbar),
        "max_norm_drift": float(max(abs(n - 1.0) for n in norm_samples)),
    }


def run(scenario_source, *, preset: str = None, overrides=(), out_dir: str = ".",
        quiet: bool = False, stdout=None, stderr=None) -> int:
    """Execute one scenario; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    def say(msg):
        if not quiet:
            print(msg, file=stdout)

    try:
        if (scenario_source is None) == (preset is None):
            raise ScenarioError("", "give exactly one of a scenario path or --preset")
        if preset is not None:
            raw = _load_preset(preset)
        else:
            raw = load_scenario_file(scenario_source)
        for assignment in overrides:
            apply_override(raw, assignment)
        scenario = parse_scenario(raw)
    except ScenarioError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=stderr)
        return 1

    try:
        bundle = build_runtime(scenario)
        os.makedirs(out_dir, exist_ok=True)
        diag = _diagnostics(bundle)
        written = []
        for out in scenario.outputs:
            target = os.path.join(out_dir, out.path)
            if out.kind == "width":
                emit_width(bundle.envelope, bundle.z_values, target,
                           time_domain=scenario.time_domain)
            elif out.kind == "observables":
                emit_observables(diag["trajectory"], bundle.z_values, target,
                                 time_domain=scenario.time_domain)
            elif out.kind == "wavefunction":
                opts = out.options
                z = float(opts.get("z_m", bundle.z_values[-1]))
                half = opts.get("half_span_m", "auto")
                half = 6.0 * bundle.envelope.width(z) if half == "auto" else float(half)
                ref = opts.get("reference")
                emit_wavefunction(bundle.state, z, target,
                                  half_span=half, resolution=int(opts.get("resolution", 64)),
                                  reference=_reference_mode(bundle, ref) if ref else None)
            elif out.kind == "interference":
                opts = out.options
                if "reference" not in opts:
                    raise ScenarioError("outputs.interference.options.reference",
                                        "interference output needs a reference mode")
                z = float(opts.get("z_m", bundle.z_values[-1]))
                half = opts.get("half_span_m", "auto")
                half = 6.0 * bundle.envelope.width(z) if half == "auto" else float(half)
                emit_interference(bundle.state, _reference_mode(bundle, opts["reference"]),
                                  z, target, half_span=half,
                                  resolution=int(opts.get("resolution", 64)))
            elif out.kind == "spectrum":
                emit_spectrum(_spectrum_for(bundle, out.options), target)
            written.append(out.path)
            say(f"wrote {target}")
    except ScenarioError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except (VortexLensError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2

    checks = {
        "max_rel_invariant_drift": scenario.thresholds["invariant_drift"],
        "max_angular_momentum_drift_hbar": scenario.thresholds["angular_momentum_drift"],
        "max_norm_drift": scenario.thresholds["norm_drift"],
    }
    passed = all(diag[key] <= limit for key, limit in checks.items())
    summary = {
        "schema": 1,
        "invariants": {key: diag[key] for key in checks},
        "thresholds": dict(scenario.thresholds),
        "passed": passed,
        "outputs": written,
        "z_grid": {"start_m": scenario.z_start, "stop_m": scenario.z_stop,
                   "count": scenario.z_count},
        "time_domain": scenario.time_domain,
    }
    _write_atomic(os.path.join(out_dir, "summary.json"),
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    say(f"wrote {os.path.join(out_dir, 'summary.json')}")
    if not passed:
        print("error: invariant diagnostics exceeded thresholds "
              f"({summary['invariants']})", file=stderr)
        return 2
    return 0


def _load_preset(name: str) -> dict:
    user_dir = os.environ.get(PRESET_DIR_ENV)
    if user_dir:
        candidate = os.path.join(user_dir, f"{name}.json")
        if os.path.exists(candidate):
            return load_scenario_file(candidate)
    try:
        return get_preset(name)
    except KeyError:
        raise ScenarioError("preset", f"unknown preset {name!r}; built-ins: {', '.join(PRESET_NAMES)}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vortexlens",
        description="Paraxial electron vortex beams in z-dependent magnetic fields.")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a scenario file or preset")
    run_p.add_argument("scenario", nargs="?", default=None,
                       help="path to a scenario JSON file")
    run_p.add_argument("--preset", default=None,
                       help=f"built-in scenario ({', '.join(PRESET_NAMES)}); "
                            f"${PRESET_DIR_ENV} is searched first")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted-path override, value parsed as JSON")
    run_p.add_argument("--out", default=".", help="output directory (default: .)")
    run_p.add_argument("--quiet", action="store_true", help="suppress progress output")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.scenario, preset=args.preset, overrides=args.overrides,
                   out_dir=args.out, quiet=args.quiet)
    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    raise SystemExit(main())
