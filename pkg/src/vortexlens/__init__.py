"""Paraxial electron vortex beams in z-dependent axial magnetic fields.

Beam envelopes from the nonlinear lensing equation, exact vortex-mode
wavefunctions and phases, gauge-invariant observable propagation, conserved
invariants, and Landau-mode splitting after non-adiabatic field changes.
"""

from .constants import (CODATA2018, BeamParams, PhysicalConstants, ScaledUnits,
                        landau_width, larmor_from_B)
from .errors import (BasisTooSmallError, DomainError, GridMismatchError,
                     OutOfDomainError, ScenarioError, SolverError, VortexLensError)
from .fields import (FieldProfile, Free, Glaser, LinearRamp, Piecewise, SmoothRamp,
                     Tabulated, Uniform, domega_dz, field_vector, omega_at,
                     omega_integral)
from .lensing import (EnvelopeInit, EnvelopeSolution, analytic_constant_width,
                      analytic_free_width, analytic_glaser_width, curvature_radius,
                      ermakov_pinney_residual, solve_envelope)
from .modes import (ModeSpec, PhaseParts, QuantumNumbers, Superposition,
                    assoc_laguerre, evaluate_mode, interference_term, norm_integral,
                    normalization, phase_theta)
from .observables import (EMAngularMomentum, ObservableState, ObservableTrajectory,
                          canonical_angular_momentum, em_angular_momentum,
                          ermakov_lewis, propagate_observables, quadrature_moments,
                          single_mode_observables)
from .splitting import (Fig1Result, ModeSpectrum, RampScenario, adiabatic_ramp_length,
                        decompose_into_landau, first_width_extremum_after,
                        make_ramp_scenario, run_fig1, run_ramp_scenario,
                        splitting_criterion, width_oscillation_metric)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
