import math

import pytest
from hypothesis import HealthCheck, settings

from vortexlens import (BeamParams, EnvelopeInit, Uniform, landau_width,
                        larmor_from_B, solve_envelope)

settings.register_profile(
    "suite", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def beam():
    """The Fig.-1 beam: 0.02 c along z."""
    return BeamParams.from_speed_fraction(0.02)


@pytest.fixture(scope="session")
def omega_01(beam):
    return larmor_from_B(0.1, beam.constants)


@pytest.fixture(scope="session")
def omega_02(beam):
    return larmor_from_B(0.2, beam.constants)


@pytest.fixture(scope="session")
def landau_w01(beam, omega_01):
    return landau_width(omega_01, beam.constants)


@pytest.fixture(scope="session")
def oscillating_envelope(beam, omega_01, landau_w01):
    """Constant field, generic (non-Landau) initial conditions."""
    period = math.pi * beam.axial_speed_v / omega_01
    profile = Uniform(omega_01)
    init = EnvelopeInit(z0=0.0, w0=1.3 * landau_w01, r0=2.5e-3)
    return solve_envelope(profile, beam, init, (0.0, 10 * period))


@pytest.fixture(scope="session")
def landau_envelope(beam, omega_01, landau_w01):
    period = math.pi * beam.axial_speed_v / omega_01
    profile = Uniform(omega_01)
    init = EnvelopeInit(z0=0.0, w0=landau_w01, r0=math.inf)
    return solve_envelope(profile, beam, init, (0.0, 45 * period))
