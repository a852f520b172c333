"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from ionres.model import BathSpec, ChainSpec, DriveSpec, IntegratorSpec, SimulationSpec

OMEGA_DESK = 2e8


def desk_spec(x, gamma=0.0, **integ):
    """CI-speed 4-site chain: onsite/omega = 8, resonances at zeros of J_8."""
    return SimulationSpec(
        chain=ChainSpec(4, hopping=[5e7] * 3, onsite_base=8 * OMEGA_DESK,
                        dephasing=[gamma] * 4),
        drive=DriveSpec(amplitude=x * OMEGA_DESK, angular_frequency=OMEGA_DESK),
        baths=BathSpec(gamma_source=1e7, gamma_drain=1e7,
                       n_source=1.0, n_drain=0.0),
        integrator=IntegratorSpec(**integ) if integ else IntegratorSpec(),
    )


def closed_spec(n_sites, hopping, onsite=0.0, amplitude=0.0, omega=2e8,
                waveform="cosine", **integ):
    """Chain with all baths off (unitary dynamics up to dephasing)."""
    return SimulationSpec(
        chain=ChainSpec(n_sites, hopping=hopping, onsite_base=onsite),
        drive=DriveSpec(amplitude=amplitude, angular_frequency=omega,
                        waveform=waveform),
        baths=BathSpec(0.0, 0.0, 0.0, 0.0),
        integrator=IntegratorSpec(**integ) if integ else IntegratorSpec(),
    )


def random_density_matrix(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
