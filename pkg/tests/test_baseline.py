"""Classical rate-equation control model."""

import numpy as np
import pytest

from ionres.baseline import classical_current, classical_rates, default_broadening
from ionres.model import BathSpec, ChainSpec, DriveSpec, IntegratorSpec, SimulationSpec


def _spec(n=2, hopping=5e7, onsite=0.0, amp=0.0, omega=2e8, gamma=0.0,
          gs=1e7, gd=1e7, **integ):
    return SimulationSpec(
        chain=ChainSpec(n, hopping=hopping, onsite_base=onsite, dephasing=gamma),
        drive=DriveSpec(amp, omega),
        baths=BathSpec(gs, gd, n_source=1.0, n_drain=0.0),
        integrator=IntegratorSpec(**integ) if integ else IntegratorSpec(),
    )


class TestRates:
    def test_lorentzian_value(self):
        chain = ChainSpec(2, hopping=3.0, onsite_base=4.0)
        drive = DriveSpec(0.0, 1.0)
        # W = 2 c^2 G2 / (G2^2 + Delta^2) with c=3, G2=2, Delta=4
        w = classical_rates(chain, drive, broadening=2.0, t=0.0)
        assert w[0] == pytest.approx(2 * 9 * 2 / (4 + 16), rel=1e-12)

    def test_rate_peaks_when_drive_cancels_detuning(self):
        chain = ChainSpec(2, hopping=1.0, onsite_base=5.0)
        drive = DriveSpec(5.0, 1.0)
        w_res = classical_rates(chain, drive, 0.1, t=np.pi)   # cos = -1: Delta = 0
        w_off = classical_rates(chain, drive, 0.1, t=0.0)     # cos = +1: Delta = 10
        assert w_res[0] > 100 * w_off[0]

    def test_broadening_must_be_positive(self):
        chain = ChainSpec(2, hopping=1.0, onsite_base=0.0)
        with pytest.raises(ValueError, match="broadening"):
            classical_rates(chain, DriveSpec(0.0, 1.0), 0.0, 0.0)

    def test_default_broadening(self):
        spec = _spec(gamma=2e6, gs=1e7, gd=3e7)
        assert default_broadening(spec) == pytest.approx(2e6 + 1e7 + 3e7)


class TestClassicalCurrent:
    def test_single_site_matches_quantum_closed_form(self):
        """The rate model and the quantum engine share the 2x2 fixed point."""
        gamma = 1e8
        spec = SimulationSpec(
            chain=ChainSpec(1, hopping=(), onsite_base=0.0),
            drive=DriveSpec(0.0, 2e8),
            baths=BathSpec(gamma, gamma, n_source=1.0, n_drain=0.0),
        )
        res = classical_current(spec, broadening=gamma)
        assert res.converged
        assert res.current == pytest.approx(gamma / 2, rel=1e-3)

    def test_two_site_current_positive_and_converged(self):
        res = classical_current(_spec(onsite=0.0))
        assert res.converged
        assert res.current > 0

    def test_detuned_chain_conducts_less(self):
        near = classical_current(_spec(onsite=0.0))
        far = classical_current(_spec(onsite=5e9))
        assert far.current < 0.05 * near.current

    def test_requires_drain(self):
        spec = _spec(gd=0.0)
        with pytest.raises(ValueError, match="gamma_drain"):
            classical_current(spec)

    def test_no_bessel_structure_in_small_sweep(self):
        """Driven rate model varies smoothly with amplitude: the ratio of
        adjacent currents on a coarse grid stays near one (no sharp dips)."""
        om = 2e8
        currents = []
        for x in np.linspace(11.5, 13.0, 7):  # brackets the first J_8 zero
            spec = _spec(n=3, hopping=5e7, onsite=8 * om, amp=x * om, omega=om)
            currents.append(classical_current(spec).current)
        currents = np.asarray(currents)
        ratios = currents[1:] / currents[:-1]
        assert np.all(ratios > 0.9) and np.all(ratios < 1.1)

    def test_population_bounds(self):
        """Rates keep populations in [0, 1]: current below the drain maximum."""
        res = classical_current(_spec())
        assert 0 < res.current < 2 * 1e7
