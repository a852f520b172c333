"""Acceptance gate: every headline claim of the package, one PASS/FAIL line each.

The desk-scale configuration (4 sites, onsite/omega = 8, resonances at the
first two zeros of J_8) keeps the full suite within a ~10-minute single-CPU
budget.  The paper-scale resonance check on J_128 takes hours and only runs
when IONRES_PAPER_SCALE is set.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the report lines.
"""

import os
import sys

import numpy as np
import pytest

from conftest import closed_spec, desk_spec, random_hermitian
from ionres.baseline import classical_current
from ionres.bessel import bessel_first_zeros
from ionres.generators import assemble_generator, effective_hamiltonian
from ionres.model import (
    BathSpec,
    ChainSpec,
    DriveSpec,
    IntegratorSpec,
    SimulationSpec,
    check_density_matrix,
)
from ionres.observables import locate_resonances
from ionres.propagator import constant_plan, propagate, steady_current, _Runner
from ionres.sweep import SweepPlan, run_sweep

OMEGA = 2e8
GAMMA_LIST = (0.0, 5e5, 1e6, 2e6)
AMP_MIN, AMP_MAX, AMP_POINTS = 9.5, 18.5, 21

ARTIFACT_DIR = os.path.join(os.path.dirname(__file__), "..", "artifacts")


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", file=sys.stderr)


@pytest.fixture(scope="session")
def desk_sweep():
    """Quantum amplitude sweep over all four dephasing values (the slow part)."""
    os.makedirs(ARTIFACT_DIR, exist_ok=True)
    plan = SweepPlan(
        base=desk_spec(AMP_MIN),
        amp_min=AMP_MIN, amp_max=AMP_MAX, amp_points=AMP_POINTS,
        gamma_list=GAMMA_LIST,
        output=os.path.join(ARTIFACT_DIR, "desk_sweep.csv"),
    )
    return run_sweep(plan)


@pytest.fixture(scope="session")
def classical_sweep():
    plan = SweepPlan(
        base=desk_spec(AMP_MIN),
        amp_min=AMP_MIN, amp_max=AMP_MAX, amp_points=AMP_POINTS,
        gamma_list=(0.0,), models="classical",
        output=os.path.join(ARTIFACT_DIR, "desk_sweep_classical.csv"),
    )
    return run_sweep(plan)


class TestResonancePositions:
    def test_desk_scale_minima_at_j8_zeros(self, desk_sweep):
        """gamma=0 conduction minima within 2% of the first two J_8 zeros."""
        zeros = bessel_first_zeros(8, 2)
        report = desk_sweep.reports[0]  # gamma = 0
        assert desk_sweep.all_converged
        ok = True
        details = []
        for res, z in zip(report.resonances, zeros):
            err = abs(res.located - z) / z
            details.append(f"zero {z:.4f}: located {res.located:.4f} "
                           f"(err {100 * err:.2f}%), depth {res.depth:.4f}")
            ok = ok and err <= 0.02 and res.depth > 0.5
        _report("resonance positions (desk)", ok, "; ".join(details))
        assert ok


@pytest.mark.skipif(not os.environ.get("IONRES_PAPER_SCALE"),
                    reason="hours-long; set IONRES_PAPER_SCALE=1 to run")
class TestResonancePositionsPaperScale:
    def test_first_j128_zero_high_contrast(self):
        """Full-scale parameters: minimum within 2% of the first J_128 zero,
        suppressed >= 10x vs the shoulders."""
        z1 = bessel_first_zeros(128, 1)[0]
        base = SimulationSpec(
            chain=ChainSpec(5, hopping=8e8, onsite_base=128 * OMEGA),
            drive=DriveSpec(z1 * OMEGA, OMEGA),
            baths=BathSpec(1e8, 1e8, n_source=1.0, n_drain=0.0),
        )
        plan = SweepPlan(base=base, amp_min=z1 - 3.0, amp_max=z1 + 3.0,
                         amp_points=13, gamma_list=(0.0,))
        result = run_sweep(plan)
        res = result.reports[0].resonances[0]
        err = abs(res.located - z1) / z1
        contrast = res.shoulder / max(res.minimum, 1e-300)
        ok = err <= 0.02 and contrast >= 10.0
        _report("resonance position (paper scale)", ok,
                f"located {res.located:.3f} vs {z1:.3f} (err {100 * err:.2f}%), "
                f"contrast {contrast:.1f}x")
        assert ok


class TestDephasingOrdering:
    def test_depth_strictly_decreasing_in_gamma(self, desk_sweep):
        """More dephasing -> shallower resonances, at every predicted zero."""
        ok = True
        details = []
        n_zeros = len(desk_sweep.predicted_zeros)
        for i in range(n_zeros):
            depths = [r.resonances[i].depth for r in desk_sweep.reports]
            mono = all(b < a for a, b in zip(depths, depths[1:]))
            ok = ok and mono
            details.append(
                f"zero {i + 1} depths " +
                "/".join(f"{d:.4f}" for d in depths) +
                (" strictly decreasing" if mono else " NOT monotone"))
        _report("dephasing ordering", ok, "; ".join(details))
        assert ok


class TestCoherenceCurrentRelation:
    def test_linear_fit_r_squared(self, desk_sweep):
        """Incoherence vs current across gamma at the first resonance: R^2 > 0.9."""
        fit = desk_sweep.fit
        ok = fit is not None and fit.r_squared > 0.9
        _report("coherence-current fit", ok,
                f"R^2 = {fit.r_squared:.4f}, slope = {fit.slope:.3e}"
                if fit else "fit missing")
        assert ok


class TestClassicalControl:
    def test_rate_model_shows_no_resonances(self, desk_sweep, classical_sweep):
        """Classical depth at each predicted zero < 10% of the quantum depth."""
        zeros = desk_sweep.predicted_zeros
        curve = [(r.omega1_over_omega, r.current) for r in classical_sweep.rows]
        classical = locate_resonances(curve, zeros)
        quantum = desk_sweep.reports[0]
        ok = True
        details = []
        for cr, qr in zip(classical.resonances, quantum.resonances):
            ok = ok and cr.depth < 0.1 * qr.depth
            details.append(f"classical {cr.depth:.4f} vs quantum {qr.depth:.4f}")
        _report("classical control", ok, "; ".join(details))
        assert ok


class TestAnalyticOracle:
    def test_single_site_current_both_engines(self):
        """Gamma/2 closed form to 0.1% for the quantum and classical engines."""
        gamma = 1e8
        spec = SimulationSpec(
            chain=ChainSpec(1, hopping=(), onsite_base=0.0),
            drive=DriveSpec(0.0, OMEGA),
            baths=BathSpec(gamma, gamma, n_source=1.0, n_drain=0.0),
        )
        q = steady_current(spec)
        c = classical_current(spec, broadening=gamma)
        err_q = abs(q.current - gamma / 2) / (gamma / 2)
        err_c = abs(c.current - gamma / 2) / (gamma / 2)
        ok = q.converged and c.converged and err_q <= 1e-3 and err_c <= 1e-3
        _report("single-site analytic oracle", ok,
                f"quantum {q.current:.6g} (err {err_q:.2e}), "
                f"classical {c.current:.6g} (err {err_c:.2e}), target {gamma / 2:.6g}")
        assert ok


class TestFrameEquivalence:
    def test_lab_vs_rotating_current(self):
        """Same current to 3 significant figures in both frames."""
        spec = desk_spec(13.5, gamma=5e5)
        lab = steady_current(spec, frame="lab")
        rot = steady_current(spec, frame="rotating")
        rel = abs(lab.current - rot.current) / abs(lab.current)
        ok = lab.converged and rot.converged and rel < 5e-4
        _report("frame equivalence", ok,
                f"lab {lab.current:.6g} vs rotating {rot.current:.6g} "
                f"(rel diff {rel:.2e})")
        assert ok


class TestEffectiveHamiltonian:
    def test_one_period_infidelity(self):
        """Weak hopping (c = omega/20): full driven evolution over one period
        matches the Bessel-rescaled static model to infidelity < 1e-3."""
        c = OMEGA / 20.0
        spec = closed_spec(4, hopping=[c] * 3, onsite=8 * OMEGA,
                           amplitude=12.0 * OMEGA, omega=OMEGA,
                           rel_tol=1e-10, abs_tol=1e-12)
        dim = 16
        rho0 = np.zeros((dim, dim), dtype=complex)
        rho0[0b1000, 0b1000] = 1.0
        period = spec.drive.period

        rho_full = rho0.copy()
        _Runner(spec, assemble_generator(spec).plan).run(rho_full, 0.0, period)

        h_eff = effective_hamiltonian(spec.chain, spec.drive)
        rho_eff = rho0.copy()
        _Runner(spec, constant_plan(h_eff, OMEGA)).run(rho_eff, 0.0, period)

        infidelity = 1.0 - float(np.real(np.trace(rho_full @ rho_eff)))
        ok = infidelity < 1e-3
        _report("effective Hamiltonian", ok, f"one-period infidelity {infidelity:.2e}")
        assert ok


class TestSquareWaveFreezing:
    def test_population_revivals(self):
        """omega = c, baths off: the excitation is frozen on site 1 at every
        half-period (population back to 1 within 1e-6)."""
        c = 1e8
        spec = closed_spec(4, hopping=[c] * 3, omega=c,
                           waveform="square_coupling",
                           rel_tol=1e-10, abs_tol=1e-12)
        rho0 = np.zeros((16, 16), dtype=complex)
        rho0[0b1000, 0b1000] = 1.0
        half = np.pi / c
        traj = propagate(spec, initial=rho0, horizon=6 * half, sampling=half)
        dev = float(np.max(np.abs(traj.populations[:, 0] - 1.0)))
        ok = dev <= 1e-6
        _report("square-wave freezing", ok, f"max |pop_1 - 1| = {dev:.2e}")
        assert ok


class TestConservationSuite:
    def test_trajectory_invariants(self):
        """Sampled states on a driven dissipative run stay trace-1 and positive."""
        spec = desk_spec(12.3, gamma=1e6)
        traj = propagate(spec, horizon=5 * spec.drive.period)
        check_density_matrix(traj.final_state, herm_tol=1e-9)
        tr = float(np.trace(traj.final_state).real)
        lam = float(np.linalg.eigvalsh(traj.final_state)[0])
        ok = abs(tr - 1.0) < 1e-9 and lam >= -1e-9
        _report("conservation: trajectory", ok,
                f"|trace-1| = {abs(tr - 1):.2e}, min eig = {lam:.2e}")
        assert ok

    def test_generator_trace_annihilation(self, rng):
        """100 random Hermitian matrices: |Tr L(rho)| < 1e-10 relative to
        ||L(rho)|| (rates of 1e7-1e9 1/s put the absolute float64
        cancellation noise at ~1e-8; the scale-free measure is the invariant)."""
        spec = desk_spec(12.3, gamma=1e6)
        parts = assemble_generator(spec)
        worst = 0.0
        for _ in range(100):
            rho = random_hermitian(rng, 16)
            out = parts.apply(rho, t=rng.uniform(0, 1e-7))
            worst = max(worst, abs(np.trace(out)) / np.linalg.norm(out))
        ok = worst < 1e-10
        _report("conservation: generator", ok,
                f"max |Tr L(rho)| / ||L(rho)|| = {worst:.2e}")
        assert ok


class TestEstimates:
    def test_order_of_magnitude_report(self):
        from ionres import estimates

        checks = []

        lam = estimates.de_broglie(estimates.POTASSIUM_MASS, 2e-21)
        checks.append(("de Broglie", abs(lam - 0.05e-9) <= 0.2 * 0.05e-9,
                       f"{lam * 1e9:.4f} nm vs 0.05 nm +-20%"))

        kbt = estimates.K_BOLTZMANN * estimates.ROOM_T
        p, rate = estimates.tunneling_probability(
            estimates.POTASSIUM_MASS, 1.5 * kbt, 0.24e-9, attempt_frequency=1e12)
        checks.append(("tunneling probability", 7e-5 / 3 <= p <= 7e-5 * 3,
                       f"{p:.2e} vs 7e-5 within 3x"))
        checks.append(("tunneling rate", 1e7 <= rate <= 1e9,
                       f"{rate:.2e} 1/s vs 1e8 within 10x"))

        doublets = estimates.double_well_splittings(
            estimates.default_double_well(), levels=8)
        nearest = sorted(doublets, key=lambda es: abs(es[0] - kbt))[:2]
        ok_split = all(1e5 < s < 1e10 for _, s in nearest)
        checks.append(("double-well splittings", ok_split,
                       "near-thermal rates " +
                       ", ".join(f"{s:.2e}" for _, s in nearest) + " in [1e5, 1e10]"))

        patch = estimates.patch_clamp_feasibility()
        cm = patch["membrane_capacitance_F"]
        rp = patch["max_pipette_resistance_ohm"]
        ic = patch["capacitive_current_A"]
        checks.append(("patch clamp",
                       abs(cm - 8e-15) <= 0.1 * 8e-15
                       and abs(rp - 6e5) <= 0.1 * 6e5
                       and abs(ic - 3e-6) <= 0.1 * 3e-6,
                       f"C_m {cm:.2e} F, R_p {rp:.2e} ohm, I_c {ic:.2e} A"))

        ok = all(c[1] for c in checks)
        for name, good, detail in checks:
            _report(f"estimates: {name}", good, detail)
        assert ok
