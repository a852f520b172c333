"""Classical Pauli rate-equation control model over site populations.

The quantum chain's fully decohered limit: nearest-neighbour hopping at a
dephasing-broadened Lorentzian rate W(t) = 2 c^2 G2 / (G2^2 + Delta(t)^2)
with the instantaneous adjacent-site detuning Delta(t) from the same drive.
No coherences exist, so no Bessel-zero resonances can appear; this is the
no-coherence control for the resonance sweeps.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from .model import SimulationSpec, validate
from .propagator import CurrentResult

__all__ = ["classical_rates", "classical_current", "default_broadening"]


def default_broadening(spec: SimulationSpec) -> float:
    """G2 = gamma + Gamma_s + Gamma_d (mean dephasing across sites)."""
    gamma = float(np.mean(spec.chain.dephasing)) if spec.chain.dephasing else 0.0
    return gamma + spec.baths.gamma_source + spec.baths.gamma_drain


def classical_rates(chain, drive, broadening: float, t: float) -> np.ndarray:
    """Per-bond hop rates W_k(t) (identical across bonds for uniform drive)."""
    if not broadening > 0:
        raise ValueError("broadening must be > 0")
    delta = chain.onsite_base + drive.amplitude * np.cos(drive.angular_frequency * t)
    c = np.asarray(chain.hopping, dtype=float)
    return 2.0 * c**2 * broadening / (broadening**2 + delta**2)


def _rhs_factory(spec: SimulationSpec, broadening: float):
    chain, drive, baths = spec.chain, spec.drive, spec.baths
    n = chain.n_sites
    gs, gd = baths.gamma_source, baths.gamma_drain
    ns, nd = baths.n_source, baths.n_drain
    thermal = np.asarray(chain.thermal, dtype=float)

    def rhs(t, p):
        w = classical_rates(chain, drive, broadening, t) + 2.0 * thermal
        dp = np.zeros(n)
        flow = w * (p[:-1] - p[1:]) if n > 1 else np.zeros(0)
        dp[:-1] -= flow
        dp[1:] += flow
        dp[0] += 2.0 * gs * ns * (1.0 - p[0]) - 2.0 * gs * (ns + 1.0) * p[0]
        dp[-1] += 2.0 * gd * nd * (1.0 - p[-1]) - 2.0 * gd * (nd + 1.0) * p[-1]
        return dp

    return rhs


def classical_current(spec: SimulationSpec, broadening: float | None = None) -> CurrentResult:
    """Periodic steady state of the rate ODE, same convergence rule as the
    quantum propagator; I = 2*Gamma_d*(n_drain+1)*<p_N> period-averaged."""
    spec = validate(spec)
    if not spec.baths.gamma_drain > 0:
        raise ValueError("classical_current requires gamma_drain > 0")
    if broadening is None:
        broadening = default_broadening(spec)
    rhs = _rhs_factory(spec, broadening)
    n = spec.chain.n_sites
    period = spec.drive.period
    gd, nd = spec.baths.gamma_drain, spec.baths.n_drain
    threshold = spec.integrator.steady_state_rel_change
    floor = 1e-4 * 2.0 * gd * (nd + 1.0)

    p = np.zeros(n)
    prev = None
    rel_change = np.inf
    current = 0.0
    for m in range(1, spec.integrator.max_periods + 1):
        sol = solve_ivp(
            rhs, ((m - 1) * period, m * period), p, method="RK45",
            rtol=spec.integrator.rel_tol, atol=spec.integrator.abs_tol,
            max_step=period / 40.0, dense_output=True,
        )
        if not sol.success:
            raise RuntimeError(f"rate ODE failed: {sol.message}")
        p = sol.y[:, -1]
        # period average of p_N on a fine uniform grid of the dense output
        ts = np.linspace((m - 1) * period, m * period, 201)
        pn_avg = float(np.trapezoid(sol.sol(ts)[-1], ts)) / period
        current = 2.0 * gd * (nd + 1.0) * pn_avg
        if prev is not None:
            rel_change = abs(current - prev) / max(abs(current), floor)
            if rel_change <= threshold:
                return CurrentResult(current=current, periods_used=m,
                                     rel_change_last=rel_change, converged=True)
        prev = current
    return CurrentResult(current=current, periods_used=spec.integrator.max_periods,
                         rel_change_last=rel_change, converged=False)
