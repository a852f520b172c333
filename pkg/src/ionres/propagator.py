"""Time integration of the master equation and steady-current extraction.

The drive-period-averaged sink flux 2*Gamma_d*<p_N> defines the current;
the integration runs period by period from the vacuum until that average
stops changing (relative threshold from IntegratorSpec), which
operationalizes the asymptotic-growth-rate definition of the current for a
periodically driven system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel
from .generators import (
    HAM_CONSTANT,
    HAM_LAB_COSINE,
    HAM_ROTATING,
    HAM_SQUARE,
    GeneratorParts,
    KernelPlan,
    assemble_generator,
)
from .model import SimulationSpec, site_population_mask, vacuum_state, validate

__all__ = [
    "PropagationError",
    "StepSizeUnderflow",
    "InvariantViolation",
    "Trajectory",
    "CurrentResult",
    "propagate",
    "steady_current",
    "sink_population",
    "constant_plan",
    "export_trajectory_csv",
]


class PropagationError(RuntimeError):
    pass


class StepSizeUnderflow(PropagationError):
    pass


class InvariantViolation(PropagationError):
    pass


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of one propagation run."""

    times: np.ndarray          # (n_samples,)
    populations: np.ndarray    # (n_samples, N) site occupation expectations
    incoherence: np.ndarray    # (n_samples,)
    p_sink: np.ndarray         # (n_samples,) cumulative 2*Gamma_d*int p_N dt
    gamma_drain: float
    final_state: np.ndarray


@dataclass(frozen=True)
class CurrentResult:
    current: float
    periods_used: int
    rel_change_last: float
    converged: bool
    incoherence_avg: float = float("nan")
    current_net: float | None = None  # net drain flux; differs when n_drain > 0


def _max_step(spec: SimulationSpec, plan: KernelPlan) -> float:
    """Step cap resolving both the drive period and the fastest phase."""
    omega = spec.drive.angular_frequency
    cap = min(spec.integrator.max_step, (2.0 * np.pi / omega) / 20.0)
    if plan.ham_mode in (HAM_LAB_COSINE, HAM_ROTATING):
        fast = spec.chain.n_sites * (spec.chain.onsite_base + spec.drive.amplitude)
        if fast > 0:
            cap = min(cap, (2.0 * np.pi / fast) / 4.0)
    return cap


def _interval_breaks(plan: KernelPlan, t0: float, t1: float):
    """Split an interval at square-waveform switching times (half periods)."""
    if plan.ham_mode != HAM_SQUARE:
        return [(t0, t1)]
    half = np.pi / plan.omega
    first = np.floor(t0 / half + 1e-12) + 1
    cuts = []
    m = first
    while m * half < t1 - 1e-12 * half:
        if m * half > t0 + 1e-12 * half:
            cuts.append(m * half)
        m += 1
    points = [t0] + cuts + [t1]
    return list(zip(points[:-1], points[1:]))


class _Runner:
    """Stateful wrapper around the kernel: carries the step size forward."""

    def __init__(self, spec: SimulationSpec, plan: KernelPlan, trace_limit=1e-8):
        self.plan = plan
        self.spec = spec
        self.max_step = _max_step(spec, plan)
        self.h = self.max_step / 4.0
        self.trace_limit = trace_limit
        integ = spec.integrator
        self.rtol = integ.rel_tol
        self.atol = integ.abs_tol
        self.fixed = integ.fixed_step if integ.fixed_step else 0.0

    def run(self, rho, t0, t1, collect_coherence=False):
        total_pn = 0.0
        total_coh = 0.0
        steps = 0
        for a, b in _interval_breaks(self.plan, t0, t1):
            status, h_next, n_steps, int_pn, int_coh, _, trace_err = kernel.integrate_interval(
                self.plan, rho, a, b, self.rtol, self.atol, self.max_step,
                self.h, self.fixed, collect_coherence, self.trace_limit,
            )
            if status == kernel.STATUS_STEP_UNDERFLOW:
                raise StepSizeUnderflow(f"step size underflow at t ~ {a:.3e}")
            if status == kernel.STATUS_INVARIANT:
                raise InvariantViolation(
                    f"trace drifted by {trace_err:.3e} (limit {self.trace_limit:.1e})"
                )
            self.h = min(h_next, self.max_step)
            total_pn += int_pn
            total_coh += int_coh
            steps += n_steps
        return total_pn, total_coh, steps


def constant_plan(h_matrix: np.ndarray, omega: float, pn_mask=None) -> KernelPlan:
    """Kernel plan for closed-system evolution under a fixed Hamiltonian."""
    dim = h_matrix.shape[0]
    zeros_c = np.zeros((dim, dim), dtype=complex)
    return KernelPlan(
        dim=dim, ham_mode=HAM_CONSTANT,
        h_const=np.asarray(h_matrix, dtype=complex),
        wdiag=np.zeros(dim), h_up=zeros_c, h_odd=zeros_c, h_even=zeros_c,
        om0=0.0, om1=0.0, omega=omega,
        decay=np.zeros((dim, dim)),
        gain_rates=np.zeros(0), gain_maps=np.zeros((0, dim), dtype=np.int64),
        pn_mask=np.zeros(dim) if pn_mask is None else pn_mask,
    )


def propagate(spec: SimulationSpec, initial: np.ndarray | None = None,
              horizon: float = None, sampling: float = None,
              frame: str | None = None, parts: GeneratorParts | None = None) -> Trajectory:
    """Integrate and sample site populations, incoherence and p_sink.

    ``sampling`` defaults to a twentieth of the drive period; p_sink is the
    cumulative trapezoid of 2*Gamma_d*p_N over the sample grid.
    """
    spec = validate(spec)
    if horizon is None:
        raise ValueError("horizon is required")
    if sampling is None:
        sampling = spec.drive.period / 20.0
    parts = parts or assemble_generator(spec, frame=frame)
    plan = parts.plan
    n = spec.chain.n_sites

    rho = vacuum_state(n) if initial is None else np.array(initial, dtype=complex)
    masks = [site_population_mask(k, n) for k in range(1, n + 1)]
    runner = _Runner(spec, plan)

    times = [0.0]
    pops = [[float(np.real(np.diag(rho)) @ m) for m in masks]]
    cohs = [kernel.incoherence(rho)]
    t = 0.0
    n_samples = int(np.floor(horizon / sampling + 1e-9))
    for i in range(1, n_samples + 1):
        t_next = min(i * sampling, horizon)
        runner.run(rho, t, t_next)
        t = t_next
        _check_sampled_state(rho)
        times.append(t)
        pops.append([float(np.real(np.diag(rho)) @ m) for m in masks])
        cohs.append(kernel.incoherence(rho))

    times_a = np.asarray(times)
    pops_a = np.asarray(pops)
    flux = 2.0 * spec.baths.gamma_drain * pops_a[:, -1]
    p_sink = np.concatenate(
        [[0.0], np.cumsum(0.5 * np.diff(times_a) * (flux[1:] + flux[:-1]))]
    )
    return Trajectory(
        times=times_a, populations=pops_a, incoherence=np.asarray(cohs),
        p_sink=p_sink, gamma_drain=spec.baths.gamma_drain, final_state=rho,
    )


def _check_sampled_state(rho, limit=1e-8):
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > limit:
        raise InvariantViolation(f"sampled trace off by {tr - 1.0:.3e}")
    lam = np.linalg.eigvalsh(rho)[0]
    if lam < -limit:
        raise InvariantViolation(f"sampled state has eigenvalue {lam:.3e}")


def sink_population(traj: Trajectory):
    """Interpolant p_sink(t) from a sampled trajectory (nondecreasing when
    the drain occupation is zero)."""

    def p_sink(t):
        return np.interp(t, traj.times, traj.p_sink)

    return p_sink


def steady_current(spec: SimulationSpec, frame: str | None = None,
                   initial: np.ndarray | None = None) -> CurrentResult:
    """Run period by period until the averaged sink flux is stationary."""
    spec = validate(spec)
    if not spec.baths.gamma_drain > 0:
        raise ValueError("steady_current requires gamma_drain > 0")
    parts = assemble_generator(spec, frame=frame)
    runner = _Runner(spec, parts.plan)
    n = spec.chain.n_sites
    period = spec.drive.period
    threshold = spec.integrator.steady_state_rel_change
    max_periods = spec.integrator.max_periods
    gd = spec.baths.gamma_drain
    nd = spec.baths.n_drain
    # Absolute floor: currents far below this fraction of the maximal drain
    # flux 2*Gamma_d are compared on an absolute scale instead of relative.
    floor = 1e-4 * 2.0 * gd

    rho = vacuum_state(n) if initial is None else np.array(initial, dtype=complex)
    prev = None
    rel_change = np.inf
    current = 0.0
    coh_avg = float("nan")
    pn_avg = 0.0
    for m in range(1, max_periods + 1):
        int_pn, int_coh, _ = runner.run(rho, (m - 1) * period, m * period,
                                        collect_coherence=True)
        pn_avg = int_pn / period
        current = 2.0 * gd * pn_avg
        coh_avg = int_coh / period
        if prev is not None:
            rel_change = abs(current - prev) / max(abs(current), floor)
            if rel_change <= threshold:
                return CurrentResult(
                    current=current, periods_used=m, rel_change_last=rel_change,
                    converged=True, incoherence_avg=coh_avg,
                    current_net=_net_current(gd, nd, pn_avg),
                )
        prev = current
    return CurrentResult(
        current=current, periods_used=max_periods, rel_change_last=rel_change,
        converged=False, incoherence_avg=coh_avg,
        current_net=_net_current(gd, nd, pn_avg),
    )


def _net_current(gd, nd, pn_avg):
    # Gross flux 2*Gamma_d*p_N is the reported current; the net flux below
    # coincides with it when n_drain = 0.
    return 2.0 * gd * ((nd + 1.0) * pn_avg - nd * (1.0 - pn_avg))


def export_trajectory_csv(traj: Trajectory, path) -> None:
    n = traj.populations.shape[1]
    header = "t," + ",".join(f"pop_{k}" for k in range(1, n + 1)) + ",incoherence,p_sink"
    rows = []
    for i, t in enumerate(traj.times):
        vals = [f"{t:.12g}"]
        vals += [f"{p:.12g}" for p in traj.populations[i]]
        vals += [f"{traj.incoherence[i]:.12g}", f"{traj.p_sink[i]:.12g}"]
        rows.append(",".join(vals))
    with open(path, "w") as fh:
        fh.write(header + "\n" + "\n".join(rows) + "\n")
