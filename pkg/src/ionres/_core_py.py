"""Pure-numpy propagation kernel (fallback when the extension is absent).

Implements the same interface as the compiled ``_core`` module: one
adaptive Dormand-Prince 4(5) integration over a time interval with PI step
control, per-step Hermitian symmetrization, and accumulators for the
sink-site population integral (cubic Hermite per step) and the incoherence
integral (trapezoid).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# Dormand-Prince 4(5) tableau.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
# 5th-order minus 4th-order weights (error estimate).
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_INVARIANT = 2


def _hamiltonian(plan, t: float) -> np.ndarray:
    mode = plan.ham_mode
    if mode == 0:
        return plan.h_const
    if mode == 1:
        coeff = plan.om0 + plan.om1 * np.cos(plan.omega * t)
        h = plan.h_const.copy()
        h[np.diag_indices_from(h)] += coeff * plan.wdiag
        return h
    if mode == 2:
        phase = -plan.om0 * t - (plan.om1 / plan.omega) * np.sin(plan.omega * t)
        z = np.exp(-1j * phase)
        return z * plan.h_up + np.conj(z) * plan.h_up.conj().T
    s = np.sin(plan.omega * t)
    if s < 0:
        return plan.h_odd
    if s > 0:
        return plan.h_even
    return 0.5 * (plan.h_odd + plan.h_even)


def _make_rhs(plan):
    decay = plan.decay
    gains = []
    for pref, mapping in zip(plan.gain_rates, plan.gain_maps):
        src = np.nonzero(mapping >= 0)[0]
        gains.append((pref, np.ix_(src, src), np.ix_(mapping[src], mapping[src])))

    def rhs(t, y):
        h = _hamiltonian(plan, t)
        out = -1j * (h @ y - y @ h)
        out -= decay * y
        for pref, src_ix, dst_ix in gains:
            out[dst_ix] += pref * y[src_ix]
        return out

    return rhs


def incoherence(rho: np.ndarray) -> float:
    """sum over k != l of |rho_kk * rho_ll - |rho_kl|^2|."""
    diag = np.real(np.diag(rho))
    prod = np.outer(diag, diag)
    mags = np.abs(np.asarray(rho)) ** 2
    total = np.abs(prod - mags)
    np.fill_diagonal(total, 0.0)
    return float(total.sum())


def integrate_interval(
    plan,
    rho: np.ndarray,
    t0: float,
    t1: float,
    rtol: float,
    atol: float,
    max_step: float,
    h_init: float,
    fixed_step: float,
    collect_coherence: bool,
    trace_limit: float,
):
    """Advance ``rho`` in place from t0 to t1.

    Returns ``(status, h_next, n_steps, int_pn, int_coh, herm_drift, trace_err)``
    where int_pn is the integral of the site-N population over the interval.
    """
    rhs = _make_rhs(plan)
    pn_mask = plan.pn_mask
    span = t1 - t0
    fixed = fixed_step > 0
    h = fixed_step if fixed else min(h_init, max_step, span)

    t = t0
    k = [None] * 7
    k[0] = rhs(t, rho)
    p_old = float(np.real(np.diag(rho)) @ pn_mask)
    pdot_old = float(np.real(np.diag(k[0])) @ pn_mask)
    coh_old = incoherence(rho) if collect_coherence else 0.0

    err_prev = 1.0
    n_steps = 0
    int_pn = 0.0
    int_coh = 0.0
    herm_drift = 0.0
    trace_err = 0.0
    hmin = max(abs(span), abs(t1), 1e-300) * 1e-14

    while t < t1 - 1e-12 * max(abs(span), 1e-300):
        h = min(h, max_step, t1 - t)
        if not fixed and h < hmin:
            return (STATUS_STEP_UNDERFLOW, h, n_steps, int_pn, int_coh, herm_drift, trace_err)

        y_stage = rho
        for i in range(1, 7):
            y_stage = rho.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    y_stage += (h * a) * k[j]
            k[i] = rhs(t + _C[i] * h, y_stage)
        y_new = y_stage  # stage 7 uses the 5th-order weights

        if fixed:
            err = 0.0
        else:
            err_mat = h * sum(e * ki for e, ki in zip(_E, k) if e)
            scale = atol + rtol * np.maximum(np.abs(rho), np.abs(y_new))
            err = float(np.sqrt(np.mean(np.abs(err_mat / scale) ** 2)))

        if fixed or err <= 1.0:
            t += h
            drift = float(np.max(np.abs(y_new - y_new.conj().T)))
            herm_drift = max(herm_drift, drift)
            np.copyto(rho, 0.5 * (y_new + y_new.conj().T))
            terr = abs(float(np.trace(rho).real) - 1.0)
            trace_err = max(trace_err, terr)
            n_steps += 1
            if terr > trace_limit:
                return (STATUS_INVARIANT, h, n_steps, int_pn, int_coh, herm_drift, trace_err)

            # Symmetrization perturbs the state, so the FSAL stage is
            # re-evaluated on the stored state.
            k[0] = rhs(t, rho)
            p_new = float(np.real(np.diag(rho)) @ pn_mask)
            pdot_new = float(np.real(np.diag(k[0])) @ pn_mask)
            int_pn += 0.5 * h * (p_old + p_new) + h * h / 12.0 * (pdot_old - pdot_new)
            p_old, pdot_old = p_new, pdot_new
            if collect_coherence:
                coh = incoherence(rho)
                int_coh += 0.5 * h * (coh_old + coh)
                coh_old = coh
            if not fixed:
                fac = 0.9 * err ** -0.14 * err_prev ** 0.08 if err > 0 else 5.0
                h *= min(5.0, max(0.2, fac))
                err_prev = max(err, 1e-10)
        else:
            h *= max(0.2, 0.9 * err ** -0.2)

    return (STATUS_OK, h, n_steps, int_pn, int_coh, herm_drift, trace_err)
