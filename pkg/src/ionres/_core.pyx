# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled propagation kernel: adaptive Dormand-Prince 4(5) for the
master-equation right-hand side.  Mirrors ``_core_py`` exactly; the numpy
module is the fallback and the parity of the two is covered by tests."""

import numpy as np

from libc.math cimport cos, sin, sqrt, fabs, pow

BACKEND = "compiled"

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_INVARIANT = 2

cdef double[7] C_NODES = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
cdef double[7][6] A_COEF = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5, 0, 0, 0, 0, 0],
    [3.0 / 40, 9.0 / 40, 0, 0, 0, 0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0],
    [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84],
]
cdef double[7] E_COEF = [
    71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
    -17253.0 / 339200, 22.0 / 525, -1.0 / 40,
]


cdef void _build_h(int mode, double t,
                   double complex[:, ::1] h_const, double[::1] wdiag,
                   double complex[:, ::1] h_up,
                   double complex[:, ::1] h_odd, double complex[:, ::1] h_even,
                   double om0, double om1, double omega,
                   double complex[:, ::1] out) noexcept nogil:
    cdef int dim = out.shape[0]
    cdef int i, j
    cdef double coeff, phase, s
    cdef double complex z, zc
    if mode == 0:
        for i in range(dim):
            for j in range(dim):
                out[i, j] = h_const[i, j]
    elif mode == 1:
        coeff = om0 + om1 * cos(omega * t)
        for i in range(dim):
            for j in range(dim):
                out[i, j] = h_const[i, j]
            out[i, i] = out[i, i] + coeff * wdiag[i]
    elif mode == 2:
        phase = -om0 * t - (om1 / omega) * sin(omega * t)
        z = cos(phase) - 1j * sin(phase)
        zc = cos(phase) + 1j * sin(phase)
        for i in range(dim):
            for j in range(dim):
                out[i, j] = z * h_up[i, j] + zc * (h_up[j, i].real - 1j * h_up[j, i].imag)
    else:
        s = sin(omega * t)
        if s < 0:
            for i in range(dim):
                for j in range(dim):
                    out[i, j] = h_odd[i, j]
        elif s > 0:
            for i in range(dim):
                for j in range(dim):
                    out[i, j] = h_even[i, j]
        else:
            for i in range(dim):
                for j in range(dim):
                    out[i, j] = 0.5 * (h_odd[i, j] + h_even[i, j])


cdef void _rhs(double complex[:, ::1] h, double complex[:, ::1] y,
               double[:, ::1] decay,
               double[::1] gain_rates, long long[:, ::1] gain_maps,
               double complex[:, ::1] t1, double complex[:, ::1] t2,
               double complex[:, ::1] out) noexcept nogil:
    """out = -i(h y - y h) - decay * y + sum_j pref_j * gather_j(y)."""
    cdef int dim = y.shape[0]
    cdef int n_jumps = gain_rates.shape[0]
    cdef int i, j, l, jj
    cdef long long a, b
    cdef double complex acc, av
    cdef double pref
    for i in range(dim):
        for j in range(dim):
            t1[i, j] = 0
            t2[i, j] = 0
    for i in range(dim):
        for l in range(dim):
            av = h[i, l]
            if av != 0:
                for j in range(dim):
                    t1[i, j] = t1[i, j] + av * y[l, j]
            av = y[i, l]
            if av != 0:
                for j in range(dim):
                    t2[i, j] = t2[i, j] + av * h[l, j]
    for i in range(dim):
        for j in range(dim):
            out[i, j] = -1j * (t1[i, j] - t2[i, j]) - decay[i, j] * y[i, j]
    for jj in range(n_jumps):
        pref = gain_rates[jj]
        for i in range(dim):
            a = gain_maps[jj, i]
            if a < 0:
                continue
            for j in range(dim):
                b = gain_maps[jj, j]
                if b >= 0:
                    out[a, b] = out[a, b] + pref * y[i, j]


cdef double _incoherence(double complex[:, ::1] rho) noexcept nogil:
    cdef int dim = rho.shape[0]
    cdef int i, j
    cdef double total = 0.0, pi, mag
    for i in range(dim):
        pi = rho[i, i].real
        for j in range(dim):
            if i == j:
                continue
            mag = rho[i, j].real * rho[i, j].real + rho[i, j].imag * rho[i, j].imag
            total += fabs(pi * rho[j, j].real - mag)
    return total


def integrate_interval(plan, rho, double t0, double t1, double rtol,
                       double atol, double max_step, double h_init,
                       double fixed_step, bint collect_coherence,
                       double trace_limit):
    """Advance ``rho`` in place from t0 to t1; see _core_py for the contract."""
    cdef int dim = plan.dim
    cdef int mode = plan.ham_mode
    cdef double om0 = plan.om0, om1 = plan.om1, omega = plan.omega

    h_const_a = np.ascontiguousarray(plan.h_const, dtype=np.complex128)
    h_up_a = np.ascontiguousarray(plan.h_up, dtype=np.complex128)
    h_odd_a = np.ascontiguousarray(plan.h_odd, dtype=np.complex128)
    h_even_a = np.ascontiguousarray(plan.h_even, dtype=np.complex128)
    decay_a = np.ascontiguousarray(plan.decay, dtype=np.float64)
    wdiag_a = np.ascontiguousarray(plan.wdiag, dtype=np.float64)
    rates_a = np.ascontiguousarray(plan.gain_rates, dtype=np.float64)
    maps_a = np.ascontiguousarray(plan.gain_maps, dtype=np.int64)
    pn_a = np.ascontiguousarray(plan.pn_mask, dtype=np.float64)

    cdef double complex[:, ::1] h_const = h_const_a
    cdef double complex[:, ::1] h_up = h_up_a
    cdef double complex[:, ::1] h_odd = h_odd_a
    cdef double complex[:, ::1] h_even = h_even_a
    cdef double[:, ::1] decay = decay_a
    cdef double[::1] wdiag = wdiag_a
    cdef double[::1] gain_rates = rates_a
    cdef long long[:, ::1] gain_maps = maps_a
    cdef double[::1] pn_mask = pn_a

    cdef double complex[:, ::1] y = np.ascontiguousarray(rho, dtype=np.complex128)
    if y.shape[0] != dim:
        raise ValueError("state dimension does not match plan")

    k_arr = np.zeros((7, dim, dim), dtype=np.complex128)
    cdef double complex[:, :, ::1] k = k_arr
    scratch = np.zeros((5, dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] hmat = scratch[0]
    cdef double complex[:, ::1] tmp1 = scratch[1]
    cdef double complex[:, ::1] tmp2 = scratch[2]
    cdef double complex[:, ::1] y_stage = scratch[3]
    cdef double complex[:, ::1] y_new = scratch[4]

    cdef bint fixed = fixed_step > 0
    cdef double span = t1 - t0
    cdef double h = fixed_step if fixed else min(h_init, max_step, span)
    cdef double t = t0
    cdef double err_prev = 1.0, err, sc, emag, fac, aij
    cdef double p_old, pdot_old, p_new, pdot_new, coh_old = 0.0, coh
    cdef double int_pn = 0.0, int_coh = 0.0
    cdef double herm_drift = 0.0, trace_err = 0.0, drift, terr, tr
    cdef double hmin = max(fabs(span), fabs(t1), 1e-300) * 1e-14
    cdef long n_steps = 0
    cdef int i, j, stage, l
    cdef double complex ev, dv

    _build_h(mode, t, h_const, wdiag, h_up, h_odd, h_even, om0, om1, omega, hmat)
    _rhs(hmat, y, decay, gain_rates, gain_maps, tmp1, tmp2, k[0])
    p_old = 0.0
    pdot_old = 0.0
    for i in range(dim):
        p_old += pn_mask[i] * y[i, i].real
        pdot_old += pn_mask[i] * k[0, i, i].real
    if collect_coherence:
        coh_old = _incoherence(y)

    while t < t1 - 1e-12 * max(fabs(span), 1e-300):
        h = min(h, max_step, t1 - t)
        if (not fixed) and h < hmin:
            np.asarray(rho)[...] = np.asarray(y)
            return (STATUS_STEP_UNDERFLOW, h, n_steps, int_pn, int_coh, herm_drift, trace_err)

        with nogil:
            for stage in range(1, 7):
                for i in range(dim):
                    for j in range(dim):
                        y_stage[i, j] = y[i, j]
                for l in range(stage):
                    aij = A_COEF[stage][l]
                    if aij != 0:
                        for i in range(dim):
                            for j in range(dim):
                                y_stage[i, j] = y_stage[i, j] + (h * aij) * k[l, i, j]
                _build_h(mode, t + C_NODES[stage] * h, h_const, wdiag, h_up,
                         h_odd, h_even, om0, om1, omega, hmat)
                _rhs(hmat, y_stage, decay, gain_rates, gain_maps, tmp1, tmp2, k[stage])
            for i in range(dim):
                for j in range(dim):
                    y_new[i, j] = y_stage[i, j]

            err = 0.0
            if not fixed:
                for i in range(dim):
                    for j in range(dim):
                        ev = (E_COEF[0] * k[0, i, j] + E_COEF[2] * k[2, i, j]
                              + E_COEF[3] * k[3, i, j] + E_COEF[4] * k[4, i, j]
                              + E_COEF[5] * k[5, i, j] + E_COEF[6] * k[6, i, j])
                        emag = h * abs(ev)
                        sc = atol + rtol * max(abs(y[i, j]), abs(y_new[i, j]))
                        err += (emag / sc) * (emag / sc)
                err = sqrt(err / (dim * dim))

        if fixed or err <= 1.0:
            t += h
            with nogil:
                drift = 0.0
                for i in range(dim):
                    for j in range(dim):
                        dv = y_new[i, j] - (y_new[j, i].real - 1j * y_new[j, i].imag)
                        if abs(dv) > drift:
                            drift = abs(dv)
                for i in range(dim):
                    for j in range(i, dim):
                        ev = 0.5 * (y_new[i, j] + (y_new[j, i].real - 1j * y_new[j, i].imag))
                        y[i, j] = ev
                        y[j, i] = ev.real - 1j * ev.imag
                tr = 0.0
                for i in range(dim):
                    tr += y[i, i].real
            if drift > herm_drift:
                herm_drift = drift
            terr = fabs(tr - 1.0)
            if terr > trace_err:
                trace_err = terr
            n_steps += 1
            if terr > trace_limit:
                np.asarray(rho)[...] = np.asarray(y)
                return (STATUS_INVARIANT, h, n_steps, int_pn, int_coh, herm_drift, trace_err)

            with nogil:
                _build_h(mode, t, h_const, wdiag, h_up, h_odd, h_even, om0, om1, omega, hmat)
                _rhs(hmat, y, decay, gain_rates, gain_maps, tmp1, tmp2, k[0])
                p_new = 0.0
                pdot_new = 0.0
                for i in range(dim):
                    p_new += pn_mask[i] * y[i, i].real
                    pdot_new += pn_mask[i] * k[0, i, i].real
            int_pn += 0.5 * h * (p_old + p_new) + h * h / 12.0 * (pdot_old - pdot_new)
            p_old = p_new
            pdot_old = pdot_new
            if collect_coherence:
                coh = _incoherence(y)
                int_coh += 0.5 * h * (coh_old + coh)
                coh_old = coh
            if not fixed:
                if err > 0:
                    fac = 0.9 * pow(err, -0.14) * pow(err_prev, 0.08)
                else:
                    fac = 5.0
                h *= min(5.0, max(0.2, fac))
                err_prev = max(err, 1e-10)
        else:
            h *= max(0.2, 0.9 * pow(err, -0.2))

    np.asarray(rho)[...] = np.asarray(y)
    return (STATUS_OK, h, n_steps, int_pn, int_coh, herm_drift, trace_err)


def incoherence(rho):
    arr = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef double complex[:, ::1] view = arr
    return _incoherence(view)
