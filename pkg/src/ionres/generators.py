"""Hamiltonians, dissipators and the assembled master-equation generator.

Everything lives in the full 2**N occupation basis (big-endian bit strings,
site 1 = most significant bit).  Jump operators of the model map each basis
state to at most one other basis state with unit amplitude, so a dissipator
is stored as (target-index array, rate) pairs plus one elementwise decay
matrix; applying the full dissipator then costs O(dim**2) per jump with no
superoperator ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bessel import bessel_first_zeros, bessel_j
from .model import (
    ChainSpec,
    DriveSpec,
    SimulationSpec,
    occupation_bit,
    site_population_mask,
    site_weight_vector,
    validate,
)

__all__ = [
    "WaveformUnsupported",
    "IncommensurateRatio",
    "KernelPlan",
    "GeneratorParts",
    "hamiltonian_at",
    "hopping_matrix",
    "raising_hop_matrix",
    "sigma_minus_map",
    "sigma_plus_map",
    "bond_transfer_map",
    "dissipator_source_drain",
    "dissipator_dephasing",
    "dissipator_thermal",
    "assemble_generator",
    "rotating_frame_phase",
    "interaction_hamiltonian_at",
    "effective_hamiltonian",
    "bessel_j",
    "bessel_first_zeros",
]

# Hamiltonian evaluation modes understood by the propagation kernels.
HAM_CONSTANT = 0
HAM_LAB_COSINE = 1
HAM_ROTATING = 2
HAM_SQUARE = 3


class WaveformUnsupported(ValueError):
    pass


class IncommensurateRatio(ValueError):
    pass


# ---------------------------------------------------------------------------
# Elementary operator structure


def sigma_minus_map(site: int, n_sites: int) -> np.ndarray:
    """Basis map of sigma_k^-: occupied -> empty on ``site``, else -1."""
    dim = 1 << n_sites
    bit = 1 << (n_sites - site)
    out = np.full(dim, -1, dtype=np.int64)
    for b in range(dim):
        if b & bit:
            out[b] = b & ~bit
    return out


def sigma_plus_map(site: int, n_sites: int) -> np.ndarray:
    dim = 1 << n_sites
    bit = 1 << (n_sites - site)
    out = np.full(dim, -1, dtype=np.int64)
    for b in range(dim):
        if not b & bit:
            out[b] = b | bit
    return out


def bond_transfer_map(k: int, n_sites: int, forward: bool) -> np.ndarray:
    """Map of sigma_{k+1}^+ sigma_k^- (forward) or sigma_{k+1}^- sigma_k^+."""
    dim = 1 << n_sites
    bit_k = 1 << (n_sites - k)
    bit_k1 = 1 << (n_sites - k - 1)
    out = np.full(dim, -1, dtype=np.int64)
    for b in range(dim):
        if forward and (b & bit_k) and not (b & bit_k1):
            out[b] = (b & ~bit_k) | bit_k1
        elif not forward and not (b & bit_k) and (b & bit_k1):
            out[b] = (b | bit_k) & ~bit_k1
    return out


def hopping_matrix(chain: ChainSpec, bonds=None) -> np.ndarray:
    """Hermitian nearest-neighbour hopping sum over ``bonds`` (default all)."""
    n = chain.n_sites
    dim = chain.dim
    h = np.zeros((dim, dim), dtype=complex)
    for k in bonds if bonds is not None else range(1, n):
        fwd = bond_transfer_map(k, n, forward=True)
        c = chain.hopping[k - 1]
        for b in range(dim):
            if fwd[b] >= 0:
                h[fwd[b], b] += c
                h[b, fwd[b]] += c
    return h


def raising_hop_matrix(chain: ChainSpec) -> np.ndarray:
    """Sum over bonds of c_k * sigma_k^+ sigma_{k+1}^- (non-Hermitian half)."""
    n = chain.n_sites
    dim = chain.dim
    h = np.zeros((dim, dim), dtype=complex)
    for k in range(1, n):
        # sigma_k^+ sigma_{k+1}^-  moves an excitation from site k+1 to k,
        # i.e. the reverse of bond_transfer_map(forward=True).
        back = bond_transfer_map(k, n, forward=False)
        c = chain.hopping[k - 1]
        for b in range(dim):
            if back[b] >= 0:
                h[back[b], b] += c
    return h


def hamiltonian_at(chain: ChainSpec, drive: DriveSpec, t: float) -> np.ndarray:
    """Lab-frame Hamiltonian matrix at time ``t`` for either waveform."""
    n = chain.n_sites
    if drive.waveform == "cosine":
        w = site_weight_vector(n)
        coeff = chain.onsite_base + drive.amplitude * np.cos(drive.angular_frequency * t)
        return hopping_matrix(chain) + np.diag(coeff * w).astype(complex)
    if drive.waveform == "square_coupling":
        h = np.zeros((chain.dim, chain.dim), dtype=complex)
        s = np.sin(drive.angular_frequency * t)
        for k in range(1, n):
            # sgn(sin(w t + k pi)) = (-1)^k sgn(sin w t)
            sgn = np.sign(s) * (-1.0 if k % 2 else 1.0)
            factor = 0.5 * (1.0 + sgn)
            if factor:
                h += factor * hopping_matrix(chain, bonds=[k])
        return h
    raise WaveformUnsupported(drive.waveform)


# ---------------------------------------------------------------------------
# Dissipators


def _jump_terms_source_drain(baths, n_sites: int):
    """(map, rate) pairs for the end-site exchange dissipators.

    Each Lindblad term carries the paper-style factor 2 convention
    rate * (2 L rho L^dag - {L^dag L, rho}).
    """
    terms = []
    for site, gamma, occ in (
        (1, baths.gamma_source, baths.n_source),
        (n_sites, baths.gamma_drain, baths.n_drain),
    ):
        if gamma * (occ + 1.0) > 0:
            terms.append((sigma_minus_map(site, n_sites), gamma * (occ + 1.0)))
        if gamma * occ > 0:
            terms.append((sigma_plus_map(site, n_sites), gamma * occ))
    return terms


def _jump_terms_thermal(chain: ChainSpec):
    terms = []
    for k in range(1, chain.n_sites):
        g = chain.thermal[k - 1]
        if g > 0:
            terms.append((bond_transfer_map(k, chain.n_sites, forward=True), g))
            terms.append((bond_transfer_map(k, chain.n_sites, forward=False), g))
    return terms


def _dephasing_decay_matrix(chain: ChainSpec) -> np.ndarray:
    """decay[a, b] = sum_k gamma_k * (occ_k(a) XOR occ_k(b)).

    This is the exact elementwise action of the pure-dephasing dissipator:
    diagonals untouched, coherences decay.
    """
    n, dim = chain.n_sites, chain.dim
    dec = np.zeros((dim, dim))
    for k in range(1, n + 1):
        g = chain.dephasing[k - 1]
        if g == 0:
            continue
        occ = np.array([occupation_bit(b, k, n) for b in range(dim)])
        dec += g * (occ[:, None] ^ occ[None, :])
    return dec


def _action_from_terms(jump_terms, decay: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Build rho -> sum_j r_j(2 L rho L^dag - {L^dag L, rho}) - decay*rho."""
    dim = decay.shape[0]
    full_decay = decay.copy()
    gains = []
    for mapping, rate in jump_terms:
        occupied = mapping >= 0
        d = occupied.astype(float) * rate
        full_decay += d[:, None] + d[None, :]
        src = np.nonzero(occupied)[0]
        gains.append((2.0 * rate, src, mapping[src]))

    def action(rho: np.ndarray) -> np.ndarray:
        out = -full_decay * rho
        for pref, src, dst in gains:
            out[np.ix_(dst, dst)] += pref * rho[np.ix_(src, src)]
        return out

    return action


def dissipator_source_drain(baths, n_sites: int) -> Callable[[np.ndarray], np.ndarray]:
    """Combined source (site 1) and drain (site N) exchange dissipator."""
    dim = 1 << n_sites
    return _action_from_terms(_jump_terms_source_drain(baths, n_sites), np.zeros((dim, dim)))


def dissipator_dephasing(chain: ChainSpec) -> Callable[[np.ndarray], np.ndarray]:
    return _action_from_terms([], _dephasing_decay_matrix(chain))


def dissipator_thermal(chain: ChainSpec) -> Callable[[np.ndarray], np.ndarray]:
    dim = chain.dim
    return _action_from_terms(_jump_terms_thermal(chain), np.zeros((dim, dim)))


# ---------------------------------------------------------------------------
# Assembled generator


@dataclass(frozen=True)
class KernelPlan:
    """Flat arrays consumed by the propagation kernels (compiled or numpy)."""

    dim: int
    ham_mode: int
    h_const: np.ndarray      # complex (dim, dim); hopping part / constant H
    wdiag: np.ndarray        # real (dim,); site-weight diagonal (lab cosine)
    h_up: np.ndarray         # complex (dim, dim); raising half (rotating)
    h_odd: np.ndarray        # complex (dim, dim); odd bonds (square waveform)
    h_even: np.ndarray       # complex (dim, dim); even bonds
    om0: float
    om1: float
    omega: float
    decay: np.ndarray        # real (dim, dim); elementwise loss coefficients
    gain_rates: np.ndarray   # real (n_jumps,); prefactor 2*r_j
    gain_maps: np.ndarray    # int64 (n_jumps, dim); target index or -1
    pn_mask: np.ndarray      # real (dim,); diagonal of site-N number operator


@dataclass(frozen=True)
class GeneratorParts:
    """Static + modulated pieces of the full master-equation generator."""

    h_static: np.ndarray
    h_drive: np.ndarray
    dissipator: Callable[[np.ndarray], np.ndarray]
    plan: KernelPlan

    def apply(self, rho: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Full generator action at time ``t`` (reference path, numpy only)."""
        h = _hamiltonian_from_plan(self.plan, t)
        return -1j * (h @ rho - rho @ h) + self.dissipator(rho)


def _hamiltonian_from_plan(plan: KernelPlan, t: float) -> np.ndarray:
    if plan.ham_mode == HAM_CONSTANT:
        return plan.h_const
    if plan.ham_mode == HAM_LAB_COSINE:
        coeff = plan.om0 + plan.om1 * np.cos(plan.omega * t)
        return plan.h_const + np.diag(coeff * plan.wdiag)
    if plan.ham_mode == HAM_ROTATING:
        z = np.exp(-1j * (-plan.om0 * t - (plan.om1 / plan.omega) * np.sin(plan.omega * t)))
        return z * plan.h_up + np.conj(z) * plan.h_up.conj().T
    if plan.ham_mode == HAM_SQUARE:
        s = np.sin(plan.omega * t)
        if s < 0:
            return plan.h_odd
        if s > 0:
            return plan.h_even
        return 0.5 * (plan.h_odd + plan.h_even)
    raise ValueError(f"unknown ham_mode {plan.ham_mode}")


def assemble_generator(spec: SimulationSpec, frame: str | None = None) -> GeneratorParts:
    """Build the generator for ``spec`` in the requested frame.

    ``frame`` defaults to ``spec.integrator.frame``.  In the rotating frame
    only the cosine waveform is meaningful (the transformation removes the
    on-site terms); dissipators are identical in both frames because the
    frame change is a diagonal unitary that cancels inside each Lindblad
    sandwich.
    """
    spec = validate(spec)
    chain, drive, baths = spec.chain, spec.drive, spec.baths
    n, dim = chain.n_sites, chain.dim
    frame = frame or spec.integrator.frame

    jump_terms = _jump_terms_source_drain(baths, n) + _jump_terms_thermal(chain)
    deph = _dephasing_decay_matrix(chain)
    dissipator = _action_from_terms(jump_terms, deph)

    decay = deph.copy()
    rates, maps = [], []
    for mapping, rate in jump_terms:
        d = (mapping >= 0).astype(float) * rate
        decay += d[:, None] + d[None, :]
        rates.append(2.0 * rate)
        maps.append(mapping)
    gain_rates = np.asarray(rates, dtype=float)
    gain_maps = (
        np.asarray(maps, dtype=np.int64) if maps else np.zeros((0, dim), dtype=np.int64)
    )

    w = site_weight_vector(n)
    zeros_c = np.zeros((dim, dim), dtype=complex)
    common = dict(
        dim=dim,
        wdiag=w,
        om0=chain.onsite_base,
        om1=drive.amplitude,
        omega=drive.angular_frequency,
        decay=decay,
        gain_rates=gain_rates,
        gain_maps=gain_maps,
        pn_mask=site_population_mask(n, n),
    )

    if drive.waveform == "square_coupling":
        if frame == "rotating":
            raise WaveformUnsupported("square_coupling has no rotating-frame form")
        h_odd = hopping_matrix(chain, bonds=[k for k in range(1, n) if k % 2 == 1])
        h_even = hopping_matrix(chain, bonds=[k for k in range(1, n) if k % 2 == 0])
        plan = KernelPlan(
            ham_mode=HAM_SQUARE, h_const=zeros_c, h_up=zeros_c,
            h_odd=h_odd, h_even=h_even, **common,
        )
        h_static = zeros_c
    elif frame == "rotating":
        h_up = raising_hop_matrix(chain)
        plan = KernelPlan(
            ham_mode=HAM_ROTATING, h_const=zeros_c, h_up=h_up,
            h_odd=zeros_c, h_even=zeros_c, **common,
        )
        h_static = h_up + h_up.conj().T
    else:
        h_hop = hopping_matrix(chain)
        plan = KernelPlan(
            ham_mode=HAM_LAB_COSINE, h_const=h_hop, h_up=zeros_c,
            h_odd=zeros_c, h_even=zeros_c, **common,
        )
        h_static = h_hop + np.diag(chain.onsite_base * w).astype(complex)

    return GeneratorParts(
        h_static=h_static,
        h_drive=np.diag(w).astype(complex),
        dissipator=dissipator,
        plan=plan,
    )


# ---------------------------------------------------------------------------
# Rotating frame and the period-averaged effective model


def rotating_frame_phase(drive: DriveSpec, onsite: float, t: float) -> float:
    """A(t) = -onsite*t - (amplitude/omega) * sin(omega*t)."""
    return -onsite * t - (drive.amplitude / drive.angular_frequency) * np.sin(
        drive.angular_frequency * t
    )


def interaction_hamiltonian_at(chain: ChainSpec, drive: DriveSpec, t: float) -> np.ndarray:
    """Rotating-frame hopping Hamiltonian with phase-dressed couplings."""
    if drive.waveform != "cosine":
        raise WaveformUnsupported(
            f"interaction picture defined for cosine waveform, not {drive.waveform!r}"
        )
    z = np.exp(-1j * rotating_frame_phase(drive, chain.onsite_base, t))
    h_up = raising_hop_matrix(chain)
    return z * h_up + np.conj(z) * h_up.conj().T


def effective_hamiltonian(chain: ChainSpec, drive: DriveSpec,
                          ratio_tol: float = 1e-6) -> np.ndarray:
    """Period-averaged hopping Hamiltonian with couplings c * J_n(amp/omega).

    Requires onsite_base/omega to lie within ``ratio_tol`` of an integer n
    (the Bessel order); the averaging derivation only holds on resonance.
    """
    if drive.waveform != "cosine":
        raise WaveformUnsupported("effective model defined for cosine waveform")
    ratio = chain.onsite_base / drive.angular_frequency
    n_order = round(ratio)
    if abs(ratio - n_order) > ratio_tol or n_order < 0:
        raise IncommensurateRatio(
            f"onsite_base/omega = {ratio} is not within {ratio_tol} of a nonnegative integer"
        )
    scale = bessel_j(n_order, drive.amplitude / drive.angular_frequency)
    return scale * hopping_matrix(chain)
