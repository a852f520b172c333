"""Order-of-magnitude physics and experimental-feasibility numbers (SI units).

Covers the matter-wave and tunneling estimates for a potassium ion in the
selectivity-filter geometry, doublet splittings of a quartic double well
from a finite-difference eigensolver, and the patch-clamp RC feasibility
triplet (membrane capacitance, pipette-resistance bound, capacitive
current).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "NonpositiveInput",
    "GridTooCoarse",
    "PLANCK_H",
    "HBAR",
    "K_BOLTZMANN",
    "ATOMIC_MASS_UNIT",
    "ELEMENTARY_CHARGE",
    "POTASSIUM_MASS",
    "DoubleWellSpec",
    "default_double_well",
    "de_broglie",
    "tunneling_probability",
    "double_well_splittings",
    "patch_clamp_feasibility",
]

# CODATA 2018
PLANCK_H = 6.62607015e-34        # J s
HBAR = 1.054571817e-34           # J s
K_BOLTZMANN = 1.380649e-23       # J/K
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
ELEMENTARY_CHARGE = 1.602176634e-19   # C

POTASSIUM_MASS = 39.0983 * ATOMIC_MASS_UNIT
ROOM_T = 300.0  # K used wherever k_B*T appears


class NonpositiveInput(ValueError):
    pass


class GridTooCoarse(RuntimeError):
    pass


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise NonpositiveInput(f"{name} must be > 0, got {value}")


def de_broglie(mass: float, energy: float) -> float:
    """Matter wavelength h / sqrt(2 m E)."""
    _require_positive(mass=mass, energy=energy)
    return PLANCK_H / math.sqrt(2.0 * mass * energy)


def tunneling_probability(mass: float, barrier_height: float, width: float,
                          attempt_frequency: float | None = None,
                          planck: str = "h"):
    """Single-try barrier penetration exp(-width*sqrt(2*m*height)/const).

    ``planck`` selects the constant in the exponent: ``"h"`` (the literal
    published form; the default) or ``"hbar"`` (the textbook Gamow factor,
    orders of magnitude smaller for these parameters).  Returns the
    probability, or ``(probability, rate)`` when an attempt frequency is
    given.
    """
    _require_positive(mass=mass, barrier_height=barrier_height)
    if width < 0:
        raise NonpositiveInput(f"width must be >= 0, got {width}")
    const = PLANCK_H if planck == "h" else HBAR
    p = math.exp(-width * math.sqrt(2.0 * mass * barrier_height) / const)
    if attempt_frequency is None:
        return p
    return p, p * attempt_frequency


@dataclass(frozen=True)
class DoubleWellSpec:
    """Quartic double well V(x) = alpha x^4 - 2 beta x^2 (shifted so the
    well minima sit at zero energy)."""

    alpha: float      # J / m^4
    beta: float       # J / m^2
    mass: float       # kg
    half_width: float  # m, grid extends over [-half_width, half_width]
    points: int = 2000

    @property
    def minima_separation(self) -> float:
        return 2.0 * math.sqrt(self.beta / self.alpha)

    @property
    def barrier_height(self) -> float:
        return self.beta**2 / self.alpha


def default_double_well(barrier_ev: float = 0.04, separation: float = 0.24e-9,
                        mass: float = POTASSIUM_MASS) -> DoubleWellSpec:
    """Well with the selectivity-filter geometry: 0.04 eV barrier, minima
    0.24 nm apart."""
    barrier = barrier_ev * ELEMENTARY_CHARGE
    x0 = separation / 2.0
    beta = barrier / x0**2
    alpha = beta / x0**2
    return DoubleWellSpec(alpha=alpha, beta=beta, mass=mass,
                          half_width=2.5 * x0, points=2400)


def _solve_levels(spec: DoubleWellSpec, points: int, count: int):
    x = np.linspace(-spec.half_width, spec.half_width, points)
    dx = x[1] - x[0]
    v = spec.alpha * x**4 - 2.0 * spec.beta * x**2 + spec.barrier_height
    kin = HBAR**2 / (2.0 * spec.mass * dx**2)
    diag = 2.0 * kin + v
    off = np.full(points - 1, -kin)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    return vals, vecs, x


def double_well_splittings(spec: DoubleWellSpec, levels: int = 6,
                           convergence: float = 0.01):
    """Lowest tunneling doublets: [(mean energy J, splitting rate 1/s), ...].

    Solves the stationary problem by second-order finite differences and
    verifies grid convergence by doubling the point count (GridTooCoarse if
    any splitting moves by more than ``convergence`` relatively).  Splittings
    below ~1e-9 of the level energy sit at the double-precision noise floor
    of the eigensolver; they are returned as computed but exempt from the
    convergence certificate.
    """
    _require_positive(alpha=spec.alpha, beta=spec.beta, mass=spec.mass,
                      half_width=spec.half_width)
    count = 2 * levels
    vals, _, _ = _solve_levels(spec, spec.points, count)
    vals2, _, _ = _solve_levels(spec, 2 * spec.points, count)

    def doublets(v):
        return [(0.5 * (v[2 * i] + v[2 * i + 1]), (v[2 * i + 1] - v[2 * i]) / HBAR)
                for i in range(levels)]

    d1, d2 = doublets(vals), doublets(vals2)
    for (energy, s1), (_, s2) in zip(d1, d2):
        if abs(s2) * HBAR < 1e-9 * abs(energy):
            continue
        if abs(s1 - s2) / abs(s2) > convergence:
            raise GridTooCoarse(
                f"splitting changed by {abs(s1 - s2) / abs(s2):.1%} on grid doubling"
            )
    return d2


def eigensolver_residual(spec: DoubleWellSpec, level: int = 0) -> float:
    """||H psi - E psi|| / ||psi|| on the grid, for diagnostics/tests."""
    vals, vecs, x = _solve_levels(spec, spec.points, level + 1)
    dx = x[1] - x[0]
    v = spec.alpha * x**4 - 2.0 * spec.beta * x**2 + spec.barrier_height
    kin = HBAR**2 / (2.0 * spec.mass * dx**2)
    psi = vecs[:, level]
    hpsi = (2.0 * kin + v) * psi
    hpsi[:-1] -= kin * psi[1:]
    hpsi[1:] -= kin * psi[:-1]
    return float(np.linalg.norm(hpsi - vals[level] * psi) / np.linalg.norm(psi))


def patch_clamp_feasibility(
    pipette_capacitance: float = 1e-13,      # F
    pipette_resistance: float | None = None,  # ohm; bound computed if absent
    membrane_capacitance: float | None = None,  # F; from density*area if absent
    delta_v: float = 0.315,                  # V
    rise_time: float = 1e-8,                 # s
    target_tau: float = 5e-9,                # s
    membrane_capacitance_density: float = 1e-2,  # F/m^2 (1 uF/cm^2)
    tip_diameter: float = 1e-6,              # m
) -> dict:
    """RC feasibility numbers for driving a membrane patch at ~100 MHz."""
    _require_positive(pipette_capacitance=pipette_capacitance, delta_v=delta_v,
                      rise_time=rise_time, target_tau=target_tau,
                      membrane_capacitance_density=membrane_capacitance_density,
                      tip_diameter=tip_diameter)
    if membrane_capacitance is None:
        area = math.pi * (tip_diameter / 2.0) ** 2
        membrane_capacitance = membrane_capacitance_density * area
    max_rp = target_tau / membrane_capacitance
    report = {
        "membrane_capacitance_F": membrane_capacitance,
        "max_pipette_resistance_ohm": max_rp,
        "capacitive_current_A": pipette_capacitance * delta_v / rise_time,
        "target_tau_s": target_tau,
    }
    if pipette_resistance is not None:
        _require_positive(pipette_resistance=pipette_resistance)
        report["tau_s"] = membrane_capacitance * pipette_resistance
    return report
