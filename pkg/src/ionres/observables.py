"""Coherence quantification, resonance extraction and the coherence-current fit."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import kernel

__all__ = [
    "InsufficientResolution",
    "DegenerateFit",
    "Resonance",
    "ResonanceReport",
    "FitResult",
    "incoherence",
    "locate_resonances",
    "fit_incoherence_vs_current",
]


class InsufficientResolution(ValueError):
    pass


class DegenerateFit(ValueError):
    pass


def incoherence(rho: np.ndarray) -> float:
    """sum_{k != l} |rho_kk rho_ll - rho_kl rho_lk| over the full basis.

    Vanishes for pure states; equals (d-1)/d for the maximally mixed state.
    """
    return kernel.incoherence(np.asarray(rho, dtype=complex))


@dataclass(frozen=True)
class Resonance:
    predicted: float     # Bessel-zero position in amplitude/omega units
    located: float       # grid position of the local minimum
    minimum: float       # current at the minimum
    shoulder: float      # mean of the two adjacent local maxima
    depth: float         # 1 - minimum/shoulder, clipped to [0, 1]


@dataclass(frozen=True)
class ResonanceReport:
    gamma: float
    resonances: tuple[Resonance, ...]

    def to_json(self) -> str:
        return json.dumps(
            {"gamma": self.gamma, "resonances": [asdict(r) for r in self.resonances]},
            indent=2,
        )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _local_max_outward(y, start, direction):
    """First local maximum of y walking from ``start`` in ``direction``."""
    i = start
    n = len(y)
    while True:
        j = i + direction
        if j < 0 or j >= n or y[j] < y[i]:
            return y[i]
        i = j


def locate_resonances(curve, predicted, gamma: float = 0.0,
                      min_points: int = 5) -> ResonanceReport:
    """Find, for each predicted zero, the local conduction minimum nearby.

    ``curve`` is a sorted list of (x, I) points with x = amplitude/omega.
    The search window around each predicted zero extends half the spacing
    to the neighbouring predicted zeros; the depth is measured against the
    average of the adjacent local maxima (the shoulders).
    """
    xs = np.asarray([p[0] for p in curve], dtype=float)
    ys = np.asarray([p[1] for p in curve], dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise ValueError("curve must be sorted and strictly increasing in x")
    predicted = sorted(float(z) for z in predicted)
    found = []
    for idx, z in enumerate(predicted):
        if z < xs[0] or z > xs[-1]:
            continue
        gaps = []
        if idx > 0:
            gaps.append(z - predicted[idx - 1])
        if idx < len(predicted) - 1:
            gaps.append(predicted[idx + 1] - z)
        half = 0.5 * min(gaps) if gaps else (xs[-1] - xs[0]) / 4.0
        window = (xs >= z - half) & (xs <= z + half)
        if window.sum() < min_points:
            raise InsufficientResolution(
                f"only {int(window.sum())} points within {half:.3g} of predicted zero {z:.6g}"
            )
        w_idx = np.nonzero(window)[0]
        i_min = w_idx[np.argmin(ys[w_idx])]
        interior = 0 < i_min < len(ys) - 1 and ys[i_min - 1] > ys[i_min] < ys[i_min + 1]
        if not interior:
            # No dip aligned with this zero (flat or monotone neighbourhood).
            found.append(Resonance(
                predicted=z, located=float(xs[i_min]), minimum=float(ys[i_min]),
                shoulder=float(ys[i_min]), depth=0.0,
            ))
            continue
        left = _local_max_outward(ys, i_min, -1)
        right = _local_max_outward(ys, i_min, +1)
        shoulder = 0.5 * (left + right)
        depth = 0.0 if shoulder <= 0 else min(max(1.0 - ys[i_min] / shoulder, 0.0), 1.0)
        found.append(Resonance(
            predicted=z, located=float(xs[i_min]), minimum=float(ys[i_min]),
            shoulder=float(shoulder), depth=float(depth),
        ))
    return ResonanceReport(gamma=gamma, resonances=tuple(found))


def fit_incoherence_vs_current(points) -> FitResult:
    """Ordinary least squares line through (current, incoherence) points."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    x = np.asarray([p[0] for p in pts], dtype=float)
    y = np.asarray([p[1] for p in pts], dtype=float)
    if np.ptp(x) == 0:
        raise DegenerateFit("all abscissae identical")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(slope=float(slope), intercept=float(intercept),
                     r_squared=float(min(max(r2, 0.0), 1.0)))
