"""Domain types, units policy and validation for chain-transport simulations.

Units: every model-frame rate and energy is an angular frequency in rad/s
(hbar = 1).  Site 1 couples to the source, site N to the drain.  Basis
states of the full 2**N occupation space are indexed by the big-endian bit
string of site occupations (site 1 is the most significant bit).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "ChainSpec",
    "DriveSpec",
    "BathSpec",
    "IntegratorSpec",
    "SimulationSpec",
    "ValidationError",
    "ConfigError",
    "validate",
    "vacuum_state",
    "maximally_mixed_state",
    "check_density_matrix",
    "occupation_bit",
    "site_weight_vector",
    "site_population_mask",
    "parse_config_text",
    "load_config",
    "spec_from_config",
    "apply_overrides",
]

WAVEFORMS = ("cosine", "square_coupling")
FRAMES = ("lab", "rotating")

# Hermiticity / trace / positivity tolerances for density matrices.
HERM_TOL = 1e-12
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9


class ValidationError(ValueError):
    """Raised by :func:`validate`; collects every violated invariant.

    ``violations`` is a list of ``(code, message)`` pairs with codes such as
    ``EmptyChain``, ``NegativeRate``, ``LengthMismatch``,
    ``NonpositiveFrequency``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{code}: {msg}" for code, msg in self.violations)
        super().__init__(f"invalid simulation spec ({lines})")


class ConfigError(ValueError):
    """Raised for malformed config files; carries a line number when known."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ChainSpec:
    """Static chain parameters: N sites, N-1 bonds.

    hopping rates, the base on-site frequency, per-site dephasing rates and
    per-bond thermal hopping rates are all in rad/s (1/s for the rates).
    """

    n_sites: int
    hopping: tuple[float, ...]
    onsite_base: float
    dephasing: tuple[float, ...]
    thermal: tuple[float, ...]

    def __init__(self, n_sites, hopping, onsite_base, dephasing=None, thermal=None):
        n = int(n_sites)
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "hopping", _as_tuple(hopping, max(n - 1, 0)))
        object.__setattr__(self, "onsite_base", float(onsite_base))
        object.__setattr__(
            self, "dephasing", _as_tuple(0.0 if dephasing is None else dephasing, n)
        )
        object.__setattr__(
            self, "thermal", _as_tuple(0.0 if thermal is None else thermal, max(n - 1, 0))
        )

    @property
    def dim(self) -> int:
        return 1 << self.n_sites


@dataclass(frozen=True)
class DriveSpec:
    """Periodic drive: amplitude and angular frequency in rad/s.

    The ``cosine`` waveform modulates the on-site energies as
    (onsite_base + amplitude*cos(omega*t)) * k on site k; ``square_coupling``
    instead switches bond k on/off as (c/2)*[1 + sgn(sin(omega*t + k*pi))]
    with no on-site term.
    """

    amplitude: float
    angular_frequency: float
    waveform: str = "cosine"

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.angular_frequency


@dataclass(frozen=True)
class BathSpec:
    """Source/drain coupling rates (1/s) and dimensionless occupations."""

    gamma_source: float
    gamma_drain: float
    n_source: float = 1.0
    n_drain: float = 0.0


@dataclass(frozen=True)
class IntegratorSpec:
    """Adaptive-RK settings and the steady-state convergence rule."""

    rel_tol: float = 1e-7
    abs_tol: float = 1e-10
    max_step: float = np.inf
    frame: str = "lab"
    steady_state_rel_change: float = 1e-4
    max_periods: int = 10_000
    fixed_step: float | None = None  # reproducibility studies only


@dataclass(frozen=True)
class SimulationSpec:
    chain: ChainSpec
    drive: DriveSpec
    baths: BathSpec
    integrator: IntegratorSpec = field(default_factory=IntegratorSpec)
    validated: bool = False


def _as_tuple(value, length: int) -> tuple[float, ...]:
    """Broadcast a scalar to ``length`` entries, or pass a sequence through."""
    if np.isscalar(value):
        return (float(value),) * length
    return tuple(float(v) for v in value)


def validate(spec: SimulationSpec) -> SimulationSpec:
    """Check every invariant; return the spec flagged as validated.

    All violations are collected and reported together.  Idempotent.
    """
    if spec.validated:
        return spec
    bad: list[tuple[str, str]] = []
    chain, drive, baths, integ = spec.chain, spec.drive, spec.baths, spec.integrator

    if chain.n_sites < 1:
        bad.append(("EmptyChain", f"n_sites = {chain.n_sites} < 1"))
    n = max(chain.n_sites, 1)
    if len(chain.hopping) != n - 1:
        bad.append(
            ("LengthMismatch", f"hopping has {len(chain.hopping)} entries, expected {n - 1}")
        )
    if len(chain.dephasing) != n:
        bad.append(
            ("LengthMismatch", f"dephasing has {len(chain.dephasing)} entries, expected {n}")
        )
    if len(chain.thermal) != n - 1:
        bad.append(
            ("LengthMismatch", f"thermal has {len(chain.thermal)} entries, expected {n - 1}")
        )

    for name, rates in (
        ("hopping", chain.hopping),
        ("dephasing", chain.dephasing),
        ("thermal", chain.thermal),
        ("gamma_source", (baths.gamma_source,)),
        ("gamma_drain", (baths.gamma_drain,)),
        ("n_source", (baths.n_source,)),
        ("n_drain", (baths.n_drain,)),
        ("amplitude", (drive.amplitude,)),
    ):
        for r in rates:
            if r < 0:
                bad.append(("NegativeRate", f"{name} contains negative value {r}"))
                break

    if not drive.angular_frequency > 0:
        bad.append(
            ("NonpositiveFrequency", f"angular_frequency = {drive.angular_frequency} <= 0")
        )
    if drive.waveform not in WAVEFORMS:
        bad.append(("UnknownWaveform", f"waveform {drive.waveform!r} not in {WAVEFORMS}"))

    if not integ.rel_tol > 0 or not integ.abs_tol > 0:
        bad.append(("NonpositiveTolerance", "rel_tol and abs_tol must be > 0"))
    if integ.frame not in FRAMES:
        bad.append(("UnknownFrame", f"frame {integ.frame!r} not in {FRAMES}"))

    if bad:
        raise ValidationError(bad)
    return replace(spec, validated=True)


# ---------------------------------------------------------------------------
# Density matrices in the 2**N occupation basis


def occupation_bit(basis_index: int, site: int, n_sites: int) -> int:
    """Occupation (0/1) of 1-based ``site`` in basis state ``basis_index``."""
    return (basis_index >> (n_sites - site)) & 1


def site_weight_vector(n_sites: int) -> np.ndarray:
    """w[b] = sum_k k * occ_k(b); diagonal of the drive coupling operator."""
    dim = 1 << n_sites
    w = np.zeros(dim)
    for b in range(dim):
        w[b] = sum(k * occupation_bit(b, k, n_sites) for k in range(1, n_sites + 1))
    return w


def site_population_mask(site: int, n_sites: int) -> np.ndarray:
    """Diagonal of the number operator of 1-based ``site``."""
    dim = 1 << n_sites
    return np.array([occupation_bit(b, site, n_sites) for b in range(dim)], dtype=float)


def vacuum_state(n_sites: int) -> np.ndarray:
    """All sites empty: pure basis state |00...0>."""
    dim = 1 << n_sites
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def maximally_mixed_state(n_sites: int) -> np.ndarray:
    dim = 1 << n_sites
    return np.eye(dim, dtype=complex) / dim


def check_density_matrix(rho: np.ndarray, *, herm_tol=HERM_TOL, trace_tol=TRACE_TOL,
                         pos_tol=POSITIVITY_TOL) -> None:
    """Raise ValueError unless rho is Hermitian, unit trace and positive."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace = {tr!r} deviates from 1 by more than {trace_tol}")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam_min < -pos_tol:
        raise ValueError(f"negative eigenvalue {lam_min:.3e}")


# ---------------------------------------------------------------------------
# Flat key=value config files


_LIST_KEYS = {"hopping", "dephasing", "thermal", "gamma_list"}
_STR_KEYS = {"waveform", "frame", "models", "output"}
_INT_KEYS = {"n_sites", "max_periods", "amp_points", "workers"}

KNOWN_KEYS = {
    # chain
    "n_sites", "hopping", "onsite_base", "dephasing", "thermal",
    # drive
    "amplitude", "angular_frequency", "waveform",
    # baths
    "gamma_source", "gamma_drain", "n_source", "n_drain",
    # integrator
    "rel_tol", "abs_tol", "max_step", "frame", "steady_state_rel_change",
    "max_periods",
    # sweep planning (consumed by the CLI layer)
    "amp_min", "amp_max", "amp_points", "gamma_list", "models", "output",
    "workers", "broadening",
}


def _parse_value(key: str, raw: str, line_no=None):
    raw = raw.strip()
    try:
        if key in _STR_KEYS:
            return raw
        if key in _LIST_KEYS:
            parts = [p for p in raw.split(",") if p.strip()]
            vals = tuple(float(p) for p in parts)
            return vals
        if key in _INT_KEYS:
            return int(raw)
        if "," in raw:
            return tuple(float(p) for p in raw.split(",") if p.strip())
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse value for {key!r}: {raw!r}", line_no) from exc


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment; lists use commas."""
    out: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected key=value, got {stripped!r}", line_no)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", line_no)
        out[key] = _parse_value(key, raw, line_no)
    return out


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text())


def apply_overrides(config: dict, overrides: Sequence[str]) -> dict:
    """Apply ``key=value`` strings (the CLI --set flag) on top of a config."""
    merged = dict(config)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        merged[key] = _parse_value(key, raw)
    return merged


def spec_from_config(config: dict) -> SimulationSpec:
    """Build and validate a SimulationSpec from a parsed config mapping."""
    missing = [k for k in ("n_sites", "angular_frequency") if k not in config]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    n = int(config["n_sites"])
    chain = ChainSpec(
        n_sites=n,
        hopping=config.get("hopping", 0.0),
        onsite_base=config.get("onsite_base", 0.0),
        dephasing=config.get("dephasing", 0.0),
        thermal=config.get("thermal", 0.0),
    )
    drive = DriveSpec(
        amplitude=float(config.get("amplitude", 0.0)),
        angular_frequency=float(config["angular_frequency"]),
        waveform=config.get("waveform", "cosine"),
    )
    baths = BathSpec(
        gamma_source=float(config.get("gamma_source", 0.0)),
        gamma_drain=float(config.get("gamma_drain", 0.0)),
        n_source=float(config.get("n_source", 1.0)),
        n_drain=float(config.get("n_drain", 0.0)),
    )
    integ = IntegratorSpec(
        rel_tol=float(config.get("rel_tol", 1e-7)),
        abs_tol=float(config.get("abs_tol", 1e-10)),
        max_step=float(config.get("max_step", np.inf)),
        frame=config.get("frame", "lab"),
        steady_state_rel_change=float(config.get("steady_state_rel_change", 1e-4)),
        max_periods=int(config.get("max_periods", 10_000)),
    )
    return validate(SimulationSpec(chain, drive, baths, integ))
