"""Parameter sweeps over drive amplitude and dephasing, with deterministic
CSV/JSON emission and optional process parallelism.

Rows are always emitted in (model, gamma, amplitude) order regardless of
worker scheduling, so output bytes are independent of the worker count.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from multiprocessing import Pool

import numpy as np

from .baseline import classical_current
from .bessel import bessel_first_zeros
from .model import ChainSpec, DriveSpec, SimulationSpec, validate
from .observables import (
    FitResult,
    ResonanceReport,
    fit_incoherence_vs_current,
    locate_resonances,
)
from .propagator import steady_current

__all__ = ["SweepPlan", "SweepRow", "SweepResult", "run_sweep", "CSV_HEADER",
           "predicted_zeros_in_range", "write_rows_csv", "read_rows_csv"]

CSV_HEADER = "omega1_over_omega,gamma,model,current,converged,periods,incoherence"


@dataclass(frozen=True)
class SweepPlan:
    base: SimulationSpec
    amp_min: float            # in amplitude/omega units
    amp_max: float
    amp_points: int
    gamma_list: tuple[float, ...]
    models: str = "quantum"   # quantum | classical | both
    output: str | None = None
    workers: int = 1
    broadening: float | None = None
    # Insert the predicted Bessel zeros as grid points so the narrow minima
    # cannot fall between uniform grid samples.
    include_zeros: bool = True

    def grid(self) -> np.ndarray:
        if not (self.amp_min < self.amp_max and self.amp_points >= 2):
            raise ValueError("need amp_min < amp_max and amp_points >= 2")
        return np.linspace(self.amp_min, self.amp_max, self.amp_points)

    def model_list(self) -> list[str]:
        if self.models == "both":
            return ["quantum", "classical"]
        if self.models in ("quantum", "classical"):
            return [self.models]
        raise ValueError(f"unknown models selector {self.models!r}")


@dataclass(frozen=True)
class SweepRow:
    omega1_over_omega: float
    gamma: float
    model: str
    current: float
    converged: bool
    periods: int
    incoherence: float  # NaN for classical rows

    def to_csv(self) -> str:
        coh = "" if np.isnan(self.incoherence) else f"{self.incoherence:.10g}"
        return (
            f"{self.omega1_over_omega:.10g},{self.gamma:.10g},{self.model},"
            f"{self.current:.10g},{str(self.converged).lower()},{self.periods},{coh}"
        )


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    reports: tuple[ResonanceReport, ...]
    fit: FitResult | None
    predicted_zeros: tuple[float, ...]

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)


def _spec_at(base: SimulationSpec, gamma: float, x: float) -> SimulationSpec:
    chain = ChainSpec(
        n_sites=base.chain.n_sites,
        hopping=base.chain.hopping,
        onsite_base=base.chain.onsite_base,
        dephasing=gamma,
        thermal=base.chain.thermal,
    )
    drive = DriveSpec(
        amplitude=x * base.drive.angular_frequency,
        angular_frequency=base.drive.angular_frequency,
        waveform=base.drive.waveform,
    )
    return validate(replace(base, chain=chain, drive=drive, validated=False))


def _run_point(task) -> SweepRow:
    base, model, gamma, x, broadening = task
    spec = _spec_at(base, gamma, x)
    if model == "quantum":
        res = steady_current(spec)
        coh = res.incoherence_avg
    else:
        res = classical_current(spec, broadening=broadening)
        coh = float("nan")
    return SweepRow(
        omega1_over_omega=x, gamma=gamma, model=model, current=res.current,
        converged=res.converged, periods=res.periods_used, incoherence=coh,
    )


def predicted_zeros_in_range(spec: SimulationSpec, amp_min: float, amp_max: float):
    """Bessel zeros of order onsite_base/omega falling inside the sweep range."""
    ratio = spec.chain.onsite_base / spec.drive.angular_frequency
    order = round(ratio)
    if abs(ratio - order) > 1e-6 or order < 0:
        return ()
    zeros = []
    count = 4
    while True:
        zs = bessel_first_zeros(order, count)
        zeros = [z for z in zs if amp_min <= z <= amp_max]
        if zs[-1] > amp_max or count > 256:
            return tuple(zeros)
        count *= 2


def default_workers() -> int:
    env = os.environ.get("IONRES_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def run_sweep(plan: SweepPlan) -> SweepResult:
    """Execute every (model, gamma, amplitude) grid point; write CSV + JSON."""
    xs = plan.grid()
    zeros = predicted_zeros_in_range(plan.base, plan.amp_min, plan.amp_max)
    if plan.include_zeros and zeros:
        xs = np.unique(np.concatenate([xs, np.asarray(zeros)]))
    tasks = [
        (plan.base, model, gamma, float(x), plan.broadening)
        for model in plan.model_list()
        for gamma in plan.gamma_list
        for x in xs
    ]
    workers = min(plan.workers, len(tasks))
    if workers > 1:
        with Pool(workers) as pool:
            rows = pool.map(_run_point, tasks, chunksize=1)
    else:
        rows = [_run_point(t) for t in tasks]
    rows = tuple(rows)

    reports = []
    fit = None
    if zeros and "quantum" in plan.model_list():
        for gamma in plan.gamma_list:
            curve = [
                (r.omega1_over_omega, r.current)
                for r in rows
                if r.model == "quantum" and r.gamma == gamma
            ]
            reports.append(locate_resonances(curve, zeros, gamma=gamma))
        if len(plan.gamma_list) >= 3:
            points = []
            for gamma, report in zip(plan.gamma_list, reports):
                res = report.resonances[0]
                coh = _coherence_at(rows, gamma, res.located)
                points.append((res.minimum, coh))
            fit = fit_incoherence_vs_current(points)

    if plan.output:
        write_rows_csv(rows, plan.output)
        _write_reports_json(plan.output, reports, fit, zeros)
    return SweepResult(rows=rows, reports=tuple(reports), fit=fit,
                       predicted_zeros=zeros)


def _coherence_at(rows, gamma, x):
    for r in rows:
        if r.model == "quantum" and r.gamma == gamma and abs(r.omega1_over_omega - x) < 1e-12:
            return r.incoherence
    raise KeyError(f"no quantum row at gamma={gamma}, x={x}")


def write_rows_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")


def read_rows_csv(path) -> list[SweepRow]:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append(SweepRow(
                omega1_over_omega=float(parts[0]), gamma=float(parts[1]),
                model=parts[2], current=float(parts[3]),
                converged=parts[4] == "true", periods=int(parts[5]),
                incoherence=float(parts[6]) if parts[6] else float("nan"),
            ))
    return rows


def _write_reports_json(csv_path: str, reports, fit, zeros) -> None:
    payload = {
        "predicted_zeros": list(zeros),
        "resonances": [json.loads(r.to_json()) for r in reports],
        "coherence_fit": json.loads(fit.to_json()) if fit else None,
    }
    json_path = os.path.splitext(csv_path)[0] + ".resonances.json"
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2)
