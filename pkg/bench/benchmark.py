#!/usr/bin/env python3
"""Compiled-kernel vs pure-Python-kernel benchmark.

Runs the same driven dissipative propagation through both integrate_interval
implementations and reports wall time plus the relative state difference.

    python3 bench/benchmark.py [--sites 3] [--periods 20]
"""

import argparse
import importlib
import time

import numpy as np

from ionres import _core_py
from ionres.generators import assemble_generator
from ionres.model import (
    BathSpec,
    ChainSpec,
    DriveSpec,
    IntegratorSpec,
    SimulationSpec,
    vacuum_state,
)


def build_spec(n_sites: int) -> SimulationSpec:
    omega = 2e8
    return SimulationSpec(
        chain=ChainSpec(n_sites, hopping=5e7, onsite_base=8 * omega,
                        dephasing=1e6),
        drive=DriveSpec(12.5 * omega, omega),
        baths=BathSpec(1e7, 1e7, n_source=1.0, n_drain=0.0),
        integrator=IntegratorSpec(),
    )


def run(mod, spec: SimulationSpec, periods: int):
    parts = assemble_generator(spec)
    rho = vacuum_state(spec.chain.n_sites)
    period = spec.drive.period
    t0 = time.perf_counter()
    out = mod.integrate_interval(
        parts.plan, rho, 0.0, periods * period,
        spec.integrator.rel_tol, spec.integrator.abs_tol,
        period / 40.0, period / 160.0, 0.0, False, 1e-8,
    )
    elapsed = time.perf_counter() - t0
    assert out[0] == 0, f"kernel returned status {out[0]}"
    return rho, elapsed, out[2]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sites", type=int, default=3)
    parser.add_argument("--periods", type=int, default=20)
    args = parser.parse_args()

    spec = build_spec(args.sites)
    print(f"chain: {args.sites} sites (dim {spec.chain.dim}), "
          f"{args.periods} drive periods")

    rho_py, t_py, steps_py = run(_core_py, spec, args.periods)
    print(f"python   backend: {t_py:8.3f} s  ({steps_py} steps)")

    if importlib.util.find_spec("ionres._core") is None:
        print("compiled backend not built; skipping comparison")
        return

    from ionres import _core
    rho_c, t_c, steps_c = run(_core, spec, args.periods)
    diff = np.max(np.abs(rho_c - rho_py)) / np.max(np.abs(rho_py))
    print(f"compiled backend: {t_c:8.3f} s  ({steps_c} steps)")
    print(f"speedup: {t_py / t_c:.1f}x   max relative state diff: {diff:.2e}")


if __name__ == "__main__":
    main()
