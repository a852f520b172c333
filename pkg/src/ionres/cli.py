"""Command-line front end.

Subcommands: simulate, current, sweep, baseline, estimate, bessel.
Exit codes: 0 success, 1 usage/config error, 2 a sweep point failed to
converge.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import estimates
from .baseline import classical_current
from .bessel import bessel_first_zeros
from .model import (
    ConfigError,
    ValidationError,
    apply_overrides,
    load_config,
    spec_from_config,
)
from .propagator import export_trajectory_csv, propagate, steady_current
from .sweep import SweepPlan, default_workers, run_sweep

__all__ = ["main", "cli_main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 (not argparse's default 2) per contract
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ionres", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="key=value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key")
        p.add_argument("--out", default=None, help="output path")
        p.add_argument("--json", action="store_true", help="emit JSON")

    p = sub.add_parser("simulate", help="propagate one trajectory")
    add_common(p)
    p.add_argument("--horizon", type=float, default=None,
                   help="integration horizon in seconds (default 10 drive periods)")
    p.add_argument("--sampling", type=float, default=None,
                   help="sample interval in seconds (default period/20)")

    p = sub.add_parser("current", help="one steady current")
    add_common(p)

    p = sub.add_parser("sweep", help="amplitude x dephasing sweep")
    add_common(p)
    p.add_argument("--workers", type=int, default=None,
                   help="process count (default IONRES_WORKERS or cpu count)")

    p = sub.add_parser("baseline", help="classical rate-model current")
    add_common(p)

    p = sub.add_parser("estimate", help="order-of-magnitude physics report")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bessel", help="print Bessel-function zeros")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    return parser


def _load_spec(args):
    config = load_config(args.config)
    config = apply_overrides(config, args.set)
    return config, spec_from_config(config)


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        return _dispatch(args)
    except (ConfigError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "bessel":
        for z in bessel_first_zeros(args.order, args.count):
            print(f"{z:.6f}")
        return 0

    if args.command == "estimate":
        return _run_estimate(args)

    config, spec = _load_spec(args)

    if args.command == "simulate":
        horizon = args.horizon if args.horizon else 10.0 * spec.drive.period
        traj = propagate(spec, horizon=horizon, sampling=args.sampling)
        if args.out:
            export_trajectory_csv(traj, args.out)
        summary = {
            "samples": len(traj.times),
            "final_populations": [float(p) for p in traj.populations[-1]],
            "p_sink_final": float(traj.p_sink[-1]),
        }
        print(json.dumps(summary, indent=2) if args.json else
              f"p_sink({horizon:.4g} s) = {traj.p_sink[-1]:.6g}")
        return 0

    if args.command == "current":
        res = steady_current(spec)
        if args.json:
            print(json.dumps({
                "current": res.current, "converged": res.converged,
                "periods_used": res.periods_used,
                "rel_change_last": res.rel_change_last,
                "incoherence_avg": res.incoherence_avg,
            }, indent=2))
        else:
            print(f"{res.current:.10g}")
        return 0 if res.converged else 2

    if args.command == "baseline":
        res = classical_current(spec, broadening=config.get("broadening"))
        print(json.dumps({"current": res.current, "converged": res.converged},
                         indent=2) if args.json else f"{res.current:.10g}")
        return 0 if res.converged else 2

    if args.command == "sweep":
        missing = [k for k in ("amp_min", "amp_max", "amp_points") if k not in config]
        if missing:
            raise ConfigError(f"sweep needs keys: {', '.join(missing)}")
        workers = args.workers if args.workers else int(config.get("workers", 0)) or default_workers()
        plan = SweepPlan(
            base=spec,
            amp_min=float(config["amp_min"]),
            amp_max=float(config["amp_max"]),
            amp_points=int(config["amp_points"]),
            gamma_list=tuple(config.get("gamma_list", (0.0,))),
            models=config.get("models", "quantum"),
            output=args.out or config.get("output"),
            workers=workers,
            broadening=config.get("broadening"),
        )
        result = run_sweep(plan)
        n_bad = sum(1 for r in result.rows if not r.converged)
        print(f"{len(result.rows)} points, {n_bad} unconverged, "
              f"{len(result.predicted_zeros)} predicted zeros in range")
        if result.fit:
            print(f"coherence fit: R^2 = {result.fit.r_squared:.4f}")
        return 0 if n_bad == 0 else 2

    raise AssertionError(f"unhandled command {args.command}")


def _run_estimate(args) -> int:
    kbt = estimates.K_BOLTZMANN * estimates.ROOM_T
    p_tun, rate = estimates.tunneling_probability(
        estimates.POTASSIUM_MASS, 1.5 * kbt, 0.24e-9, attempt_frequency=1e12)
    well = estimates.default_double_well()
    doublets = estimates.double_well_splittings(well)
    patch = estimates.patch_clamp_feasibility()
    report = {
        "de_broglie_m": estimates.de_broglie(estimates.POTASSIUM_MASS, 2e-21),
        "tunneling_probability": p_tun,
        "tunneling_rate_per_s": rate,
        "double_well_doublets": [
            {"energy_J": e, "splitting_rate_per_s": s} for e, s in doublets
        ],
        **patch,
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(f"de Broglie wavelength (K+, 2e-21 J):  {report['de_broglie_m']:.3e} m")
        print(f"tunneling probability (single try):   {p_tun:.3e}")
        print(f"tunneling rate at 1e12 Hz attempts:   {rate:.3e} 1/s")
        for i, (e, s) in enumerate(doublets):
            print(f"double-well doublet {i}: E = {e:.3e} J, splitting {s:.3e} 1/s")
        print(f"membrane capacitance:                 {patch['membrane_capacitance_F']:.3e} F")
        print(f"max pipette resistance (tau 5 ns):    {patch['max_pipette_resistance_ohm']:.3e} ohm")
        print(f"capacitive current:                   {patch['capacitive_current_A']:.3e} A")
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
