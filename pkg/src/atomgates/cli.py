"""Command-line entry point: ``atomgates {optimize,gradcheck,fringe,export-bloch}``.

Exit codes: 0 converged/ok, 1 usage or config error, 2 quality failure
(no convergence, gradient tolerance exceeded), 3 numerical abort.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from atomgates import io
from atomgates.cost import (
    GateKind,
    SingularOriginError,
    analytic_gradient,
    finite_difference_gradient,
    gradient_relative_error,
    random_train,
)
from atomgates.interferometer import MzSequence, fringe_scan, phase_grid
from atomgates.optimizer import ConfigError, record_bloch_trajectories, run_sequential_sgd

log = logging.getLogger("atomgates")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_QUALITY = 2
EXIT_NUMERICAL = 3

GRADIENT_TOLERANCE = 1e-6


class UsageError(Exception):
    pass


def _resolve(out_dir: Path, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else out_dir / p


def cmd_optimize(args) -> int:
    spec = io.parse_config(args.config, force_phase=args.force_phase)
    cfg = spec.config
    if args.max_steps is not None:
        cfg = replace(cfg, max_steps=args.max_steps)
    stem = Path(args.config).name.split(".")[0]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = {
        "record_path": f"{stem}_record.json",
        "pulses_csv": f"{stem}_pulses.csv",
        "fidelity_csv": f"{stem}_fidelity.csv",
        "bloch_csv": f"{stem}_bloch.csv",
    }
    names.update(spec.outputs)
    paths = {key: _resolve(out_dir, name) for key, name in names.items()}

    try:
        record = run_sequential_sgd(cfg)
    except SingularOriginError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    io.write_record(paths["record_path"], record)
    io.write_pulses_csv(paths["pulses_csv"], record)
    io.write_fidelity_csv(paths["fidelity_csv"], record)
    io.write_bloch_csv(paths["bloch_csv"], record)
    if args.figures:
        from atomgates.plotting import plot_run

        plot_run(record, paths["record_path"].with_suffix(".png"))

    fin = record.final
    status = "converged" if record.converged else "not converged"
    print(f"target: {cfg.target.value}")
    print(f"status: {status} after {record.steps_used} steps (max {cfg.max_steps})")
    print(f"f_trace: {fin.f_trace:.6f}  f_squared: {fin.f_squared:.6f}  cost: {fin.cost:.3e}")
    print(f"f_trace (time-ordered product): {record.f_trace_product:.6f}")
    print("final unitary:")
    for row in record.final_unitary:
        print("  " + "  ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in row))
    print(f"record: {paths['record_path']}")
    return EXIT_OK if record.converged else EXIT_QUALITY


def gradcheck(targets, dt: float, trials: int, seed: int):
    """Worst analytic-vs-finite-difference relative error per target."""
    rng = np.random.default_rng(seed)
    worst = {}
    for target in targets:
        worst[target] = (-1.0, None, None, None)
        for _ in range(trials):
            train = random_train(rng, dt)
            k = len(train) - 1
            a = analytic_gradient(target, train, k)
            n = finite_difference_gradient(target, train, k)
            err = gradient_relative_error(a, n)
            if err > worst[target][0]:
                worst[target] = (err, train, a, n)
    return worst


def cmd_gradcheck(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.config:
        cfg = io.parse_config(args.config, force_phase=args.force_phase).config
        targets, dt = [cfg.target], cfg.dt
    else:
        targets, dt = list(GateKind), 1e-6
    worst = gradcheck(targets, dt, args.trials, args.seed)
    ok = True
    for target, (err, train, a, n) in worst.items():
        passed = err <= GRADIENT_TOLERANCE
        ok &= passed
        print(f"{target.value}: trials={args.trials} seed={args.seed} max_rel_error={err:.3e} "
              f"{'PASS' if passed else 'FAIL'}")
        if not passed:
            print(f"  worst case: dt={train.dt!r} phi={train.phi!r}")
            print(f"  omegas={list(train.omegas)!r}")
            print(f"  deltas={list(train.deltas)!r}")
            print(f"  analytic={tuple(a)!r} finite_difference={tuple(n)!r}")
    return EXIT_OK if ok else EXIT_QUALITY


def cmd_fringe(args) -> int:
    if args.grid < 1:
        raise UsageError("--grid must be at least 1")
    if args.ideal:
        template = MzSequence.ideal()
    else:
        if not (args.bs_record and args.mirror_record):
            raise UsageError("fringe needs --bs-record and --mirror-record, or --ideal")
        gates = {}
        for key, path in (("bs", args.bs_record), ("mirror", args.mirror_record)):
            try:
                gates[key] = io.read_record(path).final_unitary
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        try:
            template = MzSequence(gates["bs"], gates["mirror"])
        except ValueError as exc:
            raise ConfigError(f"invalid gate in record: {exc}") from exc
    scan = fringe_scan(template, phase_grid(args.grid))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    io.write_table(out, ("phi", "p_transfer"), zip(scan.phases, scan.transfer_probabilities))
    if args.figures:
        from atomgates.plotting import plot_fringe

        plot_fringe(scan, out.with_suffix(".png"))
    print(f"visibility: {scan.visibility:.12f}")
    print(f"fringe: {out}")
    return EXIT_OK


def cmd_export_bloch(args) -> int:
    try:
        record = io.read_record(args.record)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    record.bloch_trajectories = {}
    record_bloch_trajectories(record)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    io.write_bloch_csv(out, record)
    if args.figures:
        from atomgates.plotting import plot_run

        plot_run(record, out.with_suffix(".png"))
    for label, traj in record.bloch_trajectories.items():
        x, y, z = traj[-1]
        print(f"{label}: final bloch ({x:+.4f}, {y:+.4f}, {z:+.4f})")
    print(f"bloch: {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomgates", description="Pulse synthesis for atom-interferometer gates.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run the sequential optimizer from a config file")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out-dir", default=".", type=Path)
    p.add_argument("--max-steps", type=int, help="override max_steps from the config")
    p.add_argument("--force-phase", action="store_true", help="accept phi on an odd multiple of pi/2")
    p.add_argument("--figures", action="store_true", help="also render a PNG summary next to the record")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("gradcheck", help="compare analytic gradients against central differences")
    p.add_argument("--config", type=Path)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force-phase", action="store_true")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("fringe", help="scan the Mach-Zehnder fringe")
    p.add_argument("--bs-record", type=Path)
    p.add_argument("--mirror-record", type=Path)
    p.add_argument("--ideal", action="store_true", help="use exact gates instead of records")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--out", type=Path, default=Path("fringe.csv"))
    p.add_argument("--figures", action="store_true")
    p.set_defaults(func=cmd_fringe)

    p = sub.add_parser("export-bloch", help="write Bloch trajectories of a stored run")
    p.add_argument("--record", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path("bloch.csv"))
    p.add_argument("--figures", action="store_true")
    p.set_defaults(func=cmd_export_bloch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
