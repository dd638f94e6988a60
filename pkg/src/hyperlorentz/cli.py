"""Command line front end.

    hyperlorentz <experiment> --sigma F --r F[,F...] --t F --samples N
                 --seed N --workers N --out DIR
    hyperlorentz export --model halfplane|disk --seed N --out FILE
                 [--sigma F --r F --t F]

Exit codes: 0 success, 2 validation error, 3 runtime error.  The default
worker count may be overridden with the HYPERLORENTZ_WORKERS environment
variable; everything else is flags only.
"""

from __future__ import annotations

import argparse
import os
import sys

from .billiard import simulate
from .errors import ValidationError
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    export_trajectory,
    lambda_for,
    run_experiment,
)
from .experiments import _START, _TAG_EXPORT, _derive_rng
from .obstacles import sample_field


def _r_levels(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def _default_workers() -> int:
    env = os.environ.get("HYPERLORENTZ_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sigma", type=float, default=1.0, help="collision rate (default 1.0)")
    p.add_argument(
        "--r",
        dest="r_levels",
        type=_r_levels,
        default=(0.5,),
        metavar="F[,F...]",
        help="obstacle radius level(s) (default 0.5)",
    )
    p.add_argument("--t", type=float, default=2.0, help="time horizon (default 2.0)")
    p.add_argument("--samples", type=int, default=1000, help="replica count (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    p.add_argument(
        "--workers",
        type=int,
        default=_default_workers(),
        help="worker process count (default 1, or HYPERLORENTZ_WORKERS)",
    )
    p.add_argument("--out", default="hyperlorentz-out", help="output directory")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperlorentz",
        description="Monte Carlo experiments for geodesic billiards among Poisson disk obstacles",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        _add_common(sub.add_parser(name, help=f"run the {name} experiment"))
    pe = sub.add_parser("export", help="simulate one billiard trajectory and write it as CSV")
    pe.add_argument("--model", choices=("halfplane", "disk"), default="halfplane")
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--out", required=True, help="destination CSV file")
    pe.add_argument("--sigma", type=float, default=1.0)
    pe.add_argument("--r", type=float, default=0.5)
    pe.add_argument("--t", type=float, default=5.0)
    return parser


def _run_export(args: argparse.Namespace) -> None:
    if args.r <= 0.0 or args.sigma <= 0.0 or args.t <= 0.0:
        raise ValidationError("sigma, r and t must all be positive")
    lam = lambda_for(args.sigma, args.r)
    rng = _derive_rng(args.seed, _TAG_EXPORT, 0, 0)
    field = sample_field(lam, _START.point, args.t + args.r, args.r, rng)
    traj = simulate(_START, field, args.t)
    dest = export_trajectory(traj, args.model, args.out)
    print(f"wrote {dest} ({len(traj.events)} collision events, model={args.model})")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "export":
            _run_export(args)
        else:
            cfg = ExperimentConfig(
                experiment=args.command,
                sigma=args.sigma,
                r_levels=args.r_levels,
                t=args.t,
                samples=args.samples,
                seed=args.seed,
                workers=args.workers,
                output_dir=args.out,
            )
            report = run_experiment(cfg)
            print(f"{report.experiment}: seed={report.seed} elapsed={report.elapsed_s:.2f}s")
            for s in report.levels:
                tag = f"r={s.r:g} " if s.r is not None else ""
                hw = f" +/-{s.half_width:.3g}" if s.half_width is not None else ""
                print(f"  {tag}{s.stat_name} = {s.value:.6g}{hw} (n={s.n})")
            print(f"report written to {cfg.output_dir}/report.json")
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: runaway loops, I/O, ...
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
