"""Command line entry point: ``csit-dof {run,sweep,bound,schedule,lambda-star}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import schedule as sched
from .bounds import build_polytope, lambda_star, lambda_star_via_lp
from .errors import AuditFailure, ConfigError, CsitDofError
from .harness import (bound_summary, dumps_canonical, load_config, parse_lambda, run,
                      sweep_lambda)

EXIT_CONFIG = 2
EXIT_AUDIT = 3


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--M", type=int, help="transmit antennas")
    p.add_argument("--K", type=int, help="single-antenna users")
    p.add_argument("--schedule", help="cyclic_window, lee_heath, all_p, all_n or file:<path>")
    p.add_argument("--lambda-cap", dest="lambda_cap", type=parse_lambda)
    p.add_argument("--seed", type=int)
    p.add_argument("--snr", dest="snr_db", type=_float_list, help="comma-separated SNRs in dB")
    p.add_argument("--slots", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="output", help="output directory")
    p.add_argument("--tightened", action="store_true", default=None,
                   help="use min(M,K) as the leading bound coefficient")
    p.add_argument("--no-box", dest="box", action="store_false", default=None,
                   help="drop the d_k <= 1 constraints")


def _overrides(args) -> dict:
    keys = ("M", "K", "schedule", "lambda_cap", "seed", "snr_db", "slots", "trials",
            "workers", "output", "tightened", "box")
    return {k: getattr(args, k, None) for k in keys}


def cmd_run(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    result = run(cfg)
    r = result.report
    print(f"M={cfg.M} K={cfg.K} schedule={cfg.schedule} slots={cfg.slots} trials={cfg.trials}")
    for p in r.per_snr:
        print(f"  {p.snr_db:6.1f} dB  sum rate {p.sum_rate:9.4f} bits/slot")
    print(f"dof slope {r.dof_slope:.4f} +/- {r.slope_stderr:.4f}; "
          f"outer bound {result.bound.capped_max_sum:.4f} (raw {result.bound.raw_max_sum:.4f})")
    print(f"wrote {Path(cfg.output) / 'report.json'} and {Path(cfg.output) / 'rates.csv'}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, _overrides(args))
    lambdas = [parse_lambda(x) for x in args.lambdas.split(",") if x.strip()]
    result = sweep_lambda(cfg.M, cfg.K, lambdas, sim_on=not args.no_sim, cfg=cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    result.to_csv(out / "sweep.csv")
    (out / "sweep.json").write_text(dumps_canonical(result.to_dict()))
    for row in result.rows:
        slope = "-" if row.achieved_slope is None else f"{row.achieved_slope:.4f}"
        tag = " (heuristic)" if row.heuristic else ""
        print(f"lambda={row.lam:.4f} bound={row.outer_bound_capped:.4f} slope={slope} "
              f"{row.schedule_name or ''}{tag}")
    bad = result.violations()
    if bad:
        print(f"{len(bad)} row(s) exceed the outer bound", file=sys.stderr)
        return 1
    return 0


def cmd_bound(args) -> int:
    summary = bound_summary(args.M, args.K, args.lam, tightened=args.tightened, box=args.box)
    print(dumps_canonical(summary), end="")
    if args.export:
        poly = build_polytope(args.M, args.K, args.lam, tightened=args.tightened, box=args.box)
        Path(args.export).write_text(poly.to_json())
    return 0


def cmd_schedule(args) -> int:
    if args.kind == "cyclic_window":
        s = sched.cyclic_window(args.M, args.K, args.slots)
    elif args.kind == "window":
        s = sched.truncated_window(args.K, args.width, args.slots)
    elif args.kind == "lee_heath":
        s = sched.lee_heath_block(args.K, args.slots)
    elif args.kind == "all_p":
        s = sched.all_p(args.K, args.slots)
    else:
        s = sched.all_n(args.K, args.slots)
    if args.output:
        sched.to_file(s, args.output)
    else:
        sys.stdout.write(s.to_text())
    return 0


def cmd_lambda_star(args) -> int:
    exact = lambda_star(args.M, args.K, exact=True)
    print(json.dumps({
        "M": args.M, "K": args.K,
        "lambda_star": float(exact),
        "lambda_star_exact": f"{exact.numerator}/{exact.denominator}",
        "lambda_star_via_lp": lambda_star_via_lp(args.M, args.K, args.tol),
    }, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csit-dof", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one schedule and bound it")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="outer bound and achieved slope across lambda")
    _add_experiment_args(p)
    p.add_argument("--lambdas", required=True, help="comma-separated values, fractions allowed")
    p.add_argument("--no-sim", action="store_true", help="bounds only")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", help="outer bound only")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=parse_lambda, required=True)
    p.add_argument("--tightened", action="store_true")
    p.add_argument("--no-box", dest="box", action="store_false")
    p.add_argument("--export", help="write the polytope as JSON")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("schedule", help="emit a schedule file")
    p.add_argument("--kind", default="cyclic_window",
                   choices=["cyclic_window", "window", "lee_heath", "all_p", "all_n"])
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--width", type=int, default=1, help="window width for --kind window")
    p.add_argument("--slots", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("lambda-star", help="minimum perfect-CSIT fraction for min(M,K) DoF")
    p.add_argument("M", type=int)
    p.add_argument("K", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_lambda_star)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AuditFailure as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CsitDofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
