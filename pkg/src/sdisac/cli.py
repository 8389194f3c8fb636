"""Command-line entry point: ``python -m sdisac <mode> [options]``."""
import argparse
import logging
import sys

from .errors import ConfigError
from .harness import MODES, load_config, run_scenario, write_outputs

log = logging.getLogger("sdisac")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sdisac",
        description="Run seeded Monte-Carlo experiments and write CSV results.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="flat YAML file of ScenarioConfig fields")
        p.add_argument("--seed", type=int, dest="master_seed")
        p.add_argument("--trials", type=int)
        p.add_argument("--out", default=f"results/{mode}",
                       help="output directory (default: %(default)s)")
        p.add_argument("--workers", type=int)
        p.add_argument("--beta", type=float)
        p.add_argument("--gamma-db", type=float, dest="gamma_db")
        p.add_argument("--omega", type=float)
        p.add_argument("--mu", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {k: getattr(args, k) for k in
                 ("master_seed", "trials", "workers", "beta", "gamma_db",
                  "omega", "mu", "rho")}
    try:
        cfg = load_config(args.config, mode=args.mode, **overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info("running %s: %d points x %d trials", cfg.mode, len(cfg.points()),
             cfg.num_trials)
    result = run_scenario(cfg)
    try:
        paths = write_outputs(result, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    excluded = sum(r.status != "ok" for r in result.records)
    if excluded:
        log.warning("%d of %d trials excluded (see the status column)",
                    excluded, len(result.records))
    for p in paths:
        print(p)
    return 0
