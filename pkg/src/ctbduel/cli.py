"""Command-line entry point: ``ctbduel {run,enumerate-cells,bound,check-lemma1}``.

Exit status: 0 on success, 1 for configuration errors, 2 for runtime errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

import numpy as np

from .arms import generate_instance
from .cells import enumerate_cells
from .config import load_config
from .errors import ConfigurationError, DomainError
from .harness import BoundInputs, aggregate, iter_replications, lemma1_mc_levels, stream, theorem1_bound

log = logging.getLogger("ctbduel")

RAW_COLUMNS = ["algorithm", "replication", "t", "first", "second", "outcome", "instant_regret", "cum_regret"]
SUMMARY_COLUMNS = ["algorithm", "t", "mean_cum_regret", "stderr"]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_summary(path, config, results):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for alg in config.algorithms:
            series = results[alg.id]
            if not series:
                continue
            for row in aggregate(series, config.checkpoints):
                w.writerow([alg.id, row.t, _fmt(row.mean), _fmt(row.stderr)])


def cmd_run(args) -> int:
    config = load_config(args.config)
    out_dir = args.output_dir or config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    results = {alg.id: [] for alg in config.algorithms}
    status = 0
    with open(os.path.join(out_dir, "raw.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_COLUMNS)
        try:
            for r, per_alg in iter_replications(config, args.workers):
                for alg, s in zip(config.algorithms, per_alg):
                    results[alg.id].append(s)
                    cum = s.cumulative
                    for t in range(s.horizon):
                        w.writerow([alg.id, r, t + 1, s.first[t] + 1, s.second[t] + 1, s.outcome[t], _fmt(s.instant[t]), _fmt(cum[t])])
                fh.flush()
        except ConfigurationError:
            raise
        except Exception as err:  # noqa: BLE001 - reported, partial output kept
            log.error("run aborted: %s", err)
            status = 2
    write_summary(os.path.join(out_dir, "summary.csv"), config, results)
    if status == 0:
        log.info("wrote %s", out_dir)
    return status


def cmd_enumerate_cells(args) -> int:
    config = load_config(args.config)
    instance = generate_instance(config.instance, stream(config.seed, args.replication, 0))
    backend = args.backend or ("angular-sweep" if instance.arms.dim == 2 else "permutation-lp")
    table = enumerate_cells(instance.arms, backend=backend, rng=stream(config.seed, args.replication, 4))
    text = table.listing()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bound(args) -> int:
    inputs = BoundInputs(args.n_arms, args.m_prime, args.p, args.delta, args.lam)
    print(_fmt(theorem1_bound(inputs)))
    return 0


def cmd_check_lemma1(args) -> int:
    worst = 0.0
    print("p\tS\testimate\tstderr\tclosed_form\tz")
    for chk in lemma1_mc_levels(args.p, max(args.S), args.walks, args.horizon, args.seed):
        if chk.level in args.S:
            worst = max(worst, abs(chk.z))
            print(f"{chk.p}\t{chk.level}\t{chk.estimate:.6f}\t{chk.stderr:.6f}\t{chk.closed_form:.6f}\t{chk.z:+.3f}")
    return 0 if worst <= args.z_max else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctbduel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config and write raw.csv / summary.csv")
    p.add_argument("config")
    p.add_argument("--output-dir", help="override the config's output_dir")
    p.add_argument("--workers", type=int, default=None, help="parallel replications (default: $CTBDUEL_WORKERS or 1)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("enumerate-cells", help="list the cells of a config's instance")
    p.add_argument("config")
    p.add_argument("--replication", type=int, default=0, help="which replication's instance to list")
    p.add_argument("--backend", choices=["angular-sweep", "permutation-lp"])
    p.add_argument("--output", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_enumerate_cells)

    p = sub.add_parser("bound", help="evaluate the constant regret bound")
    p.add_argument("--n-arms", type=int, required=True)
    p.add_argument("--m-prime", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("check-lemma1", help="Monte Carlo check of the random-walk occupation identity")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--S", type=int, nargs="+", default=[0])
    p.add_argument("--walks", type=int, default=100_000)
    p.add_argument("--horizon", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z-max", type=float, default=3.0, help="exit 2 if any |z| exceeds this")
    p.set_defaults(func=cmd_check_lemma1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # noqa: BLE001
        print(f"runtime error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
