"""Command line front end: run sweeps, compare CSVs, audit the radio profile.

Subcommands::

    noma-lpwa run --config exp.cfg --out results.csv [overrides]
    noma-lpwa compare a.csv [b.csv ...] --by time_strategy
    noma-lpwa print-profile [--config exp.cfg]
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (ExperimentConfig, compare_strategies, load_rows_csv,
                         resolve_config, run_experiment)
from .profile import mw_to_dbm


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="flat key = value config file")
    p.add_argument("--out", metavar="PATH", help="output CSV path")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument("--workers", type=int, help="parallel trial workers")
    p.add_argument("--nodes", metavar="LIST",
                   help="comma-separated node counts, e.g. 100,500")
    p.add_argument("--trials", type=int, help="trials per node count")
    p.add_argument("--channel-strategy", choices=("roundrobin", "random"))
    p.add_argument("--time-strategy", choices=("unfair", "fair", "random", "distance"))
    p.add_argument("--power-strategy", choices=("max_power", "optimal"))
    p.add_argument("--models", metavar="LIST",
                   help="comma-separated subset of noma_sic,plain,oma")


def _run_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = dict(
        out=args.out, seed=args.seed, workers=args.workers, trials=args.trials,
        channel_strategy=args.channel_strategy, time_strategy=args.time_strategy,
        power_strategy=args.power_strategy)
    if args.nodes:
        overrides["node_counts"] = tuple(int(v) for v in args.nodes.split(","))
    if args.models:
        overrides["models"] = tuple(v.strip() for v in args.models.split(","))
    return resolve_config(args.config, **overrides)


def cmd_run(args: argparse.Namespace) -> int:
    config = _run_config(args)
    rows = run_experiment(config)
    trial_rows = sum(1 for r in rows if r.kind == "trial")
    dest = config.out or "(not written, no --out)"
    print(f"{trial_rows} trial rows, {len(rows) - trial_rows} aggregate rows -> {dest}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    rows = []
    for path in args.csv:
        rows.extend(load_rows_csv(path))
    summaries = compare_strategies(rows, by=args.by, metric=args.metric)
    header = (f"{'A':>12} {'B':>12} {'N':>6} {'pairs':>6} {'mean_A':>13} "
              f"{'mean_B':>13} {'dB':>8} {'wins A/B':>9} {'p':>9}")
    print(header)
    for s in summaries:
        n = "all" if s.n_nodes is None else s.n_nodes
        print(f"{s.strategy_a:>12} {s.strategy_b:>12} {n:>6} {s.n_pairs:>6} "
              f"{s.mean_a:13.5e} {s.mean_b:13.5e} {s.db_of_means:8.2f} "
              f"{s.wins_a:>4}/{s.wins_b:<4} {s.sign_test_p:9.2e}")
    return 0


def cmd_print_profile(args: argparse.Namespace) -> int:
    config = resolve_config(args.config)
    profile = config.profile()
    print(f"bandwidth_hz    {profile.bandwidth_hz:.1f}")
    print(f"payload_bits    {profile.payload_bits:.1f}")
    print(f"noise_figure_db {profile.noise_figure_db:.2f}")
    print(f"noise_mw        {profile.noise_mw:.9e}")
    print(f"noise_dbm       {mw_to_dbm(profile.noise_mw):.4f}")
    print(f"p_min_dbm       {mw_to_dbm(profile.p_min_mw):.4f}")
    print(f"p_max_dbm       {mw_to_dbm(profile.p_max_mw):.4f}")
    print(f"{'f':>3} {'sf':>4} {'T_ms':>12} {'snr_de_db':>10} "
          f"{'theta_mw':>16} {'theta_dbm':>10}")
    for f in range(profile.num_times):
        print(f"{f + 1:>3} {profile.sf_values[f]:>4} "
              f"{profile.times_s[f] * 1e3:>12.4f} "
              f"{profile.demod_snr_db[f]:>10.2f} "
              f"{profile.thresholds_mw[f]:>16.9e} "
              f"{mw_to_dbm(profile.thresholds_mw[f]):>10.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-lpwa",
        description="Uplink NOMA resource allocation experiments for LPWA networks")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a Monte-Carlo sweep")
    _add_run_arguments(run_p)
    run_p.set_defaults(func=cmd_run)

    cmp_p = sub.add_parser("compare", help="paired strategy comparison of result CSVs")
    cmp_p.add_argument("csv", nargs="+", help="result CSV file(s)")
    cmp_p.add_argument("--by", default="time_strategy",
                       choices=("channel_strategy", "time_strategy",
                                "power_strategy", "model"))
    cmp_p.add_argument("--metric", default="min_rate_bps")
    cmp_p.set_defaults(func=cmd_compare)

    prof_p = sub.add_parser("print-profile",
                            help="dump derived radio constants for audit")
    prof_p.add_argument("--config", metavar="PATH")
    prof_p.set_defaults(func=cmd_print_profile)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
