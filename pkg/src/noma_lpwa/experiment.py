"""Config-driven Monte-Carlo sweeps over node counts and strategies.

A sweep runs one strategy combination over a list of node counts, several
trials per point, and evaluates the requested receiver models. Rows land in a
CSV with a fixed schema plus a JSON sidecar holding the fully resolved
configuration; trials are reproducible from (seed, node count, trial index)
alone, so separately produced CSVs with a common seed pair up trial by trial
for strategy comparisons.

Config files are flat ``key = value`` text (``#`` starts a comment). Lists
are comma separated. Keys mirror :class:`ExperimentConfig` fields; values
given on the command line win over the file.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from . import __about__
from .channels import CHANNEL_STRATEGIES
from .deployment import FADING_MODES, NetworkConfig, generate_deployment, spawn_seed
from .exceptions import ConfigurationError
from .interference import RECEIVER_MODELS
from .planner import POWER_STRATEGIES, ResourceAllocator
from .profile import RadioProfile, dbm_to_mw
from .times import TIME_STRATEGIES


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved sweep description; every field has a CLI/file key."""

    node_counts: tuple[int, ...] = (100,)
    trials: int = 1
    seed: int = 0
    workers: int = 1
    channel_strategy: str = "roundrobin"
    time_strategy: str = "unfair"
    power_strategy: str = "max_power"
    models: tuple[str, ...] = ("noma_sic",)
    radius_m: float = 1000.0
    num_channels: int = 8
    path_loss_exponent: float = 3.5
    path_loss_constant: float = 1.0
    fading_mode: str = "shared"
    min_distance_m: float = 1.0
    rank_by: str = "mean"
    epsilon: float = 1e-6
    sic_order_constraint: bool = True
    bandwidth_hz: float = 125e3
    sf_values: tuple[int, ...] = (7, 8, 9, 10, 11, 12)
    payload_bits: float = 70.0
    noise_figure_db: float = 6.0
    demod_snr_db: tuple[float, ...] | None = None
    p_min_dbm: float = 0.0
    p_max_dbm: float = 20.0
    out: str | None = None

    def __post_init__(self):
        if len(self.node_counts) == 0:
            raise ConfigurationError("node_counts must not be empty")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.channel_strategy not in CHANNEL_STRATEGIES:
            raise ConfigurationError(f"unknown channel strategy {self.channel_strategy!r}")
        if self.time_strategy not in TIME_STRATEGIES:
            raise ConfigurationError(f"unknown time strategy {self.time_strategy!r}")
        if self.power_strategy not in POWER_STRATEGIES:
            raise ConfigurationError(f"unknown power strategy {self.power_strategy!r}")
        if self.fading_mode not in FADING_MODES:
            raise ConfigurationError(f"unknown fading mode {self.fading_mode!r}")
        bad = set(self.models) - set(RECEIVER_MODELS)
        if not self.models or bad:
            raise ConfigurationError(f"models must be a nonempty subset of "
                                     f"{RECEIVER_MODELS}, got {self.models}")

    def profile(self) -> RadioProfile:
        kwargs = dict(bandwidth_hz=self.bandwidth_hz,
                      sf_values=tuple(self.sf_values),
                      payload_bits=self.payload_bits,
                      noise_figure_db=self.noise_figure_db,
                      p_min_mw=dbm_to_mw(self.p_min_dbm),
                      p_max_mw=dbm_to_mw(self.p_max_dbm))
        if self.demod_snr_db is not None:
            kwargs["demod_snr_db"] = tuple(self.demod_snr_db)
        else:
            from .profile import DEMOD_SNR_DB_BY_SF
            try:
                kwargs["demod_snr_db"] = tuple(DEMOD_SNR_DB_BY_SF[sf]
                                               for sf in self.sf_values)
            except KeyError as exc:
                raise ConfigurationError(
                    f"no default demodulation SNR for SF{exc.args[0]}; "
                    "set demod_snr_db explicitly") from None
        return RadioProfile(**kwargs)


@dataclass(frozen=True)
class ResultRow:
    kind: str            # "trial" or an aggregate: "mean", "p10"
    n_nodes: int
    trial: int           # -1 on aggregate rows
    seed: int            # deployment seed of the trial, -1 on aggregates
    channel_strategy: str
    time_strategy: str
    power_strategy: str
    model: str
    min_rate_bps: float
    mean_rate_bps: float
    per_channel_min_bps: tuple[float, ...]
    infeasible_channels: int
    wall_time_s: float   # kept off the CSV so outputs stay byte-reproducible


CSV_COLUMNS = ("kind", "n_nodes", "trial", "seed", "channel_strategy",
               "time_strategy", "power_strategy", "model", "min_rate_bps",
               "mean_rate_bps", "per_channel_min_bps", "infeasible_channels")


def _fmt(x: float) -> str:
    return f"{x:.8e}"


def _row_record(row: ResultRow) -> dict:
    return {
        "kind": row.kind,
        "n_nodes": row.n_nodes,
        "trial": row.trial,
        "seed": row.seed,
        "channel_strategy": row.channel_strategy,
        "time_strategy": row.time_strategy,
        "power_strategy": row.power_strategy,
        "model": row.model,
        "min_rate_bps": _fmt(row.min_rate_bps),
        "mean_rate_bps": _fmt(row.mean_rate_bps),
        "per_channel_min_bps": ";".join(_fmt(v) for v in row.per_channel_min_bps),
        "infeasible_channels": row.infeasible_channels,
    }


def run_trial(config: ExperimentConfig, n_nodes: int, trial: int) -> list[ResultRow]:
    """One deployment, one strategy combination, all requested models."""
    start = time.perf_counter()
    dep_seed = spawn_seed(config.seed, n_nodes, trial)
    strategy_rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(n_nodes, trial, 1)))
    net = NetworkConfig(node_count=n_nodes, radius_m=config.radius_m,
                        channel_count=config.num_channels,
                        time_slot_count=len(config.sf_values),
                        path_loss_exponent=config.path_loss_exponent,
                        path_loss_constant=config.path_loss_constant,
                        rng_seed=dep_seed, fading_mode=config.fading_mode,
                        min_distance_m=config.min_distance_m)
    profile = config.profile()
    deployment = generate_deployment(net, profile)
    planner = ResourceAllocator(profile=profile,
                                channel_strategy=config.channel_strategy,
                                time_strategy=config.time_strategy,
                                power_strategy=config.power_strategy,
                                rank_by=config.rank_by,
                                epsilon=config.epsilon,
                                enforce_decode_order=config.sic_order_constraint,
                                on_infeasible="max_power",
                                random_state=strategy_rng)
    planner.fit(deployment)
    wall = time.perf_counter() - start
    rows = []
    for model in config.models:
        report = planner.evaluate(deployment, model)
        rows.append(ResultRow(
            kind="trial", n_nodes=n_nodes, trial=trial, seed=dep_seed,
            channel_strategy=config.channel_strategy,
            time_strategy=config.time_strategy,
            power_strategy=config.power_strategy, model=model,
            min_rate_bps=report.min_rate_bps,
            mean_rate_bps=report.mean_rate_bps,
            per_channel_min_bps=tuple(np.nan_to_num(report.per_channel_min_bps,
                                                    nan=-1.0).tolist()),
            infeasible_channels=len(planner.infeasible_channels_),
            wall_time_s=wall))
    return rows


def _run_trial_args(args) -> list[ResultRow]:
    return run_trial(*args)


def _aggregate(rows: list[ResultRow]) -> list[ResultRow]:
    key = lambda r: (r.n_nodes, r.channel_strategy, r.time_strategy,
                     r.power_strategy, r.model)
    out = []
    for k, group in itertools.groupby(sorted(rows, key=key), key=key):
        group = list(group)
        mins = np.array([r.min_rate_bps for r in group])
        means = np.array([r.mean_rate_bps for r in group])
        infeasible = sum(r.infeasible_channels for r in group)
        for kind, mn, me in (("mean", mins.mean(), means.mean()),
                             ("p10", np.percentile(mins, 10), np.percentile(means, 10))):
            out.append(ResultRow(kind=kind, n_nodes=k[0], trial=-1, seed=-1,
                                 channel_strategy=k[1], time_strategy=k[2],
                                 power_strategy=k[3], model=k[4],
                                 min_rate_bps=float(mn), mean_rate_bps=float(me),
                                 per_channel_min_bps=(),
                                 infeasible_channels=infeasible, wall_time_s=0.0))
    return out


def _canonical(rows: list[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=lambda r: (r.n_nodes, r.kind != "trial", r.trial,
                                       r.channel_strategy, r.time_strategy,
                                       r.power_strategy, r.model, r.kind))


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Execute the sweep; writes CSV and sidecar when ``config.out`` is set.

    Trial order and worker count never affect the output: rows are assembled
    in canonical order and every trial draws from its own seed stream.
    """
    tasks = [(config, n, t) for n in config.node_counts
             for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            nested = list(pool.map(_run_trial_args, tasks))
    else:
        nested = [run_trial(*t) for t in tasks]
    rows = [row for batch in nested for row in batch]
    rows = _canonical(rows) + _canonical(_aggregate(rows))
    if config.out:
        write_rows_csv(config.out, rows)
        write_sidecar(config.out, config, rows)
    return rows


def write_rows_csv(path: str, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(_row_record(row))
            fh.flush()


def write_sidecar(csv_path: str, config: ExperimentConfig,
                  rows: list[ResultRow]) -> None:
    meta = {
        "artifact": "noma-lpwa",
        "version": __about__.__version__,
        "config": dataclasses.asdict(config),
        "rows": len(rows),
        "wall_time_s": sum(r.wall_time_s for r in rows if r.kind == "trial"),
    }
    with open(csv_path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, default=list)


def load_rows_csv(path: str) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            per_channel = tuple(float(v) for v in
                                rec["per_channel_min_bps"].split(";") if v)
            rows.append(ResultRow(
                kind=rec["kind"], n_nodes=int(rec["n_nodes"]),
                trial=int(rec["trial"]), seed=int(rec["seed"]),
                channel_strategy=rec["channel_strategy"],
                time_strategy=rec["time_strategy"],
                power_strategy=rec["power_strategy"], model=rec["model"],
                min_rate_bps=float(rec["min_rate_bps"]),
                mean_rate_bps=float(rec["mean_rate_bps"]),
                per_channel_min_bps=per_channel,
                infeasible_channels=int(rec["infeasible_channels"]),
                wall_time_s=0.0))
    return rows


@dataclass(frozen=True)
class StrategyComparison:
    """Paired comparison of two values of one strategy column."""

    by: str
    strategy_a: str
    strategy_b: str
    n_nodes: int | None       # None = pooled over all node counts
    model: str
    n_pairs: int
    mean_a: float
    mean_b: float
    db_of_means: float        # 10 log10(mean_a / mean_b)
    mean_db: float            # mean of per-trial 10 log10(a / b)
    wins_a: int
    wins_b: int
    ties: int
    sign_test_p: float        # one-sided, H1: a > b


_STRATEGY_COLUMNS = ("channel_strategy", "time_strategy", "power_strategy")


def _pair_key(row: ResultRow, by: str):
    others = tuple(getattr(row, c) for c in _STRATEGY_COLUMNS if c != by)
    return (row.n_nodes, row.trial, row.model) + others


def _ratio_db(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        return float("nan")
    return 10.0 * np.log10(a / b)


def compare_strategies(rows: list[ResultRow], by: str = "time_strategy",
                       metric: str = "min_rate_bps") -> list[StrategyComparison]:
    """Pairwise per-trial comparison of the values taken by one strategy
    column, with a one-sided sign test per pair.

    Rows must pair up exactly: every (node count, trial, model, remaining
    strategies) key must appear once per compared value.
    """
    if by not in _STRATEGY_COLUMNS + ("model",):
        raise ValueError(f"cannot compare by {by!r}")
    trials = [r for r in rows if r.kind == "trial"]
    values = sorted({getattr(r, by) for r in trials})
    if len(values) < 2:
        raise ValueError(f"need at least two {by} values to compare, got {values}")
    tables: dict[str, dict] = {v: {} for v in values}
    for r in trials:
        key = _pair_key(r, by) if by != "model" else \
            (r.n_nodes, r.trial) + tuple(getattr(r, c) for c in _STRATEGY_COLUMNS)
        table = tables[getattr(r, by)]
        if key in table:
            raise ValueError(f"duplicate pairing key {key} for {by}={getattr(r, by)!r}")
        table[key] = getattr(r, metric)

    out = []
    for a, b in itertools.combinations(values, 2):
        keys_a, keys_b = set(tables[a]), set(tables[b])
        if keys_a != keys_b:
            raise ValueError(f"pairing keys of {a!r} and {b!r} do not match; "
                             f"{len(keys_a ^ keys_b)} unpaired")
        keys = sorted(keys_a)
        groups = {None: keys}
        for n in sorted({k[0] for k in keys}):
            groups[n] = [k for k in keys if k[0] == n]
        for n_sel, ks in groups.items():
            va = np.array([tables[a][k] for k in ks])
            vb = np.array([tables[b][k] for k in ks])
            wins_a = int(np.sum(va > vb))
            wins_b = int(np.sum(vb > va))
            n_eff = wins_a + wins_b
            p = binomtest(wins_a, n_eff, alternative="greater").pvalue if n_eff else 1.0
            models = {k[2] for k in ks} if by != "model" else {"*"}
            out.append(StrategyComparison(
                by=by, strategy_a=a, strategy_b=b, n_nodes=n_sel,
                model=models.pop() if len(models) == 1 else "*",
                n_pairs=len(ks), mean_a=float(va.mean()), mean_b=float(vb.mean()),
                db_of_means=_ratio_db(va.mean(), vb.mean()),
                mean_db=float(np.nanmean([_ratio_db(x, y) for x, y in zip(va, vb)])),
                wins_a=wins_a, wins_b=wins_b, ties=len(ks) - n_eff,
                sign_test_p=float(p)))
    return out


# --- config file handling ---------------------------------------------------

_LIST_INT = ("node_counts", "sf_values")
_LIST_FLOAT = ("demod_snr_db",)
_LIST_STR = ("models",)
_INT = ("trials", "seed", "workers", "num_channels")
_FLOAT = ("radius_m", "path_loss_exponent", "path_loss_constant", "epsilon",
          "bandwidth_hz", "payload_bits", "noise_figure_db", "p_min_dbm",
          "p_max_dbm", "min_distance_m")
_BOOL = ("sic_order_constraint",)
_STR = ("channel_strategy", "time_strategy", "power_strategy", "fading_mode",
        "rank_by", "out")


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _LIST_INT:
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if key in _LIST_FLOAT:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key in _LIST_STR:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if key in _INT:
            return int(raw)
        if key in _FLOAT:
            return float(raw)
        if key in _BOOL:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if key in _STR:
            return raw
    except ValueError:
        raise ConfigurationError(f"bad value for {key!r}: {raw!r}") from None
    raise ConfigurationError(f"unknown config key {key!r}")


def parse_config_file(path: str) -> dict:
    """Read the flat ``key = value`` grammar into a typed dict."""
    values: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            values[key] = _parse_value(key, raw)
    return values


def resolve_config(file_path: str | None = None, **overrides) -> ExperimentConfig:
    """Defaults, then the config file, then keyword overrides."""
    values = parse_config_file(file_path) if file_path else {}
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return ExperimentConfig(**values)
