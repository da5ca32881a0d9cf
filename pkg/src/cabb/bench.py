"""Experiment harness: run solver configurations over generated suites.

A plan is a flat ``key = value`` text file; ``#`` starts a comment::

    family = camus
    goods = 10
    bids = 250, 500, 750
    replications = 15
    master_seed = 1
    configs = SquareRoot/lp, LpCoefficient/lp, SquareRoot/extnorm, SquareRoot/lp/noreuse
    node_limit = 0
    time_limit = 0
    portfolio = default          # or no-lp-adaptive, or a comma list of criteria
    greedy_report = false
    workers = 1
    gen.alpha = 0.55             # any GeneratorSpec field

Every (goods, bids) pair is a cell. Replication ``r`` of a cell uses the seed
``derive_seed(master_seed, goods, bids, r)`` and all configs run on that
same instance.
"""
from __future__ import annotations

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import lp
from .generators import GeneratorSpec, family_name, generate
from .heuristics import Criterion, default_portfolio, initialize
from .rng import derive_seed
from .solver import SolverConfig, solve

SCHEMA_VERSION = 1
CHAIN_SLACK = 1e-6
METRICS = ("optimum", "init_value", "root_lp", "root_extnorm", "gap", "nodes",
           "lp_calls", "lp_calls_saved", "prunes", "wall_time")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    branching: Criterion
    bound: str = "lp"
    reuse: bool = True

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        parts = [p.strip() for p in text.strip().split("/")]
        if not parts or not parts[0]:
            raise PlanError(f"empty config in {text!r}")
        try:
            branching = Criterion.parse(parts[0])
        except ValueError as exc:
            raise PlanError(str(exc)) from None
        bound, reuse = "lp", True
        for p in parts[1:]:
            if p in ("lp", "extnorm"):
                bound = p
            elif p == "noreuse":
                reuse = False
            else:
                raise PlanError(f"unknown config option {p!r} in {text!r}")
        if bound == "extnorm" and branching.uses_lp:
            raise PlanError(f"{branching} branching needs the LP bound")
        return cls(branching, bound, reuse)

    @property
    def name(self) -> str:
        return f"{self.branching}/{self.bound}" + ("" if self.reuse else "/noreuse")


@dataclass(frozen=True)
class ExperimentPlan:
    family: str
    goods: tuple[int, ...]
    bids: tuple[int, ...]
    configs: tuple[RunConfig, ...]
    replications: int = 15
    master_seed: int = 0
    node_limit: int = 0
    time_limit: float = 0.0
    portfolio: tuple[Criterion, ...] | None = None
    greedy_report: bool = False
    workers: int = 1
    gen_params: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "family", family_name(self.family))
        if self.replications < 1:
            raise PlanError("replications must be >= 1")
        if not self.goods or not self.bids or not self.configs:
            raise PlanError("plan needs goods, bids and configs")
        # fail early on bad generator parameters
        self.spec(self.goods[0], self.bids[0], 0)

    def cells(self):
        return [(g, b) for g in self.goods for b in self.bids]

    def seed(self, goods: int, bids: int, rep: int) -> int:
        return derive_seed(self.master_seed, goods, bids, rep)

    def spec(self, goods: int, bids: int, rep: int) -> GeneratorSpec:
        params = dict(self.gen_params)
        params.update(family=self.family, num_goods=goods, num_bids=bids,
                      seed=self.seed(goods, bids, rep))
        return GeneratorSpec.from_dict(params)

    def solver_portfolio(self):
        return list(self.portfolio) if self.portfolio is not None else default_portfolio()


def _ints(value: str) -> tuple[int, ...]:
    return tuple(int(v) for v in value.replace(",", " ").split())


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise PlanError(f"not a boolean: {value!r}")


def parse_plan(text: str) -> ExperimentPlan:
    kw: dict = {}
    gen = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PlanError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("gen."):
                gen.append((key[4:], value))
            elif key == "family":
                kw["family"] = value
            elif key in ("goods", "bids"):
                kw[key] = _ints(value)
            elif key in ("replications", "master_seed", "node_limit", "workers"):
                kw[key] = int(value)
            elif key == "time_limit":
                kw[key] = float(value)
            elif key == "greedy_report":
                kw[key] = _bool(value)
            elif key == "configs":
                kw[key] = tuple(RunConfig.parse(c) for c in value.split(",") if c.strip())
            elif key == "portfolio":
                v = value.strip().lower()
                if v == "default":
                    kw[key] = None
                elif v == "no-lp-adaptive":
                    kw[key] = tuple(default_portfolio(lp_adaptive=False))
                else:
                    kw[key] = tuple(Criterion.parse(c) for c in value.split(","))
            else:
                raise PlanError(f"unknown key {key!r}")
        except PlanError as exc:
            raise PlanError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise PlanError(f"line {lineno}: {exc}") from None
    for required in ("family", "goods", "bids", "configs"):
        if required not in kw:
            raise PlanError(f"plan is missing {required!r}")
    try:
        return ExperimentPlan(gen_params=tuple(gen), **kw)
    except PlanError:
        raise
    except ValueError as exc:
        raise PlanError(str(exc)) from None


def load_plan(path) -> ExperimentPlan:
    with open(path, encoding="utf-8") as f:
        return parse_plan(f.read())


@dataclass
class ResultRow:
    family: str
    goods: int
    bids: int
    rep: int
    seed: int
    config: str
    optimum: float = math.nan
    init_value: float = math.nan
    root_lp: float = math.nan
    root_extnorm: float = math.nan
    nodes: int = 0
    lp_calls: int = 0
    lp_calls_saved: int = 0
    prunes: int = 0
    wall_time: float = 0.0
    limit_hit: str = ""
    error: str = ""

    @property
    def completed(self) -> bool:
        return not self.limit_hit and not self.error

    @property
    def gap(self) -> float:
        return (self.root_lp - self.init_value) / self.optimum if self.optimum else math.nan

    def chain_ok(self, slack: float = CHAIN_SLACK) -> bool:
        """init <= optimum <= root LP <= root extended-norm bound."""
        def le(a, b):
            return a <= b + slack * max(1.0, abs(b))
        return (le(self.init_value, self.optimum) and le(self.optimum, self.root_lp)
                and le(self.root_lp, self.root_extnorm))


@dataclass
class GreedyRow:
    goods: int
    bids: int
    rep: int
    criterion: str
    value: float
    percent_of_optimum: float


@dataclass
class BenchResult:
    rows: list[ResultRow]
    greedy: list[GreedyRow] = field(default_factory=list)

    def aggregates(self) -> list[dict]:
        return aggregate(self.rows)


def _run_replication(plan: ExperimentPlan, goods: int, bids: int, rep: int):
    spec = plan.spec(goods, bids, rep)
    base = dict(family=plan.family, goods=goods, bids=bids, rep=rep, seed=spec.seed)
    rows = []
    try:
        auction = generate(spec)
        init, per_criterion = initialize(auction, plan.solver_portfolio())
        root = lp.solve_lp(lp.build_relaxation(auction, auction.stock,
                                               range(auction.num_bids)))
        extnorm = lp.extended_norm_bound(auction, auction.stock, range(auction.num_bids))
    except Exception as exc:  # recorded, never fatal
        return [ResultRow(config=c.name, error=f"{type(exc).__name__}: {exc}", **base)
                for c in plan.configs], []

    optimum = None
    for cfg in plan.configs:
        row = ResultRow(config=cfg.name, init_value=init.value,
                        root_lp=root.objective_value, root_extnorm=extnorm, **base)
        try:
            config = SolverConfig(branching=cfg.branching, bound=cfg.bound,
                                  reuse_lp=cfg.reuse, node_limit=plan.node_limit,
                                  time_limit=plan.time_limit)
            alloc, stats = solve(auction, config, initial=init)
            row.optimum = alloc.value
            row.nodes = stats.nodes_visited
            row.lp_calls = stats.lp_calls
            row.lp_calls_saved = stats.lp_calls_saved
            row.prunes = stats.prunes
            row.wall_time = stats.wall_time
            row.limit_hit = stats.limit_hit or ""
            if row.completed:
                if not row.chain_ok():
                    row.error = "dominance chain violated"
                elif optimum is None:
                    optimum = alloc.value
        except Exception as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)

    greedy_rows = []
    if plan.greedy_report:
        for crit, alloc in per_criterion.items():
            pct = 100.0 * alloc.value / optimum if optimum else math.nan
            greedy_rows.append(GreedyRow(goods, bids, rep, str(crit), alloc.value, pct))
    return rows, greedy_rows


def _run_task(args):
    return _run_replication(*args)


def run_plan(plan: ExperimentPlan, out_dir=None) -> BenchResult:
    """Run every replication of every cell under every config.

    Rows come back sorted by cell, replication and config position, so the
    output does not depend on ``workers``. With ``out_dir`` the CSV and
    plot-data files are written there as well.
    """
    tasks = [(plan, g, b, r) for g, b in plan.cells() for r in range(plan.replications)]
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            outputs = list(pool.map(_run_task, tasks))
    else:
        outputs = [_run_task(t) for t in tasks]
    order = {c.name: i for i, c in enumerate(plan.configs)}
    rows = sorted((r for out in outputs for r in out[0]),
                  key=lambda r: (r.goods, r.bids, r.rep, order[r.config]))
    greedy_rows = [g for out in outputs for g in out[1]]
    result = BenchResult(rows, greedy_rows)
    if out_dir is not None:
        write_outputs(result, plan, out_dir)
    return result


def _mean_std(values):
    values = [v for v in values if not (isinstance(v, float) and math.isnan(v))]
    if not values:
        return math.nan, math.nan
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def aggregate(rows: list[ResultRow]) -> list[dict]:
    """Mean and standard deviation of each metric per (goods, bids, config),
    over the runs that finished without hitting a limit or failing."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.goods, r.bids, r.config), []).append(r)
    out = []
    for (goods, bids, config), members in groups.items():
        done = [r for r in members if r.completed]
        entry = {"goods": goods, "bids": bids, "config": config,
                 "runs": len(members), "completed": len(done),
                 "limit_hits": sum(1 for r in members if r.limit_hit)}
        for metric in METRICS:
            # node counts of limited runs are still valid lower bounds
            pool = members if metric in ("nodes", "lp_calls") else done
            pool = [r for r in pool if not r.error]
            mean, std = _mean_std([getattr(r, metric) for r in pool])
            entry[f"{metric}_mean"] = mean
            entry[f"{metric}_std"] = std
        out.append(entry)
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


RESULT_COLUMNS = ["schema_version"] + [f.name for f in fields(ResultRow)]


def write_outputs(result: BenchResult, plan: ExperimentPlan, out_dir) -> None:
    out = Path(out_dir)
    (out / "plots").mkdir(parents=True, exist_ok=True)
    _write_csv(out / "results.csv", RESULT_COLUMNS,
               ([SCHEMA_VERSION] + list(asdict(r).values()) for r in result.rows))
    aggs = result.aggregates()
    if aggs:
        header = list(aggs[0].keys())
        _write_csv(out / "aggregates.csv", ["schema_version"] + header,
                   ([SCHEMA_VERSION] + [a[k] for k in header] for a in aggs))
    for metric in METRICS:
        _write_csv(out / "plots" / f"{metric}.csv",
                   ["config", "goods", "x_bids", "mean", "stddev"],
                   ([a["config"], a["goods"], a["bids"], a[f"{metric}_mean"],
                     a[f"{metric}_std"]] for a in aggs))
    if result.greedy:
        _write_csv(out / "greedy.csv", [f.name for f in fields(GreedyRow)],
                   (list(asdict(g).values()) for g in result.greedy))
