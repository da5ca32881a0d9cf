"""Depth-first branch and bound for winner determination.

Each node carries a partial allocation, the stock left over, and the bids
that still fit. A node is processed as: update the incumbent, stop if no bid
is left, bound the residual auction from above, prune if the bound cannot
beat the incumbent, otherwise branch on one bid (grant it first, then deny
it).

When the branching bid has a zero coefficient in the node's LP optimum, the
deny branch has the same LP optimum, so it inherits the solution instead of
solving again.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import lp
from .heuristics import Criterion, Kind, default_portfolio, initialize, scores
from .model import Allocation, Auction

BOUNDS = ("lp", "extnorm")


class SolverError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    branching: Criterion = field(default_factory=lambda: Criterion(Kind.SQUARE_ROOT))
    bound: str = "lp"
    portfolio: Sequence[Criterion] | None = None
    reuse_lp: bool = True
    skip_inherited_prune: bool = True
    node_limit: int = 0
    time_limit: float = 0.0
    prune_slack: float = 1e-6
    opt_tol: float = lp.OPT_TOL
    feas_tol: float = lp.FEAS_TOL
    zero_tol: float = lp.ZERO_TOL

    def __post_init__(self):
        if isinstance(self.branching, str):
            self.branching = Criterion.parse(self.branching)
        if self.bound not in BOUNDS:
            raise ValueError(f"bound must be one of {BOUNDS}, got {self.bound!r}")
        if self.prune_slack < self.opt_tol:
            raise ValueError("prune_slack must be at least the LP optimality tolerance")
        if self.bound == "extnorm" and self.branching.uses_lp:
            raise ValueError(f"{self.branching} branching needs the LP bound")
        if self.node_limit < 0 or self.time_limit < 0:
            raise ValueError("limits must be non-negative")


@dataclass
class SearchStats:
    nodes_visited: int = 0
    lp_calls: int = 0
    lp_calls_saved: int = 0
    bound_steps: int = 0
    prunes: int = 0
    best_value_trace: list = field(default_factory=list)
    wall_time: float = 0.0
    init_value: float = 0.0
    root_bound: float | None = None
    limit_hit: str | None = None

    @property
    def proven_optimal(self) -> bool:
        return self.limit_hit is None

    def as_dict(self) -> dict:
        return {
            "nodes_visited": self.nodes_visited,
            "lp_calls": self.lp_calls,
            "lp_calls_saved": self.lp_calls_saved,
            "bound_steps": self.bound_steps,
            "prunes": self.prunes,
            "best_value_trace": [list(t) for t in self.best_value_trace],
            "wall_time": self.wall_time,
            "init_value": self.init_value,
            "root_bound": self.root_bound,
            "limit_hit": self.limit_hit,
        }


@dataclass
class _Node:
    granted: tuple
    partial: int                 # ticks
    stock: np.ndarray
    active: np.ndarray           # ascending bid indices, all fitting stock
    inherited: lp.LpSolution | None = None
    best_at_parent: int | None = None


def should_prune(partial_ticks: int, bound: float, best_ticks: int,
                 decimals: int, slack: float) -> bool:
    """Prune iff partial + bound <= best, on the tick grid.

    Allocation values are whole ticks, so a completion is worth at most
    ``floor(bound + slack)`` ticks; ``slack`` absorbs LP rounding error.
    """
    scale = 10**decimals
    bound_ticks = math.floor((bound + slack) * scale)
    return partial_ticks + bound_ticks <= best_ticks


def choose_bid(active: np.ndarray, branching: Criterion, static_scores=None,
               solution: lp.LpSolution | None = None) -> int:
    """Branching bid: highest score (or LP coefficient), lowest index on ties."""
    if branching.uses_lp:
        if solution is None:
            raise ValueError(f"{branching} needs the node LP solution")
        return int(solution.bids[int(np.argmax(solution.coefficients))])
    return int(active[int(np.argmax(static_scores[active]))])


def maybe_reuse_bound(parent: lp.LpSolution, bid: int,
                      zero_tol: float = lp.ZERO_TOL) -> lp.LpSolution | None:
    """Parent solution minus ``bid`` when its coefficient is zero, else None."""
    if abs(parent.coefficient_of(bid)) <= zero_tol:
        return parent.without(bid)
    return None


def solve(auction: Auction, config: SolverConfig | None = None,
          initial: Allocation | None = None) -> tuple[Allocation, SearchStats]:
    """Find a maximum-value conflict-free allocation.

    If a node or time limit stops the search, the best allocation found so
    far is returned and ``stats.limit_hit`` names the limit; the value is then
    only a lower bound on the optimum. ``initial`` skips the greedy
    initialization phase and starts from the given allocation instead.
    """
    config = config or SolverConfig()
    stats = SearchStats()
    t0 = time.perf_counter()
    if initial is None:
        portfolio = config.portfolio
        if portfolio is None:
            portfolio = default_portfolio()
        initial, _ = initialize(auction, portfolio)
    init = initial
    stats.init_value = init.value

    q = auction.quantities
    prices = auction.price_ticks
    static = None if config.branching.uses_lp else scores(config.branching, auction)
    scale = 10**auction.decimals

    best_ticks = init.value_ticks
    best_set = init.granted
    stats.best_value_trace.append((0, best_ticks / scale))

    root_stock = np.array(auction.stock, dtype=np.int64)
    stack = [_Node((), 0, root_stock, np.arange(auction.num_bids))]
    deadline = t0 + config.time_limit if config.time_limit else None

    while stack:
        if config.node_limit and stats.nodes_visited >= config.node_limit:
            stats.limit_hit = "nodes"
            break
        if deadline is not None and time.perf_counter() > deadline:
            stats.limit_hit = "time"
            break
        node = stack.pop()
        stats.nodes_visited += 1

        if node.partial > best_ticks:
            best_ticks = node.partial
            best_set = node.granted
            stats.best_value_trace.append((stats.nodes_visited, best_ticks / scale))
        if len(node.active) == 0:
            continue

        stats.bound_steps += 1
        sol = None
        if config.bound == "lp":
            if node.inherited is not None:
                sol = node.inherited
                stats.lp_calls_saved += 1
            else:
                problem = lp.build_relaxation(auction, node.stock, node.active)
                try:
                    sol = lp.solve_lp(problem, opt_tol=config.opt_tol,
                                      feas_tol=config.feas_tol)
                except lp.LpError as exc:
                    raise SolverError(
                        f"LP failed at node {stats.nodes_visited} with "
                        f"{len(node.active)} active bids: {exc}") from exc
                stats.lp_calls += 1
            bound = sol.upper_bound
        else:
            bound = lp.extended_norm_bound(auction, node.stock, node.active)
        if stats.root_bound is None:
            stats.root_bound = bound

        skip = (config.skip_inherited_prune and node.inherited is not None
                and node.best_at_parent == best_ticks)
        if not skip and should_prune(node.partial, bound, best_ticks,
                                     auction.decimals, config.prune_slack):
            stats.prunes += 1
            continue

        b = choose_bid(node.active, config.branching, static, sol)
        rest = node.active[node.active != b]

        inherited = None
        if sol is not None and config.reuse_lp:
            inherited = maybe_reuse_bound(sol, b, config.zero_tol)
        stack.append(_Node(node.granted, node.partial, node.stock, rest,
                           inherited, best_ticks))

        left_stock = node.stock - q[b]
        fits = np.all(q[rest] <= left_stock, axis=1)
        stack.append(_Node(node.granted + (b,), node.partial + int(prices[b]),
                           left_stock, rest[fits]))

    stats.wall_time = time.perf_counter() - t0
    return auction.make_allocation(best_set), stats
