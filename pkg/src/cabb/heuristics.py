"""Greedy allocation heuristics for the initialization phase.

Every heuristic is the same greedy loop (grant the next bid, shrink the
stock, drop bids that no longer fit) and they differ only in the order in
which bids are considered. Orders come from a :class:`Criterion`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import lp
from .model import Allocation, Auction
from .rng import Xoshiro256


class Kind(str, Enum):
    SQUARE_ROOT = "SquareRoot"
    PRICE = "Price"
    PRICE_PER_UNIT = "PricePerUnit"
    NORMALIZED_PRICE_PER_UNIT = "NormalizedPricePerUnit"
    RANDOM = "Random"
    GIVEN_ORDER = "GivenOrder"
    REVERSE_GIVEN_ORDER = "ReverseGivenOrder"
    INVERSE_PRICE = "InversePrice"
    INVERSE_SQUARE_ROOT = "InverseSquareRoot"
    INVERSE_PRICE_PER_UNIT = "InversePricePerUnit"
    PRICE_TIMES_SQRT_UNITS = "PriceTimesSqrtUnits"
    LP_COEFFICIENT = "LpCoefficient"
    LP_ADAPTIVE = "LpAdaptive"


LP_KINDS = frozenset({Kind.LP_COEFFICIENT, Kind.LP_ADAPTIVE})
_BY_NAME = {k.value.lower(): k for k in Kind}


@dataclass(frozen=True)
class Criterion:
    kind: Kind
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.RANDOM and self.seed is None:
            object.__setattr__(self, "seed", 0)
        if self.kind is not Kind.RANDOM and self.seed is not None:
            raise ValueError(f"{self.kind.value} takes no seed")

    @classmethod
    def parse(cls, text: str) -> "Criterion":
        """Accepts ``SquareRoot``, ``Random(3)``, ``random:3`` (case-insensitive)."""
        m = re.fullmatch(r"\s*([A-Za-z]+)\s*(?:[(:]\s*(-?\d+)\s*\)?)?\s*", text)
        if not m or m.group(1).lower() not in _BY_NAME:
            raise ValueError(f"unknown criterion {text!r}")
        seed = int(m.group(2)) if m.group(2) is not None else None
        return cls(_BY_NAME[m.group(1).lower()], seed)

    @property
    def uses_lp(self) -> bool:
        return self.kind in LP_KINDS

    def __str__(self):
        if self.kind is Kind.RANDOM:
            return f"Random({self.seed})"
        return self.kind.value


def default_portfolio(lp_adaptive: bool = True) -> list[Criterion]:
    """The 16 criteria of the initialization phase.

    Attractive first, then the random group, then the ones that pick
    unattractive bids first. ``lp_adaptive=False`` drops the one member
    whose cost grows with the number of granted bids.
    """
    members = [Kind.SQUARE_ROOT, Kind.PRICE, Kind.PRICE_PER_UNIT,
               Kind.NORMALIZED_PRICE_PER_UNIT, Kind.LP_COEFFICIENT]
    out = [Criterion(k) for k in members]
    if lp_adaptive:
        out.append(Criterion(Kind.LP_ADAPTIVE))
    out.append(Criterion(Kind.GIVEN_ORDER))
    out.extend(Criterion(Kind.RANDOM, s) for s in range(4))
    out.extend(Criterion(k) for k in (
        Kind.INVERSE_PRICE, Kind.INVERSE_SQUARE_ROOT, Kind.INVERSE_PRICE_PER_UNIT,
        Kind.REVERSE_GIVEN_ORDER, Kind.PRICE_TIMES_SQRT_UNITS))
    return out


def scores(criterion: Criterion, auction: Auction) -> np.ndarray:
    """Static score of every bid (higher goes first)."""
    kind = criterion.kind
    p = auction.prices
    units = auction.quantities.sum(axis=1).astype(float)
    m = auction.num_bids
    if kind is Kind.SQUARE_ROOT:
        return p / np.sqrt(units)
    if kind is Kind.PRICE:
        return p.copy()
    if kind is Kind.PRICE_PER_UNIT:
        return p / units
    if kind is Kind.NORMALIZED_PRICE_PER_UNIT:
        share = (auction.quantities / np.asarray(auction.stock, dtype=float)).sum(axis=1)
        return p / share
    if kind is Kind.RANDOM:
        rng = Xoshiro256(criterion.seed)
        return np.array([rng.random() for _ in range(m)])
    if kind is Kind.GIVEN_ORDER:
        return -np.arange(m, dtype=float)
    if kind is Kind.REVERSE_GIVEN_ORDER:
        return np.arange(m, dtype=float)
    if kind is Kind.INVERSE_PRICE:
        return -p
    if kind is Kind.INVERSE_SQUARE_ROOT:
        return -(p / np.sqrt(units))
    if kind is Kind.INVERSE_PRICE_PER_UNIT:
        return -(p / units)
    if kind is Kind.PRICE_TIMES_SQRT_UNITS:
        return p * np.sqrt(units)
    raise ValueError(f"{criterion} has no static score; it needs an LP solution")


def score(criterion: Criterion, auction: Auction, bid: int) -> float:
    return float(scores(criterion, auction)[bid])


def order_by(values: np.ndarray) -> np.ndarray:
    """Indices by descending value, ties by ascending index."""
    return np.argsort(-np.asarray(values, dtype=float), kind="stable")


def lp_coefficient_order(auction: Auction) -> list[int]:
    """Bids sorted by their coefficient in the root relaxation, descending."""
    problem = lp.build_relaxation(auction, auction.stock, range(auction.num_bids))
    sol = lp.solve_lp(problem)
    return [int(i) for i in order_by(sol.coefficients)]


def greedy_in_order(auction: Auction, order: Iterable[int]) -> Allocation:
    stock = np.array(auction.stock, dtype=np.int64)
    q = auction.quantities
    granted = []
    for i in order:
        if np.all(q[i] <= stock):
            stock -= q[i]
            granted.append(int(i))
    return auction.make_allocation(granted)


def _greedy_lp_adaptive(auction: Auction) -> Allocation:
    q = auction.quantities
    stock = np.array(auction.stock, dtype=np.int64)
    active = list(range(auction.num_bids))
    granted = []
    sol = None
    while active:
        if sol is None:
            sol = lp.solve_lp(lp.build_relaxation(auction, stock, active))
        pos = int(np.argmax(sol.coefficients))
        pick = active[pos]
        granted.append(pick)
        stock -= q[pick]
        fits = np.all(q[active] <= stock, axis=1)
        fits[pos] = False
        dropped = ~fits
        dropped[pos] = False
        dropped_support = bool((sol.coefficients[dropped] > lp.ZERO_TOL).any())
        full = sol.coefficients[pos] >= 1.0 - lp.ZERO_TOL
        if full and not dropped_support:
            # the rest of the current optimum stays optimal for the residual problem
            sol = lp.LpSolution(sol.objective_value - float(auction.prices[pick]),
                                sol.coefficients[fits],
                                tuple(b for b, f in zip(active, fits) if f),
                                sol.upper_bound - float(auction.prices[pick]))
        else:
            sol = None
        active = [b for b, f in zip(active, fits) if f]
    return auction.make_allocation(granted)


def greedy(auction: Auction, criterion: Criterion) -> Allocation:
    if criterion.kind is Kind.LP_ADAPTIVE:
        return _greedy_lp_adaptive(auction)
    if auction.num_bids == 0:
        return auction.make_allocation(())
    if criterion.kind is Kind.LP_COEFFICIENT:
        return greedy_in_order(auction, lp_coefficient_order(auction))
    return greedy_in_order(auction, order_by(scores(criterion, auction)))


def initialize(auction: Auction, portfolio: Sequence[Criterion] | None = None
               ) -> tuple[Allocation, dict[Criterion, Allocation]]:
    """Run every criterion and keep the best allocation.

    Ties in value go to the lexicographically smallest bid set, so the
    result does not depend on the portfolio order.
    """
    if portfolio is None:
        portfolio = default_portfolio()
    if not portfolio:
        raise ValueError("empty portfolio")
    results = {c: greedy(auction, c) for c in portfolio}
    best = min(results.values(), key=lambda a: (-a.value_ticks, a.granted))
    return best, results
