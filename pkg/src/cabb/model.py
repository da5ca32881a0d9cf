"""Multi-unit combinatorial auction instances, allocations and the exact oracle.

Prices are stored as integer ticks (``price * 10**decimals``) so that value
comparisons in the search are exact. Only the LP code works in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_EVEN
from typing import Iterable, Sequence

import numpy as np

DEFAULT_DECIMALS = 4
ORACLE_CAP = 24


class InstanceError(ValueError):
    """Raised for malformed auctions or invalid bid indices."""


class ContractError(ValueError):
    """Raised when an operation is called outside its contract."""


def to_ticks(price, decimals: int = DEFAULT_DECIMALS) -> int:
    """Round a price (str, int, float or Decimal) onto the tick grid."""
    if isinstance(price, float):
        price = repr(price)
    quantum = Decimal(1).scaleb(-decimals)
    d = Decimal(price).quantize(quantum, rounding=ROUND_HALF_EVEN)
    return int(d.scaleb(decimals))


def format_ticks(ticks: int, decimals: int = DEFAULT_DECIMALS) -> str:
    d = Decimal(ticks).scaleb(-decimals)
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


@dataclass(frozen=True)
class Bid:
    quantity: tuple[int, ...]
    price_ticks: int

    @property
    def size(self) -> int:
        return sum(self.quantity)


@dataclass(frozen=True)
class Allocation:
    granted: tuple[int, ...]
    value_ticks: int
    decimals: int = DEFAULT_DECIMALS

    @property
    def value(self) -> float:
        return self.value_ticks / 10**self.decimals

    def __len__(self):
        return len(self.granted)


@dataclass(frozen=True, eq=False)
class Auction:
    """An auction: per-good unit stock plus an ordered list of bids.

    Use :meth:`from_lists` to build one from plain prices and quantities.
    Bid order is preserved; it matters to the given-order criteria.
    """

    stock: tuple[int, ...]
    bids: tuple[Bid, ...]
    decimals: int = DEFAULT_DECIMALS
    quantities: np.ndarray = field(init=False, repr=False)
    price_ticks: np.ndarray = field(init=False, repr=False)
    prices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        stock = tuple(int(k) for k in self.stock)
        object.__setattr__(self, "stock", stock)
        object.__setattr__(self, "bids", tuple(self.bids))
        n = len(stock)
        if n < 1:
            raise InstanceError("an auction needs at least one good")
        if any(k < 1 for k in stock):
            raise InstanceError(f"every good needs at least one unit, got {stock}")
        for i, b in enumerate(self.bids):
            if len(b.quantity) != n:
                raise InstanceError(
                    f"bid {i}: expected {n} quantities, got {len(b.quantity)}")
            if b.price_ticks <= 0:
                raise InstanceError(f"bid {i}: price must be positive")
            if any(q < 0 for q in b.quantity):
                raise InstanceError(f"bid {i}: negative quantity")
            if not any(b.quantity):
                raise InstanceError(f"bid {i}: requests nothing")
            for j, (q, k) in enumerate(zip(b.quantity, stock)):
                if q > k:
                    raise InstanceError(
                        f"bid {i}: requests {q} units of good {j}, only {k} in stock")
        m = len(self.bids)
        q = np.array([b.quantity for b in self.bids], dtype=np.int64).reshape(m, n)
        q.setflags(write=False)
        t = np.array([b.price_ticks for b in self.bids], dtype=np.int64)
        t.setflags(write=False)
        p = t / 10**self.decimals
        p.setflags(write=False)
        object.__setattr__(self, "quantities", q)
        object.__setattr__(self, "price_ticks", t)
        object.__setattr__(self, "prices", p)

    @classmethod
    def from_lists(cls, stock: Sequence[int], bids: Iterable[tuple],
                   decimals: int = DEFAULT_DECIMALS) -> "Auction":
        """Build from ``(price, quantities)`` pairs; prices may be str/float/Decimal."""
        made = []
        for price, qty in bids:
            made.append(Bid(tuple(int(x) for x in qty), to_ticks(price, decimals)))
        return cls(tuple(stock), tuple(made), decimals)

    @property
    def num_goods(self) -> int:
        return len(self.stock)

    @property
    def num_bids(self) -> int:
        return len(self.bids)

    def __len__(self):
        return len(self.bids)

    def __eq__(self, other):
        if not isinstance(other, Auction):
            return NotImplemented
        return (self.stock == other.stock and self.bids == other.bids
                and self.decimals == other.decimals)

    def __hash__(self):
        return hash((self.stock, self.bids, self.decimals))

    def price_str(self, i: int) -> str:
        return format_ticks(self.bids[i].price_ticks, self.decimals)

    def make_allocation(self, subset: Iterable[int]) -> Allocation:
        granted = tuple(sorted(set(subset)))
        return Allocation(granted, allocation_ticks(self, granted), self.decimals)


def _check_indices(auction: Auction, subset) -> list[int]:
    idx = list(subset)
    m = auction.num_bids
    for i in idx:
        if not (0 <= i < m):
            raise InstanceError(f"bid index {i} out of range for {m} bids")
    return idx


def demand(auction: Auction, subset: Iterable[int]) -> np.ndarray:
    idx = _check_indices(auction, subset)
    if not idx:
        return np.zeros(auction.num_goods, dtype=np.int64)
    return auction.quantities[idx].sum(axis=0)


def is_conflict_free(auction: Auction, subset: Iterable[int]) -> bool:
    """True iff the summed demand of ``subset`` fits the stock of every good."""
    return bool(np.all(demand(auction, subset) <= np.asarray(auction.stock)))


def allocation_ticks(auction: Auction, subset: Iterable[int]) -> int:
    idx = _check_indices(auction, subset)
    if not is_conflict_free(auction, idx):
        raise ContractError(f"bid set {sorted(idx)} is not conflict-free")
    return sum(auction.bids[i].price_ticks for i in set(idx))


def allocation_value(auction: Auction, subset: Iterable[int]) -> float:
    """Total price of a conflict-free bid set."""
    return allocation_ticks(auction, subset) / 10**auction.decimals


def brute_force_optimum(auction: Auction, cap: int = ORACLE_CAP) -> Allocation:
    """Exhaustive search over all conflict-free bid sets.

    Sets are enumerated in lexicographic order of their sorted index tuples
    and only a strictly better value replaces the incumbent, so ties go to
    the lexicographically smallest set. Infeasible sets are skipped along
    with all their supersets (conflict-freeness is closed downward).
    """
    m = auction.num_bids
    if m > cap:
        raise ContractError(f"oracle refuses {m} bids (cap {cap})")
    q = [b.quantity for b in auction.bids]
    prices = [b.price_ticks for b in auction.bids]
    n = auction.num_goods
    best_val = 0
    best_set: tuple[int, ...] = ()
    chosen: list[int] = []
    stock = list(auction.stock)

    def extend(start: int, value: int):
        nonlocal best_val, best_set
        if value > best_val:
            best_val = value
            best_set = tuple(chosen)
        for i in range(start, m):
            qi = q[i]
            if all(qi[j] <= stock[j] for j in range(n)):
                for j in range(n):
                    stock[j] -= qi[j]
                chosen.append(i)
                extend(i + 1, value + prices[i])
                chosen.pop()
                for j in range(n):
                    stock[j] += qi[j]

    extend(0, 0)
    return Allocation(best_set, best_val, auction.decimals)
