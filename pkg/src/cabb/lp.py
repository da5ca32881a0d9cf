"""Fractional relaxation of winner determination and a bounded-variable simplex.

The relaxation of a node is::

    maximize    sum_i p_i x_i
    subject to  sum_i q_ij x_i <= stock_j   for every good j
                0 <= x_i <= 1

All data are non-negative, so the all-slack basis is feasible and no phase 1
is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Auction

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
ZERO_TOL = 1e-6
STALL_THRESHOLD = 1000
_PIVOT_TOL = 1e-9
_REFACTOR_EVERY = 40


class LpError(RuntimeError):
    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class LpProblem:
    objective: np.ndarray   # (k,) prices of the active bids
    matrix: np.ndarray      # (goods, k) requested quantities
    rhs: np.ndarray         # (goods,) remaining stock
    bids: tuple[int, ...]   # bid index of each column

    def __post_init__(self):
        g, k = self.matrix.shape
        if self.objective.shape != (k,) or self.rhs.shape != (g,) or len(self.bids) != k:
            raise ValueError("inconsistent LP dimensions")
        if (self.matrix < 0).any() or (self.rhs < 0).any():
            raise ValueError("LP data must be non-negative")

    @property
    def num_vars(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class LpSolution:
    objective_value: float
    coefficients: np.ndarray
    bids: tuple[int, ...]
    # weak-duality bound from the final duals; >= the LP optimum up to rounding
    upper_bound: float
    iterations: int = 0
    status: str = "optimal"

    def coefficient_of(self, bid: int) -> float:
        return float(self.coefficients[self.bids.index(bid)])

    def without(self, bid: int) -> "LpSolution":
        """The same point with one (zero-valued) variable dropped."""
        pos = self.bids.index(bid)
        keep = np.ones(len(self.bids), dtype=bool)
        keep[pos] = False
        return LpSolution(self.objective_value, self.coefficients[keep],
                          self.bids[:pos] + self.bids[pos + 1:],
                          self.upper_bound, 0, self.status)


def build_relaxation(auction: Auction, remaining_stock: Sequence[int],
                     active_bids: Sequence[int]) -> LpProblem:
    idx = list(active_bids)
    a = auction.quantities[idx].T.astype(float) if idx else \
        np.zeros((auction.num_goods, 0))
    c = auction.prices[idx].astype(float) if idx else np.zeros(0)
    return LpProblem(c, np.ascontiguousarray(a),
                     np.asarray(remaining_stock, dtype=float), tuple(idx))


def solve_lp(problem: LpProblem, *, opt_tol: float = OPT_TOL,
             feas_tol: float = FEAS_TOL, stall_threshold: int = STALL_THRESHOLD,
             max_iter: int | None = None) -> LpSolution:
    """Revised simplex with variable upper bounds handled by bound flips.

    Pricing is Dantzig's largest reduced cost. After ``stall_threshold``
    consecutive degenerate pivots the rule switches to Bland's smallest
    index for both entering and leaving variables, which cannot cycle.
    """
    c = problem.objective
    a = problem.matrix
    b = problem.rhs
    m, k = a.shape
    if k == 0:
        return LpSolution(0.0, np.zeros(0), problem.bids, 0.0)
    if m == 0:
        x = np.ones(k)
        value = float(c.sum())
        return LpSolution(value, x, problem.bids, value)
    if max_iter is None:
        max_iter = 50 * (m + k) + 10 * stall_threshold

    # columns 0..k-1 are bids (upper bound 1), k..k+m-1 are slacks (no upper bound)
    full = np.hstack([a, np.eye(m)])
    cost = np.concatenate([c, np.zeros(m)])
    is_struct = np.arange(k + m) < k
    basis = np.arange(k, k + m)
    in_basis = ~is_struct.copy()
    at_upper = np.zeros(k + m, dtype=bool)
    # crash: the longest prefix of bids by price per unit that fits starts at 1
    order = np.argsort(-c / np.maximum(a.sum(axis=0), 1e-12), kind="stable")
    fits = (np.cumsum(a[:, order], axis=1) <= b[:, None] + feas_tol).all(axis=0)
    prefix = int(np.argmin(fits)) if not fits.all() else k
    at_upper[order[:prefix]] = True

    binv = np.eye(m)
    since_refactor = 0
    bland = False
    degenerate_run = 0
    it = 0
    while True:
        if since_refactor >= _REFACTOR_EVERY:
            binv = np.linalg.inv(full[:, basis])
            since_refactor = 0
        x_b = binv @ (b - a @ at_upper[:k])
        y = cost[basis] @ binv
        d = cost - y @ full
        eligible = np.where(at_upper, d < -opt_tol, d > opt_tol) & ~in_basis
        if bland:
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                break
            q = int(candidates[0])
        else:
            score = np.where(eligible, np.abs(d), -1.0)
            q = int(np.argmax(score))
            if score[q] < 0:
                break
        if it >= max_iter:
            raise LpError("simplex iteration limit exceeded", it)
        it += 1

        sigma = -1.0 if at_upper[q] else 1.0
        w = binv @ full[:, q]
        sw = sigma * w
        basic_struct = is_struct[basis]
        ratios = np.full(m, np.inf)
        down = sw > _PIVOT_TOL
        ratios[down] = np.maximum(x_b[down], 0.0) / sw[down]
        up = (sw < -_PIVOT_TOL) & basic_struct
        ratios[up] = np.maximum(1.0 - x_b[up], 0.0) / -sw[up]
        t_flip = 1.0 if q < k else np.inf
        t_min = ratios.min()

        if t_flip <= t_min:
            at_upper[q] = not at_upper[q]
            step = t_flip
        else:
            ties = np.flatnonzero(ratios <= t_min + 1e-12)
            if bland:
                r = int(ties[np.argmin(basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(w[ties]))])
            leaving = int(basis[r])
            at_upper[leaving] = bool(up[r])
            in_basis[leaving] = False
            at_upper[q] = False
            in_basis[q] = True
            basis[r] = q
            pivot_row = binv[r] / w[r]
            binv -= np.outer(w, pivot_row)
            binv[r] = pivot_row
            since_refactor += 1
            step = t_min
        if step <= 1e-12:
            degenerate_run += 1
            if degenerate_run > stall_threshold:
                bland = True
        else:
            degenerate_run = 0

    x = at_upper[:k].astype(float)
    struct_pos = basis < k
    x[basis[struct_pos]] = x_b[struct_pos]
    x = np.clip(x, 0.0, 1.0)
    value = float(c @ x)
    y_pos = np.maximum(y, 0.0)
    dual = float(b @ y_pos + np.maximum(c - a.T @ y_pos, 0.0).sum())
    residual = a @ x - b
    if residual.max(initial=0.0) > feas_tol * max(1.0, float(np.abs(b).max())):
        raise LpError(f"primal infeasible by {residual.max():.3g}", it)
    return LpSolution(value, x, problem.bids, max(dual, value), it)


def extended_norm_bound(auction: Auction, remaining_stock: Sequence[int],
                        active_bids: Sequence[int]) -> float:
    """Cheap bound from spreading each bid's price evenly over its units.

    Per good, the units on offer are filled best price-per-unit first, each
    bid supplying at most its own quantity of that good (a fractional
    knapsack per good). The per-good values add up to a bound on any
    allocation and on the LP optimum, and never exceed the total active price.
    """
    idx = list(active_bids)
    if not idx:
        return 0.0
    q = auction.quantities[idx].astype(float)
    p = auction.prices[idx]
    per_unit = p / q.sum(axis=1)
    order = np.argsort(-per_unit, kind="stable")
    q, per_unit = q[order], per_unit[order]
    before = np.cumsum(q, axis=0) - q
    take = np.clip(np.asarray(remaining_stock, dtype=float) - before, 0.0, q)
    return float(per_unit @ take.sum(axis=1))
