import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from cabb.model import Auction


@st.composite
def small_auctions(draw, max_goods=4, max_units=3, max_bids=8):
    n = draw(st.integers(1, max_goods))
    stock = draw(st.lists(st.integers(1, max_units), min_size=n, max_size=n))
    m = draw(st.integers(0, max_bids))
    bids = []
    for _ in range(m):
        qty = [draw(st.integers(0, k)) for k in stock]
        if not any(qty):
            qty[draw(st.integers(0, n - 1))] = 1
        price = draw(st.integers(1, 400))
        bids.append((f"{price / 8}", qty))
    return Auction.from_lists(stock, bids)


def triangle(prices=("1", "1", "1")):
    """Goods A, B, C with one unit each; bids AB, BC, CA."""
    return Auction.from_lists([1, 1, 1], [
        (prices[0], [1, 1, 0]),
        (prices[1], [0, 1, 1]),
        (prices[2], [1, 0, 1]),
    ])


def lp_by_vertices(c, a, b):
    """Maximum of c.x over {a x <= b, 0 <= x <= 1} by enumerating vertices.

    Every vertex is the solution of k tight constraints taken from the
    m + 2k inequalities; infeasible or singular choices are skipped.
    """
    c = np.asarray(c, float)
    a = np.asarray(a, float).reshape(-1, len(c))
    b = np.asarray(b, float)
    k = len(c)
    if k == 0:
        return 0.0
    rows = np.vstack([a, np.eye(k), -np.eye(k)])
    rhs = np.concatenate([b, np.ones(k), np.zeros(k)])
    best = -np.inf
    for tight in itertools.combinations(range(len(rows)), k):
        sub = rows[list(tight)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, rhs[list(tight)])
        if np.all(rows @ x <= rhs + 1e-9):
            best = max(best, float(c @ x))
    return best


@pytest.fixture
def tri():
    return triangle()


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def report(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = \
        f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
