import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cabb.model import (Auction, Bid, ContractError, InstanceError, allocation_value,
                        brute_force_optimum, format_ticks, is_conflict_free, to_ticks)

from conftest import small_auctions, triangle


def test_empty_subset_is_conflict_free(tri):
    assert is_conflict_free(tri, [])


def test_two_unit_bids_on_one_unit_conflict():
    a = Auction.from_lists([1], [("1", [1]), ("1", [1])])
    assert not is_conflict_free(a, {0, 1})


def test_multi_unit_fit():
    a = Auction.from_lists([2, 1], [("1", [1, 1]), ("1", [1, 0])])
    assert is_conflict_free(a, {0, 1})


def test_out_of_range_index(tri):
    with pytest.raises(InstanceError):
        is_conflict_free(tri, [3])
    with pytest.raises(InstanceError):
        is_conflict_free(tri, [-1])


def test_allocation_values():
    a = Auction.from_lists([1, 1], [("7", [1, 0]), ("3", [0, 1]), ("4.5", [1, 0])])
    assert allocation_value(a, []) == 0
    assert allocation_value(a, [0]) == 7
    assert allocation_value(a, [1, 2]) == 7.5


def test_allocation_value_rejects_conflicts(tri):
    with pytest.raises(ContractError):
        allocation_value(tri, [0, 1])


def test_ticks_round_trip():
    assert to_ticks("4.5") == 45000
    assert to_ticks(0.1) == 1000
    assert format_ticks(45000) == "4.5"
    assert format_ticks(70000) == "7"
    assert format_ticks(1) == "0.0001"


@pytest.mark.parametrize("stock, bids, message", [
    ([1], [("1", [2])], "bid 0"),
    ([1, 1], [("1", [1, 0]), ("0", [0, 1])], "bid 1"),
    ([1], [("1", [0])], "requests nothing"),
    ([0], [], "at least one unit"),
    ([], [], "at least one good"),
    ([1, 1], [("1", [1])], "expected 2 quantities"),
])
def test_invalid_auctions_rejected(stock, bids, message):
    with pytest.raises(InstanceError, match=message):
        Auction.from_lists(stock, bids)


def test_empty_bid_list_is_valid():
    a = Auction.from_lists([3], [])
    assert a.num_bids == 0
    assert brute_force_optimum(a).granted == ()
    assert brute_force_optimum(a).value == 0


def test_duplicate_bids_allowed():
    a = Auction.from_lists([1], [("2", [1]), ("2", [1])])
    assert a.bids[0] == a.bids[1]


def test_oracle_dominance():
    a = Auction.from_lists([1], [("1", [1]), ("2", [1])])
    best = brute_force_optimum(a)
    assert best.granted == (1,)
    assert best.value == 2


def test_oracle_triangle_matches_enumeration(tri):
    # all 8 subsets by hand: only singletons and the empty set are feasible
    feasible = [s for r in range(4) for s in itertools.combinations(range(3), r)
                if is_conflict_free(tri, s)]
    assert feasible == [(), (0,), (1,), (2,)]
    best = brute_force_optimum(tri)
    assert best.value == 1
    assert best.granted == (0,)  # lexicographically smallest of the ties


def test_oracle_cap():
    a = Auction.from_lists([1], [("1", [1])] * 5)
    with pytest.raises(ContractError):
        brute_force_optimum(a, cap=4)


def _enumerate_best(auction):
    best = (0, ())
    for r in range(auction.num_bids + 1):
        for s in itertools.combinations(range(auction.num_bids), r):
            if is_conflict_free(auction, s):
                v = sum(auction.bids[i].price_ticks for i in s)
                if v > best[0] or (v == best[0] and s < best[1]):
                    best = (v, s)
    return best


@settings(max_examples=60, deadline=None)
@given(small_auctions(max_bids=7))
def test_oracle_matches_plain_enumeration(auction):
    best = brute_force_optimum(auction)
    assert (best.value_ticks, best.granted) == _enumerate_best(auction)


@settings(max_examples=60, deadline=None)
@given(small_auctions(), st.data())
def test_conflict_free_is_closed_downward(auction, data):
    if auction.num_bids == 0:
        return
    subset = data.draw(st.sets(st.integers(0, auction.num_bids - 1)))
    smaller = data.draw(st.sets(st.sampled_from(sorted(subset)))) if subset else set()
    if is_conflict_free(auction, subset):
        assert is_conflict_free(auction, smaller)


@settings(max_examples=60, deadline=None)
@given(small_auctions(), st.data())
def test_value_grows_when_a_bid_is_added(auction, data):
    if auction.num_bids == 0:
        return
    subset = data.draw(st.sets(st.integers(0, auction.num_bids - 1)))
    if not is_conflict_free(auction, subset):
        return
    for i in range(auction.num_bids):
        bigger = subset | {i}
        if i not in subset and is_conflict_free(auction, bigger):
            assert allocation_value(auction, bigger) > allocation_value(auction, subset)


def test_auction_is_read_only(tri):
    with pytest.raises(ValueError):
        tri.quantities[0, 0] = 5
    with pytest.raises(AttributeError):
        tri.stock = (2, 2, 2)


def test_bid_size():
    assert Bid((1, 3), 1).size == 4
