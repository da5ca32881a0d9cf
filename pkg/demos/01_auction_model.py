"""Build a small multi-unit auction, store it, and find its optimum by exhaustion.

Prices are kept as integer ticks (four decimals), so allocation values
compare exactly.
"""
import tempfile
from pathlib import Path

from cabb import Auction, brute_force_optimum, is_conflict_free, read_instance, write_instance
from cabb.fileformat import dumps

# two units of A, one of B, three of C
auction = Auction.from_lists([2, 1, 3], [
    ("5.00", [1, 1, 0]),   # A+B
    ("4.50", [2, 0, 0]),   # both units of A
    ("3.25", [0, 0, 3]),   # all of C
    ("2.10", [1, 0, 1]),
    ("1.99", [0, 1, 1]),
])
print(dumps(auction))

print("bids 0 and 1 together fit:", is_conflict_free(auction, [0, 1]))
print("bids 0 and 2 together fit:", is_conflict_free(auction, [0, 2]))

best = brute_force_optimum(auction)
print(f"optimum {best.value} granting {best.granted}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "auction.txt"
    write_instance(auction, path, {"note": "demo"})
    assert read_instance(path) == auction
    print("round trip through", path.name, "ok")
