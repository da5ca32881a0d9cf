"""Fractional relaxation versus the integer optimum.

On the AB/BC/CA triangle every pair of bids conflicts, so only one bid can
win, but the relaxation may grant half of each.
"""
from cabb import Auction, brute_force_optimum, build_relaxation, extended_norm_bound, solve_lp
from cabb.generators import GeneratorSpec, generate

tri = Auction.from_lists([1, 1, 1], [("1", [1, 1, 0]), ("1", [0, 1, 1]), ("1", [1, 0, 1])])
sol = solve_lp(build_relaxation(tri, tri.stock, [0, 1, 2]))
print("triangle LP value", round(sol.objective_value, 9), "coefficients", sol.coefficients)
print("triangle optimum ", brute_force_optimum(tri).value)

# the chain optimum <= LP <= light bound, on a generated instance
auction = generate(GeneratorSpec("camus", num_goods=5, num_bids=18, seed=3))
every = range(auction.num_bids)
opt = brute_force_optimum(auction).value
lp = solve_lp(build_relaxation(auction, auction.stock, every))
light = extended_norm_bound(auction, auction.stock, every)
print(f"optimum {opt:.4f} <= LP {lp.objective_value:.4f} <= extended norm {light:.4f}")
print(f"simplex iterations {lp.iterations}, dual bound {lp.upper_bound:.4f}")
