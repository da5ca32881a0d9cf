"""Exact search: branching criteria, bounds, and the LP reuse saving."""
from cabb import SolverConfig, solve
from cabb.generators import GeneratorSpec, generate
from cabb.heuristics import initialize

auction = generate(GeneratorSpec("camus", num_goods=10, num_bids=120, seed=11))
init, _ = initialize(auction)

configs = [
    SolverConfig(branching="SquareRoot"),
    SolverConfig(branching="SquareRoot", reuse_lp=False),
    SolverConfig(branching="LpCoefficient"),
    SolverConfig(branching="Price"),
    SolverConfig(branching="SquareRoot", bound="extnorm"),
]
print(f"initial allocation {init.value:.4f}")
for cfg in configs:
    alloc, stats = solve(auction, cfg, initial=init)
    label = f"{cfg.branching}/{cfg.bound}" + ("" if cfg.reuse_lp else "/noreuse")
    print(f"{label:<26} value {alloc.value:.4f}  nodes {stats.nodes_visited:>6}  "
          f"lp calls {stats.lp_calls:>5}  saved {stats.lp_calls_saved:>4}")

# anytime behaviour: a node limit returns the incumbent, flagged as not proven
alloc, stats = solve(auction, SolverConfig(branching="Random(0)", node_limit=50), init)
print("with a 50 node limit:", alloc.value, "proven optimal:", stats.proven_optimal)
