"""Greedy initial allocations: one per ordering criterion, keep the best."""
from cabb import Criterion, default_portfolio, greedy, initialize
from cabb.generators import GeneratorSpec, generate
from cabb.solver import solve

auction = generate(GeneratorSpec("camus", num_goods=10, num_bids=150, seed=7))
best, per_criterion = initialize(auction)
optimum = solve(auction, initial=best)[0].value

print(f"{'criterion':<24}{'value':>10}{'% of optimum':>15}")
for crit in default_portfolio():
    value = per_criterion[crit].value
    print(f"{str(crit):<24}{value:>10.2f}{100 * value / optimum:>14.1f}%")
print(f"best greedy {best.value:.2f}, optimum {optimum:.2f}")

# criteria also parse from text
print(greedy(auction, Criterion.parse("random:42")).value)
