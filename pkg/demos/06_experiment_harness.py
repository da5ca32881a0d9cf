"""Run a small experiment plan and print per-cell means.

The same plan can be run from the shell with ``cabb bench --plan FILE --out DIR``.
"""
import tempfile
from pathlib import Path

from cabb.bench import parse_plan, run_plan

plan = parse_plan("""
family = camus
goods = 8
bids = 40, 80
replications = 4
master_seed = 3
configs = SquareRoot/lp, LpCoefficient/lp, SquareRoot/extnorm
greedy_report = true
""")

with tempfile.TemporaryDirectory() as tmp:
    result = run_plan(plan, tmp)
    print("files:", sorted(str(p.relative_to(tmp)) for p in Path(tmp).rglob("*.csv")))

print(f"{'bids':>5} {'config':<22}{'nodes':>9}{'lp calls':>10}{'gap':>9}")
for a in result.aggregates():
    print(f"{a['bids']:>5} {a['config']:<22}{a['nodes_mean']:>9.1f}"
          f"{a['lp_calls_mean']:>10.1f}{a['gap_mean']:>9.2%}")
print("every run kept init <= opt <= LP <= extnorm:",
      all(r.chain_ok() for r in result.rows))
