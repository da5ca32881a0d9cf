"""Exact winner determination for multi-unit combinatorial auctions.

Depth-first branch and bound with LP-relaxation upper bounds, a portfolio of
greedy initial allocations, seeded instance generators and an experiment
harness.
"""
from .fileformat import read_instance, write_instance
from .generators import GeneratorSpec, generate
from .heuristics import Criterion, Kind, default_portfolio, greedy, initialize
from .lp import LpProblem, LpSolution, build_relaxation, extended_norm_bound, solve_lp
from .model import (Allocation, Auction, Bid, allocation_value, brute_force_optimum,
                    is_conflict_free)
from .solver import SearchStats, SolverConfig, solve

__version__ = "0.1.0"

__all__ = [
    "Allocation", "Auction", "Bid", "Criterion", "GeneratorSpec", "Kind",
    "LpProblem", "LpSolution", "SearchStats", "SolverConfig",
    "allocation_value", "brute_force_optimum", "build_relaxation",
    "default_portfolio", "extended_norm_bound", "generate", "greedy",
    "initialize", "is_conflict_free", "read_instance", "solve", "solve_lp",
    "write_instance",
]
