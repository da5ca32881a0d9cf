"""Seeded random auction generators.

Families
--------
``random``           Sandholm random: bundle size uniform in 1..n, price uniform.
``weighted-random``  as ``random``, price = bundle size * uniform factor.
``uniform``          every bundle has exactly ``set_size`` goods, price uniform.
``decay``            start with one good, add another with probability
                     ``alpha`` until the coin fails; price = size * uniform.
``camus``            multi-unit: several units per good, bids ask for 1..q
                     units of a few goods, price = units**beta * uniform.
``multipaths``       goods are edges of a random geometric graph, each bid is
                     a path between a source/sink pair; several alternative
                     paths are bid for every pair. A bid's price is the
                     straight-line source/sink distance times a uniform
                     factor (``pricing="path"`` uses the path's own length).

All randomness goes through :class:`cabb.rng.Xoshiro256`, so an instance is a
pure function of its :class:`GeneratorSpec`.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .fileformat import write_instance
from .model import Auction, Bid, DEFAULT_DECIMALS, InstanceError
from .rng import Xoshiro256

FAMILIES = ("camus", "random", "weighted-random", "uniform", "decay", "multipaths")
SINGLE_UNIT = frozenset(FAMILIES) - {"camus"}
_ALIASES = {
    "camusmultiunit": "camus",
    "sandholmrandom": "random",
    "sandholmweightedrandom": "weighted-random",
    "weightedrandom": "weighted-random",
    "sandholmuniform": "uniform",
    "sandholmdecay": "decay",
    "catsmultipaths": "multipaths",
}
MAX_ATTEMPTS = 1000


class SpecError(ValueError):
    pass


def family_name(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    key = _ALIASES.get(key.replace("-", ""), key)
    if key not in FAMILIES:
        raise SpecError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    return key


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    num_goods: int
    num_bids: int
    seed: int = 0
    # price factor range; meaning depends on the family (see module docstring)
    price_low: float = 0.0
    price_high: float = 1.0
    set_size: int = 3
    alpha: float = 0.55
    # camus
    units_low: int = 5
    units_high: int = 10
    max_goods_per_bid: int = 4
    max_units_per_good: int = 3
    beta: float = 1.2
    camus_low: float = 0.5
    camus_high: float = 1.5
    # multipaths
    num_vertices: int = 0          # 0 = num_goods // 2 + 1
    paths_per_pair: int = 5
    path_low: float = 1.0
    path_high: float = 1.5
    detour: float = 1.5            # edge weights perturbed by uniform(1, detour)
    pricing: str = "endpoints"     # or "path"
    decimals: int = DEFAULT_DECIMALS

    def __post_init__(self):
        object.__setattr__(self, "family", family_name(self.family))
        if self.num_goods < 1 or self.num_bids < 0:
            raise SpecError("need num_goods >= 1 and num_bids >= 0")
        if self.family == "uniform" and not 1 <= self.set_size <= self.num_goods:
            raise SpecError(f"set_size {self.set_size} not in 1..{self.num_goods}")
        if self.family == "decay" and not 0 < self.alpha < 1:
            raise SpecError("alpha must lie in (0, 1)")
        if self.family == "camus" and not 1 <= self.units_low <= self.units_high:
            raise SpecError("need 1 <= units_low <= units_high")
        if self.family == "multipaths":
            v = self.vertices
            if v < 2 or self.num_goods < v - 1 or self.num_goods > v * (v - 1) // 2:
                raise SpecError(
                    f"{self.num_goods} edges cannot form a simple connected graph "
                    f"on {v} vertices")
        if self.pricing not in ("endpoints", "path"):
            raise SpecError(f"unknown pricing {self.pricing!r}")
        if self.price_high < self.price_low:
            raise SpecError("price_high < price_low")

    @property
    def vertices(self) -> int:
        return self.num_vertices or self.num_goods // 2 + 1

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, value in d.items():
            if key not in types:
                raise SpecError(f"unknown generator parameter {key!r}")
            if isinstance(value, str) and types[key] in ("int", "float"):
                value = float(value) if types[key] == "float" else int(value)
            kw[key] = value
        return cls(**kw)

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return replace(self, seed=seed)


def _price_ticks(x: float, decimals: int) -> int:
    return max(1, int(round(x * 10**decimals)))


def _bundle(n: int, goods) -> tuple[int, ...]:
    q = [0] * n
    for g in goods:
        q[g] = 1
    return tuple(q)


def _single_unit_bid(spec: GeneratorSpec, rng: Xoshiro256) -> Bid:
    n = spec.num_goods
    fam = spec.family
    if fam in ("random", "weighted-random"):
        size = rng.randint(1, n)
        goods = rng.sample(n, size)
    elif fam == "uniform":
        goods = rng.sample(n, spec.set_size)
    else:  # decay
        goods = [rng.below(n)]
        while len(goods) < n and rng.bernoulli(spec.alpha):
            rest = [g for g in range(n) if g not in goods]
            goods.append(rng.choice(rest))
    factor = rng.uniform(spec.price_low, spec.price_high)
    price = factor * len(goods) if fam in ("weighted-random", "decay") else factor
    return Bid(_bundle(n, goods), _price_ticks(price, spec.decimals))


def _camus(spec: GeneratorSpec, rng: Xoshiro256) -> Auction:
    n = spec.num_goods
    stock = tuple(rng.randint(spec.units_low, spec.units_high) for _ in range(n))
    bids = []
    for _ in range(spec.num_bids):
        for _attempt in range(MAX_ATTEMPTS):
            size = rng.randint(1, min(n, spec.max_goods_per_bid))
            goods = rng.sample(n, size)
            q = [0] * n
            for g in goods:
                q[g] = rng.randint(1, spec.max_units_per_good)
            if all(qj <= kj for qj, kj in zip(q, stock)):
                break
        else:
            raise SpecError("could not draw a bid that fits the stock")
        price = sum(q) ** spec.beta * rng.uniform(spec.camus_low, spec.camus_high)
        bids.append(Bid(tuple(q), _price_ticks(price, spec.decimals)))
    return Auction(stock, tuple(bids), spec.decimals)


def random_graph(spec: GeneratorSpec, rng: Xoshiro256):
    """Random connected geometric graph: points in the unit square, a
    nearest-neighbour spanning tree, then the shortest missing edges."""
    v = spec.vertices
    pts = [(rng.random(), rng.random()) for _ in range(v)]

    def dist(a, b):
        return math.hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1])

    edges = []
    for i in range(1, v):
        j = min(range(i), key=lambda u: (dist(i, u), u))
        edges.append((j, i))
    present = set(edges)
    candidates = sorted(((dist(a, b), a, b) for a in range(v) for b in range(a + 1, v)
                         if (a, b) not in present))
    for _, a, b in candidates[:spec.num_goods - len(edges)]:
        edges.append((a, b))
    lengths = [dist(a, b) for a, b in edges]
    return pts, edges, lengths


def _path_edges(pred, edge_id, s: int, t: int) -> list[int]:
    out = []
    node = t
    while node != s:
        prev = int(pred[node])
        if prev < 0:
            raise SpecError("graph is disconnected")
        out.append(edge_id[(min(prev, node), max(prev, node))])
        node = prev
    return out


def _multipaths(spec: GeneratorSpec, rng: Xoshiro256) -> Auction:
    n = spec.num_goods
    v = spec.vertices
    pts, edges, lengths = random_graph(spec, rng)
    edge_id = {e: k for k, e in enumerate(edges)}
    rows = [a for a, b in edges] + [b for a, b in edges]
    cols = [b for a, b in edges] + [a for a, b in edges]
    bids = []
    while len(bids) < spec.num_bids:
        s, t = rng.sample(v, 2)
        for _ in range(min(spec.paths_per_pair, spec.num_bids - len(bids))):
            w = [length * rng.uniform(1.0, spec.detour) for length in lengths]
            graph = csr_matrix((w + w, (rows, cols)), shape=(v, v))
            _, pred = dijkstra(graph, indices=s, return_predecessors=True)
            path = _path_edges(pred, edge_id, s, t)
            if spec.pricing == "endpoints":
                length = math.hypot(pts[s][0] - pts[t][0], pts[s][1] - pts[t][1])
            else:
                length = sum(lengths[e] for e in path)
            price = length * rng.uniform(spec.path_low, spec.path_high)
            bids.append(Bid(_bundle(n, path), _price_ticks(price, spec.decimals)))
    return Auction((1,) * n, tuple(bids), spec.decimals)


def generate(spec: GeneratorSpec) -> Auction:
    """Draw one auction; deterministic in the whole spec, seed included."""
    rng = Xoshiro256(spec.seed)
    if spec.family == "camus":
        return _camus(spec, rng)
    if spec.family == "multipaths":
        return _multipaths(spec, rng)
    n = spec.num_goods
    bids = [_single_unit_bid(spec, rng) for _ in range(spec.num_bids)]
    try:
        return Auction((1,) * n, tuple(bids), spec.decimals)
    except InstanceError as exc:
        raise SpecError(str(exc)) from exc


def metadata(spec: GeneratorSpec) -> dict:
    return {f"gen.{k}": v for k, v in asdict(spec).items()}


def generate_file(spec: GeneratorSpec, destination) -> Auction:
    auction = generate(spec)
    write_instance(auction, destination, metadata(spec))
    return auction
