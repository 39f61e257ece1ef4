import random
from typing import Any, Callable, Dict, List, Optional, Sequence

from colorama import Fore

from config import DEFAULT_SEED, SCHEMA_VERSION
from src.errors import InvalidArgumentError
from src.instance_io import Instance, build_matroid
from src.matroid import Matroid, PartitionMatroid, UniformMatroid
from src.submodular import WeightedGraph, subset_of_mask
from utils.console import log
from utils.schemas import (GraphFunctionSpec, GraphicSpec, HyperedgeSpec, HypergraphFunctionSpec, InstanceFile,
                           LaminarSpec, Metadata, PartitionSpec, PavingSpec, RankFunctionSpec, TableFunctionSpec,
                           UniformSpec)

MATROID_KINDS = ("uniform", "partition", "graphic", "paving", "laminar")
FUNCTION_KINDS = ("graph-cut", "hypergraph-cut", "coverage", "matroid-rank", "mixed")


# --- parameter handling ---

class _Params:
    """Typed access to generator parameters, which may arrive as strings from the command line."""

    def __init__(self, family: str, params: Optional[Dict[str, Any]], allowed: Sequence[str]):
        self.family = family
        self.raw = dict(params or {})
        unknown = sorted(set(self.raw) - set(allowed))
        if unknown:
            raise InvalidArgumentError(f"unknown parameters {unknown} for family {family!r}, allowed {list(allowed)}")

    def integer(self, name: str, default: int, low: int, high: Optional[int] = None) -> int:
        value = self.raw.get(name, default)
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"parameter {name}={value!r} is not an integer")
        if value < low or (high is not None and value > high):
            raise InvalidArgumentError(f"parameter {name}={value} outside {low}..{high if high is not None else 'inf'}")
        self.raw[name] = value
        return value

    def number(self, name: str, default: float) -> float:
        value = self.raw.get(name, default)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"parameter {name}={value!r} is not a number")
        if not 0 <= value <= 1:
            raise InvalidArgumentError(f"parameter {name}={value} must lie in [0, 1]")
        self.raw[name] = value
        return value

    def choice(self, name: str, default: str, options: Sequence[str]) -> str:
        value = str(self.raw.get(name, default))
        if value not in options:
            raise InvalidArgumentError(f"parameter {name}={value!r}, expected one of {list(options)}")
        self.raw[name] = value
        return value

    def flag(self, name: str, default: bool) -> bool:
        value = self.raw.get(name, default)
        if isinstance(value, str):
            value = value.lower() in ("1", "true", "yes")
        self.raw[name] = bool(value)
        return bool(value)


def _labels(n: int) -> List[str]:
    return [f"v{i}" for i in range(n)]


def _instance(family: str, seed: int, params: _Params, labels: List[str], function, matroids, k: int,
              constraint: str = "double", extra: Optional[Dict[str, Any]] = None) -> Instance:
    suffix = "-".join(f"{key}{params.raw[key]}" for key in sorted(params.raw))
    name = f"{family}-{suffix}-s{seed}" if suffix else f"{family}-s{seed}"
    spec = InstanceFile(
        schema_version=SCHEMA_VERSION,
        labels=labels,
        function=function,
        matroids=matroids,
        constraint=constraint,
        k=k,
        metadata=Metadata(name=name, seed=seed, generator=family, params={**params.raw, **(extra or {})}),
    )
    log("GEN", f"{name}: n={len(labels)} k={k}", Fore.GREEN)
    return Instance.from_spec(spec)


# --- building blocks ---

def random_graph_edges(rng: random.Random, n: int, probability: float, max_weight: int) -> List[List[int]]:
    return [[u, v, rng.randint(1, max_weight)]
            for u in range(n) for v in range(u + 1, n) if rng.random() < probability]


def random_tree_edges(rng: random.Random, n: int, max_weight: int) -> List[List[int]]:
    return [[rng.randrange(v), v, rng.randint(1, max_weight)] for v in range(1, n)]


def random_hyperedges(rng: random.Random, n: int, max_weight: int) -> List[HyperedgeSpec]:
    count = rng.randint(n // 2 + 1, n + 2)
    return [HyperedgeSpec(members=sorted(rng.sample(range(n), rng.randint(2, min(3, n)))),
                          weight=rng.randint(1, max_weight)) for _ in range(count)]


def _split_into(rng: random.Random, elements: List[int], parts: int) -> List[List[int]]:
    """Random split of `elements` into `parts` nonempty groups."""
    shuffled = list(elements)
    rng.shuffle(shuffled)
    cuts = sorted(rng.sample(range(1, len(shuffled)), parts - 1)) if parts > 1 else []
    bounds = [0] + cuts + [len(shuffled)]
    return [sorted(shuffled[a:b]) for a, b in zip(bounds, bounds[1:])]


def random_matroid_spec(rng: random.Random, kind: str, n: int, k: int):
    """Random matroid of rank exactly k on n elements."""
    if not 0 < k <= n:
        raise InvalidArgumentError(f"cannot build a rank {k} matroid on {n} elements")
    if kind == "uniform":
        return UniformSpec(rank=k)

    if kind == "partition":
        loops = rng.randint(0, (n - k) // 2)
        covered = sorted(rng.sample(range(n), n - loops))
        return PartitionSpec(classes=_split_into(rng, covered, k), capacities=[1] * k)

    if kind == "graphic":
        edges = [(rng.randrange(v), v) for v in range(1, k + 1)]
        for _ in range(n - k):
            u, v = rng.sample(range(k + 1), 2)
            edges.append((u, v))
        rng.shuffle(edges)
        return GraphicSpec(vertices=k + 1, edges=edges)

    if kind == "paving":
        hyperedges: List[set] = []
        if k >= 1 and n > k:
            for _ in range(rng.randint(0, 4)):
                candidate = set(rng.sample(range(n), rng.randint(k, n - 1)))
                if k == 1 and hyperedges:
                    break
                if all(len(candidate & h) <= k - 2 for h in hyperedges):
                    hyperedges.append(candidate)
        return PavingSpec(rank=k, hyperedges=[sorted(h) for h in hyperedges])

    if kind == "laminar":
        for _ in range(20):
            top = _split_into(rng, list(range(n)), rng.randint(1, min(k, n)))
            family, bounds = [], []
            for members in top:
                family.append(members)
                bounds.append(rng.randint(1, len(members)))
                if len(members) >= 3 and rng.random() < 0.5:
                    family.append(sorted(rng.sample(members, len(members) - 1)))
                    bounds.append(rng.randint(1, len(members) - 1))
            spec = LaminarSpec(family=family, bounds=bounds, rank_cap=k)
            if build_matroid(spec, n).full_rank == k:
                return spec
        return LaminarSpec(family=[list(range(n))], bounds=[k], rank_cap=k)

    raise InvalidArgumentError(f"unknown matroid kind {kind!r}, expected one of {list(MATROID_KINDS)}")


def _function_spec(rng: random.Random, kind: str, n: int, probability: float, max_weight: int):
    if kind == "graph-cut":
        return GraphFunctionSpec(kind="graph-cut", edges=random_graph_edges(rng, n, probability, max_weight))
    if kind == "coverage":
        return GraphFunctionSpec(kind="graph-coverage", edges=random_graph_edges(rng, n, probability, max_weight))
    if kind == "hypergraph-cut":
        return HypergraphFunctionSpec(hyperedges=random_hyperedges(rng, n, max_weight))
    if kind == "matroid-rank":
        inner = rng.choice(["uniform", "partition", "laminar"])
        return RankFunctionSpec(matroid=random_matroid_spec(rng, inner, n, rng.randint(1, n)))
    if kind == "mixed":
        # nonnegative combination of a cut, a coverage and a rank function
        graph = WeightedGraph(n, tuple(tuple(e) for e in random_graph_edges(rng, n, probability, max_weight)))
        rank_matroid = build_matroid(random_matroid_spec(rng, "partition", n, rng.randint(1, n)), n)
        a, b, c = (rng.randint(0, 3) for _ in range(3))
        if a + b + c == 0:
            a = 1
        values = [a * graph.cut_weight(s) + b * graph.coverage_weight(s) + c * rank_matroid.rank(s)
                  for s in map(subset_of_mask, range(1 << n))]
        return TableFunctionSpec(values=values, symmetric=(b == 0 and c == 0), monotone=(a == 0))
    raise InvalidArgumentError(f"unknown function kind {kind!r}, expected one of {list(FUNCTION_KINDS)}")


# --- families ---

def _random_family(rng, seed, params: Dict[str, Any]) -> Instance:
    p = _Params("random", params, ["n", "k", "function", "matroid", "p", "max_weight"])
    n = p.integer("n", 6, 1, 14)
    k = p.integer("k", 2, 1, n)
    function = p.choice("function", "graph-cut", FUNCTION_KINDS)
    matroid = p.choice("matroid", "uniform", MATROID_KINDS)
    probability = p.number("p", 0.5)
    max_weight = p.integer("max_weight", 5, 1)
    spec = _function_spec(rng, function, n, probability, max_weight)
    return _instance("random", seed, p, _labels(n), spec, [random_matroid_spec(rng, matroid, n, k)], k)


def _tree_family(rng, seed, params) -> Instance:
    p = _Params("tree", params, ["n", "k", "matroid", "second", "max_weight"])
    n = p.integer("n", 6, 1)
    k = p.integer("k", 2, 1, n)
    matroid = p.choice("matroid", "partition", MATROID_KINDS)
    second = p.flag("second", False)
    max_weight = p.integer("max_weight", 5, 1)
    function = GraphFunctionSpec(kind="graph-cut", edges=random_tree_edges(rng, n, max_weight))
    matroids = [random_matroid_spec(rng, matroid, n, k)]
    if second:
        matroids.append(random_matroid_spec(rng, matroid, n, k))
    return _instance("tree", seed, p, _labels(n), function, matroids, k)


def _coverage_family(rng, seed, params) -> Instance:
    p = _Params("coverage", params, ["n", "k", "matroid", "p", "max_weight"])
    n = p.integer("n", 6, 1)
    k = p.integer("k", 2, 1, n)
    matroid = p.choice("matroid", "uniform", MATROID_KINDS)
    probability = p.number("p", 0.5)
    max_weight = p.integer("max_weight", 5, 1)
    function = GraphFunctionSpec(kind="graph-coverage", edges=random_graph_edges(rng, n, probability, max_weight))
    return _instance("coverage", seed, p, _labels(n), function, [random_matroid_spec(rng, matroid, n, k)], k)


def _tightness_family(rng, seed, params) -> Instance:
    """Pairs S_i = {i, i+k}; objective is the rank of {|X ∩ S_i| <= 1, |X| <= k-1}, constraint U(k, 2k)."""
    p = _Params("tightness", params, ["k"])
    k = p.integer("k", 3, 2)
    objective = LaminarSpec(family=[[i, i + k] for i in range(k)], bounds=[1] * k, rank_cap=k - 1)
    return _instance("tightness", seed, p, _labels(2 * k), RankFunctionSpec(matroid=objective),
                     [UniformSpec(rank=k)], k)


def random_rank_partition(rng: random.Random, elements: List[int], rank: int,
                          planted: Optional[List[int]] = None) -> List[List[int]]:
    """Split `elements` into `rank` classes; a planted set gets one element per class."""
    if planted is None:
        return _split_into(rng, elements, rank)
    order = list(planted)
    rng.shuffle(order)
    classes = [[e] for e in order]
    for e in elements:
        if e not in planted:
            classes[rng.randrange(rank)].append(e)
    return [sorted(c) for c in classes]


def _common_mc_family(rng, seed, params) -> Instance:
    """Depth-two tree encoding three partition matroids on S = {0..m-1}, each of rank r.

    Class vertices v_i hang off the root z by weight 0 edges and the members of the
    third matroid's class i hang off v_i by unit edges. The two constraint matroids
    are the first two partition matroids plus {z} as a free class, with every v_i a loop.
    """
    p = _Params("common-mc", params, ["m", "r", "planted"])
    m = p.integer("m", 4, 1)
    r = p.integer("r", 2, 1, m)
    planted_flag = p.flag("planted", False)
    elements = list(range(m))
    planted = sorted(rng.sample(elements, r)) if planted_flag else None
    first, second, third = (random_rank_partition(rng, elements, r, planted) for _ in range(3))

    class_vertex = [m + i for i in range(r)]
    root = m + r
    edges = [[root, v, 0] for v in class_vertex]
    for i, members in enumerate(third):
        edges.extend([s, class_vertex[i], 1] for s in members)
    matroids = [PartitionSpec(classes=[*classes, [root]], capacities=[1] * (r + 1)) for classes in (first, second)]
    labels = [f"s{i}" for i in range(m)] + [f"w{i}" for i in range(r)] + ["z"]
    return _instance("common-mc", seed, p, labels, GraphFunctionSpec(kind="graph-cut", edges=edges),
                     matroids, r + 1, constraint="common", extra={"classes": [first, second, third]})


def global_matroid(n: int, k: int) -> Matroid:
    """Every k-partition is feasible: U(k, n)."""
    return UniformMatroid(k, n)


def terminal_matroid(n: int, terminals: Sequence[int]) -> Matroid:
    """Each terminal alone in a unit class, every other element a loop: one terminal per block."""
    return PartitionMatroid([[t] for t in terminals], [1] * len(terminals), ground=n)


def _terminals_family(rng, seed, params) -> Instance:
    p = _Params("terminals", params, ["n", "k", "p", "max_weight"])
    n = p.integer("n", 6, 2)
    k = p.integer("k", 3, 1, n)
    probability = p.number("p", 0.5)
    max_weight = p.integer("max_weight", 5, 1)
    terminals = sorted(rng.sample(range(n), k))
    function = GraphFunctionSpec(kind="graph-cut", edges=random_graph_edges(rng, n, probability, max_weight))
    matroid = PartitionSpec(classes=[[t] for t in terminals], capacities=[1] * k)
    return _instance("terminals", seed, p, _labels(n), function, [matroid], k)


def _global_family(rng, seed, params) -> Instance:
    p = _Params("global", params, ["n", "k", "p", "max_weight"])
    n = p.integer("n", 6, 1)
    k = p.integer("k", 2, 1, n)
    probability = p.number("p", 0.5)
    max_weight = p.integer("max_weight", 5, 1)
    function = GraphFunctionSpec(kind="graph-cut", edges=random_graph_edges(rng, n, probability, max_weight))
    return _instance("global", seed, p, _labels(n), function, [UniformSpec(rank=k)], k)


FAMILIES: Dict[str, Callable[..., Instance]] = {
    "random": _random_family,
    "tree": _tree_family,
    "coverage": _coverage_family,
    "tightness": _tightness_family,
    "common-mc": _common_mc_family,
    "terminals": _terminals_family,
    "global": _global_family,
}


def generate(family: str, params: Optional[Dict[str, Any]] = None, seed: Optional[int] = None) -> Instance:
    """Builds an instance of `family`; the same family, params and seed always give the same instance."""
    if family not in FAMILIES:
        raise InvalidArgumentError(f"unknown generator family {family!r}, expected one of {sorted(FAMILIES)}")
    seed = DEFAULT_SEED if seed is None else seed
    rng = random.Random(f"{family}:{seed}")
    return FAMILIES[family](rng, seed, params)
