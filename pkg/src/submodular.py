import hashlib
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
from colorama import Fore

from config import EPSILON, PROPERTY_EXHAUSTIVE_LIMIT, PROPERTY_FULL_PAIR_LIMIT, PROPERTY_SAMPLE_COUNT
from src.errors import InvalidArgumentError, InvalidSubsetError
from src.partition import Partition, validate_blocks
from utils.console import log

Number = Union[int, Fraction, float]
Subset = FrozenSet[int]


# --- numeric and subset helpers ---

def _uses_float(*values: Number) -> bool:
    return any(isinstance(value, float) for value in values)


def leq(a: Number, b: Number) -> bool:
    if _uses_float(a, b):
        return a <= b + EPSILON
    return a <= b


def lt(a: Number, b: Number) -> bool:
    if _uses_float(a, b):
        return a < b - EPSILON
    return a < b


def num_eq(a: Number, b: Number) -> bool:
    return leq(a, b) and leq(b, a)


def subset_key(subset: Iterable[int]) -> Tuple[int, Tuple[int, ...]]:
    """Enumeration order used for every tie-break: smaller sets first, then lexicographic."""
    ordered = tuple(sorted(subset))
    return len(ordered), ordered


def as_subset(elements: Iterable[int], size: int) -> Subset:
    subset = frozenset(elements)
    for element in subset:
        if isinstance(element, bool) or not isinstance(element, int) or element < 0 or element >= size:
            raise InvalidSubsetError(f"element {element!r} is outside the ground set of size {size}")
    return subset


def mask_of(subset: Iterable[int]) -> int:
    mask = 0
    for element in subset:
        mask |= 1 << element
    return mask


def subset_of_mask(mask: int) -> Subset:
    elements = []
    index = 0
    while mask:
        if mask & 1:
            elements.append(index)
        mask >>= 1
        index += 1
    return frozenset(elements)


def _check_weight(weight: Number, where: str) -> Number:
    if isinstance(weight, bool) or not isinstance(weight, (int, Fraction, float)):
        raise InvalidArgumentError(f"{where}: weight {weight!r} is not a number")
    if weight < 0:
        raise InvalidArgumentError(f"{where}: weight {weight} is negative")
    return weight


# --- ground set and weighted structures ---

@dataclass(frozen=True)
class GroundSet:
    size: int
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 1:
            raise InvalidArgumentError("a ground set needs at least one element")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise InvalidArgumentError(f"{len(self.labels)} labels given for {self.size} elements")
            if len(set(self.labels)) != len(self.labels):
                raise InvalidArgumentError("element labels must be unique")

    @property
    def elements(self) -> Subset:
        return frozenset(range(self.size))

    def label(self, element: int) -> str:
        return self.labels[element] if self.labels else str(element)

    def index(self, label: str) -> int:
        if self.labels and label in self.labels:
            return self.labels.index(label)
        raise InvalidSubsetError(f"unknown element label {label!r}")

    def subset(self, elements: Iterable[int]) -> Subset:
        return as_subset(elements, self.size)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected multigraph on vertices 0..n-1. Parallel edges are summed when evaluated."""
    n: int
    edges: Tuple[Tuple[int, int, Number], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v), w) for u, v, w in self.edges))
        for position, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidArgumentError(f"edge {position} ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise InvalidArgumentError(f"edge {position} is a self-loop on {u}")
            _check_weight(w, f"edge {position}")

    @property
    def total_weight(self) -> Number:
        return sum((w for _, _, w in self.edges), 0)

    def cut_weight(self, subset: Subset) -> Number:
        return sum((w for u, v, w in self.edges if (u in subset) != (v in subset)), 0)

    def coverage_weight(self, subset: Subset) -> Number:
        return sum((w for u, v, w in self.edges if u in subset or v in subset), 0)

    def crossing_weight(self, blocks: Sequence[Subset]) -> Number:
        """Total weight of edges whose endpoints lie in different blocks (each edge counted once)."""
        owner = {}
        for position, block in enumerate(blocks):
            for element in block:
                owner[element] = position
        return sum((w for u, v, w in self.edges if owner[u] != owner[v]), 0)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        for u, v, w in self.edges:
            if graph.has_edge(u, v):
                graph[u][v]["weight"] += w
            else:
                graph.add_edge(u, v, weight=w)
        return graph

    def is_tree(self) -> bool:
        multigraph = nx.MultiGraph()
        multigraph.add_nodes_from(range(self.n))
        multigraph.add_edges_from((u, v) for u, v, _ in self.edges)
        return nx.is_tree(multigraph)

    def components_without(self, removed: Iterable[int]) -> List[Subset]:
        """Connected components after deleting the edges with the given positions, ordered by smallest vertex."""
        removed = set(removed)
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from((u, v) for position, (u, v, _) in enumerate(self.edges) if position not in removed)
        components = [frozenset(component) for component in nx.connected_components(graph)]
        return sorted(components, key=min)


@dataclass(frozen=True)
class WeightedHypergraph:
    n: int
    hyperedges: Tuple[Tuple[Subset, Number], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "hyperedges", tuple((frozenset(members), w) for members, w in self.hyperedges))
        for position, (members, w) in enumerate(self.hyperedges):
            if not members:
                raise InvalidArgumentError(f"hyperedge {position} is empty")
            if any(not (0 <= member < self.n) for member in members):
                raise InvalidArgumentError(f"hyperedge {position} has a vertex out of range")
            _check_weight(w, f"hyperedge {position}")

    def cut_weight(self, subset: Subset) -> Number:
        # a hyperedge is cut when it meets both S and V-S
        return sum((w for members, w in self.hyperedges if members & subset and members - subset), 0)


# --- oracles ---

class SubmodularOracle(ABC):
    """Nonnegative set function with f(empty) = 0 over the ground set 0..n-1.

    Oracles are immutable after construction. `evaluate` validates its argument,
    `value` trusts the caller and is what the algorithms use in their inner loops.
    """
    kind = ""

    def __init__(self, ground: GroundSet, symmetric: bool = False, monotone: bool = False):
        self.ground = ground
        self.symmetric = symmetric
        self.monotone = monotone

    @property
    def size(self) -> int:
        return self.ground.size

    def evaluate(self, subset: Iterable[int]) -> Number:
        return self.value(self.ground.subset(subset))

    @abstractmethod
    def value(self, subset: Subset) -> Number:
        ...

    @abstractmethod
    def payload(self) -> dict:
        ...

    def fingerprint(self) -> str:
        return hashlib.md5(f"{self.kind}:{self.payload()!r}".encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.size})"


class GraphCutOracle(SubmodularOracle):
    kind = "graph-cut"

    def __init__(self, graph: WeightedGraph, labels: Optional[Sequence[str]] = None):
        super().__init__(GroundSet(graph.n, tuple(labels) if labels else None), symmetric=True, monotone=False)
        self.graph = graph

    def value(self, subset: Subset) -> Number:
        return self.graph.cut_weight(subset)

    def payload(self) -> dict:
        return {"edges": self.graph.edges}


class GraphCoverageOracle(SubmodularOracle):
    kind = "graph-coverage"

    def __init__(self, graph: WeightedGraph, labels: Optional[Sequence[str]] = None):
        super().__init__(GroundSet(graph.n, tuple(labels) if labels else None), symmetric=False, monotone=True)
        self.graph = graph

    def value(self, subset: Subset) -> Number:
        return self.graph.coverage_weight(subset)

    def payload(self) -> dict:
        return {"edges": self.graph.edges}


class HypergraphCutOracle(SubmodularOracle):
    kind = "hypergraph-cut"

    def __init__(self, hypergraph: WeightedHypergraph, labels: Optional[Sequence[str]] = None):
        super().__init__(GroundSet(hypergraph.n, tuple(labels) if labels else None), symmetric=True, monotone=False)
        self.hypergraph = hypergraph

    def value(self, subset: Subset) -> Number:
        return self.hypergraph.cut_weight(subset)

    def payload(self) -> dict:
        return {"hyperedges": tuple((tuple(sorted(members)), w) for members, w in self.hypergraph.hyperedges)}


class MatroidRankOracle(SubmodularOracle):
    kind = "matroid-rank"

    def __init__(self, matroid, labels: Optional[Sequence[str]] = None):
        if tuple(matroid.ground) != tuple(range(len(matroid.ground))):
            raise InvalidArgumentError("a rank objective needs a matroid on 0..n-1")
        super().__init__(GroundSet(len(matroid.ground), tuple(labels) if labels else None), symmetric=False, monotone=True)
        self.matroid = matroid

    def value(self, subset: Subset) -> Number:
        return self.matroid.rank(subset)

    def payload(self) -> dict:
        return {"matroid": self.matroid.describe()}


class ExplicitTableOracle(SubmodularOracle):
    """Full value table indexed by the bitmask of the subset."""
    kind = "explicit-table"

    def __init__(self, size: int, values: Sequence[Number], symmetric: bool = False, monotone: bool = False,
                 labels: Optional[Sequence[str]] = None):
        super().__init__(GroundSet(size, tuple(labels) if labels else None), symmetric=symmetric, monotone=monotone)
        if len(values) != 1 << size:
            raise InvalidArgumentError(f"a table over {size} elements needs {1 << size} values, got {len(values)}")
        for mask, value in enumerate(values):
            _check_weight(value, f"table entry {mask}")
        if values[0] != 0:
            raise InvalidArgumentError("f(empty set) must be 0")
        self.values = tuple(values)

    @classmethod
    def from_function(cls, size: int, function, **flags) -> "ExplicitTableOracle":
        return cls(size, [function(subset_of_mask(mask)) for mask in range(1 << size)], **flags)

    def value(self, subset: Subset) -> Number:
        return self.values[mask_of(subset)]

    def payload(self) -> dict:
        return {"values": self.values}


# --- operations ---

def evaluate(oracle: SubmodularOracle, subset: Iterable[int]) -> Number:
    return oracle.evaluate(subset)


def partition_value(oracle: SubmodularOracle, partition: Union[Partition, Iterable[Iterable[int]]]) -> Number:
    blocks = partition.blocks if isinstance(partition, Partition) else partition
    checked = validate_blocks(blocks, oracle.size)
    return sum((oracle.value(block) for block in checked), 0)


@dataclass(frozen=True)
class PropertyReport:
    submodular: bool
    symmetric: bool
    monotone: bool
    sampled: bool
    submodular_witness: Optional[Tuple[Subset, Subset]] = None
    symmetric_witness: Optional[Subset] = None
    monotone_witness: Optional[Tuple[Subset, Subset]] = None
    declared_consistent: bool = True

    def as_dict(self) -> Dict:
        def _sets(pair):
            return None if pair is None else [sorted(part) for part in pair]
        return {
            "submodular": self.submodular,
            "symmetric": self.symmetric,
            "monotone": self.monotone,
            "sampled": self.sampled,
            "submodular_witness": _sets(self.submodular_witness),
            "symmetric_witness": None if self.symmetric_witness is None else sorted(self.symmetric_witness),
            "monotone_witness": _sets(self.monotone_witness),
            "declared_consistent": self.declared_consistent,
        }


def _value_table(oracle: SubmodularOracle) -> List[Number]:
    return [oracle.value(subset_of_mask(mask)) for mask in range(1 << oracle.size)]


def _exhaustive_report(oracle: SubmodularOracle, full_pairs: bool) -> PropertyReport:
    n = oracle.size
    full = (1 << n) - 1
    table = _value_table(oracle)

    submodular_witness = None
    if full_pairs:
        for a in range(1 << n):
            for b in range(1 << n):
                if lt(table[a] + table[b], table[a | b] + table[a & b]):
                    submodular_witness = (subset_of_mask(a), subset_of_mask(b))
                    break
            if submodular_witness:
                break
    else:
        # f(S+u) + f(S+v) >= f(S+u+v) + f(S) for all S and u, v outside S
        for mask in range(1 << n):
            outside = [u for u in range(n) if not mask >> u & 1]
            for i, u in enumerate(outside):
                with_u = mask | 1 << u
                for v in outside[i + 1:]:
                    with_v = mask | 1 << v
                    if lt(table[with_u] + table[with_v], table[with_u | with_v] + table[mask]):
                        submodular_witness = (subset_of_mask(with_u), subset_of_mask(with_v))
                        break
                if submodular_witness:
                    break
            if submodular_witness:
                break

    symmetric_witness = next(
        (subset_of_mask(mask) for mask in range(1 << n) if not num_eq(table[mask], table[full ^ mask])), None)

    monotone_witness = None
    for mask in range(1 << n):
        for u in range(n):
            if not mask >> u & 1 and lt(table[mask | 1 << u], table[mask]):
                monotone_witness = (subset_of_mask(mask), subset_of_mask(mask | 1 << u))
                break
        if monotone_witness:
            break

    return PropertyReport(
        submodular=submodular_witness is None,
        symmetric=symmetric_witness is None,
        monotone=monotone_witness is None,
        sampled=False,
        submodular_witness=submodular_witness,
        symmetric_witness=symmetric_witness,
        monotone_witness=monotone_witness,
    )


def _sampled_report(oracle: SubmodularOracle, samples: int, seed: Optional[int]) -> PropertyReport:
    n = oracle.size
    ground = oracle.ground.elements
    rng = random.Random(seed)
    submodular_witness = symmetric_witness = monotone_witness = None
    for _ in range(samples):
        base = frozenset(element for element in range(n) if rng.random() < 0.5)
        outside = sorted(ground - base)
        f_base = oracle.value(base)
        if symmetric_witness is None and not num_eq(f_base, oracle.value(ground - base)):
            symmetric_witness = base
        if not outside:
            continue
        u = rng.choice(outside)
        f_u = oracle.value(base | {u})
        if monotone_witness is None and lt(f_u, f_base):
            monotone_witness = (base, base | {u})
        if submodular_witness is None and len(outside) >= 2:
            v = rng.choice([element for element in outside if element != u])
            f_v = oracle.value(base | {v})
            if lt(f_u + f_v, oracle.value(base | {u, v}) + f_base):
                submodular_witness = (base | {u}, base | {v})
    return PropertyReport(
        submodular=submodular_witness is None,
        symmetric=symmetric_witness is None,
        monotone=monotone_witness is None,
        sampled=True,
        submodular_witness=submodular_witness,
        symmetric_witness=symmetric_witness,
        monotone_witness=monotone_witness,
    )


def verify_properties(oracle: SubmodularOracle, full_pairs: bool = False,
                      samples: Optional[int] = None, seed: Optional[int] = None) -> PropertyReport:
    """Checks submodularity, symmetry and monotonicity.

    Exhaustive up to PROPERTY_EXHAUSTIVE_LIMIT elements (submodularity via the local
    exchange condition, or over all pairs when `full_pairs` is set and n is small enough),
    sampled beyond that with `sampled=True` in the report.
    """
    n = oracle.size
    if full_pairs and n > PROPERTY_FULL_PAIR_LIMIT:
        raise InvalidArgumentError(f"the all-pairs check is limited to {PROPERTY_FULL_PAIR_LIMIT} elements")
    if n <= PROPERTY_EXHAUSTIVE_LIMIT:
        report = _exhaustive_report(oracle, full_pairs)
    else:
        report = _sampled_report(oracle, samples or PROPERTY_SAMPLE_COUNT, seed)

    consistent = report.submodular and (report.symmetric or not oracle.symmetric) \
        and (report.monotone or not oracle.monotone)
    report = PropertyReport(**{**report.__dict__, "declared_consistent": consistent})
    log("ORACLE", f"{oracle.kind} n={n}: submodular={report.submodular} symmetric={report.symmetric} "
                  f"monotone={report.monotone} sampled={report.sampled}",
        Fore.GREEN if consistent else Fore.RED)
    return report
