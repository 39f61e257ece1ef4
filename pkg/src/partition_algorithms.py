import random
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from colorama import Fore

from config import BRUTE_FORCE_LIMIT, MIN_CUT_ENUMERATION_LIMIT
from src.errors import (InfeasibleError, InternalInvariantError, InvalidArgumentError, InvalidSubsetError,
                        ResourceLimitError)
from src.gomory_hu import flow_separating, gomory_hu_tree
from src.intersection import (TreeEdgeMatroid, has_transversal_basis, independent_transversal,
                              matroid_intersection_max, max_weight_common_independent)
from src.matroid import Matroid, PartitionMatroid, dual, min_weight_basis, truncate
from src.partition import Partition
from src.submodular import (GraphCoverageOracle, GraphCutOracle, Number, SubmodularOracle, WeightedGraph, lt,
                            mask_of, num_eq, partition_value, subset_key)
from utils.console import log, warn

Subset = FrozenSet[int]


# --- traces and tie-breaking ---

def _snapshot(blocks: Sequence[Subset]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(sorted(block)) for block in blocks)


@dataclass
class TraceStep:
    action: str
    detail: dict
    delta: Number
    candidates: int
    blocks: Tuple[Tuple[int, ...], ...]

    def as_dict(self) -> dict:
        return {"action": self.action, "detail": self.detail, "delta": self.delta,
                "candidates": self.candidates, "blocks": [list(block) for block in self.blocks]}


@dataclass
class AlgorithmTrace:
    algorithm: str
    steps: List[TraceStep] = field(default_factory=list)
    final_value: Optional[Number] = None

    def add(self, action: str, detail: dict, delta: Number, candidates: int, blocks: Sequence[Subset]):
        self.steps.append(TraceStep(action, detail, delta, candidates, _snapshot(blocks)))

    def as_dict(self) -> dict:
        return {"algorithm": self.algorithm, "steps": [step.as_dict() for step in self.steps],
                "final_value": self.final_value}


@dataclass(frozen=True)
class _Split:
    cost: Number
    block: int
    side: Subset
    rest: Subset

    @property
    def smaller(self) -> Subset:
        return min(self.side, self.rest, key=subset_key)

    def lexicographic_key(self):
        return self.block, subset_key(self.smaller)

    def largest_singleton(self) -> Optional[int]:
        singles = [next(iter(part)) for part in (self.side, self.rest) if len(part) == 1]
        return max(singles) if singles else None


@dataclass(frozen=True)
class TieBreakPolicy:
    """How greedy splitting picks among minimum-cost splits.

    lexicographic: lowest block index, then the smaller side first in subset order.
    adversarial: a split cutting off a singleton, largest such element first.
    random: uniform among the tied splits, reproducible from `seed`.
    """
    mode: str = "lexicographic"
    seed: Optional[int] = None

    MODES = ("lexicographic", "adversarial", "random")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise InvalidArgumentError(f"unknown tie-break mode {self.mode!r}, expected one of {self.MODES}")

    @classmethod
    def lexicographic(cls) -> "TieBreakPolicy":
        return cls("lexicographic")

    @classmethod
    def adversarial(cls) -> "TieBreakPolicy":
        return cls("adversarial")

    @classmethod
    def seeded(cls, seed: int) -> "TieBreakPolicy":
        return cls("random", seed)

    def rng(self) -> random.Random:
        return random.Random(self.seed)

    def choose(self, tied: List[_Split], rng: random.Random) -> _Split:
        ordered = sorted(tied, key=_Split.lexicographic_key)
        if self.mode == "adversarial":
            singles = [split for split in ordered if split.largest_singleton() is not None]
            if singles:
                return max(singles, key=lambda split: split.largest_singleton())
        if self.mode == "random":
            return rng.choice(ordered)
        return ordered[0]


# --- helpers ---

class _Values:
    """Per-run memo of f values keyed by bitmask."""

    def __init__(self, f: SubmodularOracle):
        self.f = f
        self._memo: Dict[int, Number] = {}

    def __call__(self, subset: Subset) -> Number:
        mask = mask_of(subset)
        if mask not in self._memo:
            self._memo[mask] = self.f.value(subset)
        return self._memo[mask]

    def total(self, blocks: Sequence[Subset]) -> Number:
        return sum((self(block) for block in blocks), 0)


def _constraint_rank(f: SubmodularOracle, matroid: Matroid) -> int:
    if matroid.ground != tuple(range(f.size)):
        raise InvalidArgumentError(f"the matroid ground set ({matroid.size} elements) does not match the oracle ({f.size})")
    k = matroid.full_rank
    if k == 0:
        raise InfeasibleError("the constraint matroid has rank 0, no partition has a transversal basis")
    return k


def _witness(matroid: Matroid, blocks: Sequence[Subset], algorithm: str) -> Subset:
    found = has_transversal_basis(matroid, blocks)
    if found is None:
        raise InternalInvariantError(f"{algorithm} produced a partition without a transversal basis")
    return found


def _whole(f: SubmodularOracle, matroid: Matroid, algorithm: str) -> Tuple[Partition, AlgorithmTrace]:
    blocks = [f.ground.elements]
    trace = AlgorithmTrace(algorithm, final_value=f.value(blocks[0]))
    return Partition.from_blocks(blocks, f.size, _witness(matroid, blocks, algorithm)), trace


# --- algorithms ---

def gh_greedy(f: SubmodularOracle, matroid: Matroid) -> Tuple[Partition, AlgorithmTrace]:
    """Cuts k-1 Gomory-Hu tree edges, lightest first, keeping the cut set independent in the tree-edge matroid."""
    k = _constraint_rank(f, matroid)
    if k == 1:
        return _whole(f, matroid, "gh_greedy")

    tree = gomory_hu_tree(f)
    graph = tree.as_graph()
    edge_matroid = TreeEdgeMatroid(graph, matroid)
    order = sorted(range(len(graph.edges)), key=lambda position: (graph.edges[position][2], position))
    values = _Values(f)
    trace = AlgorithmTrace("gh_greedy")

    cut: Subset = frozenset()
    current = values(f.ground.elements)
    for _ in range(k - 1):
        scanned = 0
        chosen = None
        for position in order:
            if position in cut:
                continue
            scanned += 1
            if edge_matroid.independent(cut | {position}):
                chosen = position
                break
        if chosen is None:
            raise InternalInvariantError(f"no tree edge extends the independent set {sorted(cut)}")
        cut = cut | {chosen}
        blocks = graph.components_without(cut)
        value = values.total(blocks)
        u, v, w = graph.edges[chosen]
        trace.add("cut-edge", {"edge": [u, v], "weight": w}, value - current, scanned, blocks)
        log("GREEDY", f"gh_greedy cuts {u}-{v} (w={w}), value {value}", Fore.CYAN)
        current = value

    blocks = graph.components_without(cut)
    partition = Partition.from_blocks(blocks, f.size, _witness(matroid, blocks, "gh_greedy"))
    trace.final_value = current
    return partition, trace


def min_split_pair(f: SubmodularOracle, block: Sequence[int], x: int, y: int) -> Tuple[Subset, Number]:
    """Best split (X, W-X) of W with x in X and y outside, by f(X) + f(W-X) - f(W)."""
    if x == y:
        raise InvalidArgumentError("x and y must differ")
    block = f.ground.subset(block)
    if x not in block or y not in block:
        raise InvalidSubsetError(f"{x} and {y} must both lie in the block")
    whole = f.value(block)

    if isinstance(f, GraphCutOracle):
        # f(X) + f(W-X) - f(W) is twice the weight of G[W] edges between X and W-X
        members = sorted(block)
        groups = [frozenset([element]) for element in members]
        side = flow_separating(f, groups, members.index(x), members.index(y))
        best = frozenset(members[index] for index in side)
        return best, f.value(best) + f.value(block - best) - whole

    if len(block) > MIN_CUT_ENUMERATION_LIMIT:
        raise ResourceLimitError(f"splitting a {len(block)}-element block is limited to {MIN_CUT_ENUMERATION_LIMIT}")
    free = sorted(block - {x, y})
    best, best_cost = None, None
    for size in range(len(free) + 1):
        for chosen in combinations(free, size):
            side = frozenset((x,) + chosen)
            cost = f.value(side) + f.value(block - side) - whole
            if best_cost is None or lt(cost, best_cost):
                best, best_cost = side, cost
    return best, best_cost


def greedy_split(f: SubmodularOracle, matroid: Matroid,
                 policy: Optional[TieBreakPolicy] = None) -> Tuple[Partition, AlgorithmTrace]:
    """Refines one block per round by the cheapest feasible split until there are k blocks.

    A split of W into (X, W-X) is feasible in round i when the refined partition has
    a transversal independent in M truncated to i+1. Feasibility is decided per pair
    (x, y) of future representatives, then min_split_pair finds the best split for it.
    """
    policy = policy or TieBreakPolicy()
    k = _constraint_rank(f, matroid)
    rng = policy.rng()
    values = _Values(f)
    trace = AlgorithmTrace("greedy_split")
    blocks: List[Subset] = [f.ground.elements]

    for round_ in range(1, k):
        level = truncate(matroid, round_ + 1)
        feasible_pairs: Dict[Tuple[int, int, int], bool] = {}
        splits: Dict[Tuple[int, FrozenSet[Subset]], _Split] = {}
        for index, block in enumerate(blocks):
            if len(block) < 2:
                continue
            others = blocks[:index] + blocks[index + 1:]
            whole = values(block)
            for x, y in permutations(sorted(block), 2):
                pair = (index, min(x, y), max(x, y))
                if pair not in feasible_pairs:
                    feasible_pairs[pair] = independent_transversal(level, [{x}, {y}] + others) is not None
                if not feasible_pairs[pair]:
                    continue
                side, _ = min_split_pair(f, block, x, y)
                rest = block - side
                cost = values(side) + values(rest) - whole
                splits.setdefault((index, frozenset([side, rest])), _Split(cost, index, side, rest))

        if not splits:
            raise InfeasibleError(f"no feasible split in round {round_}")
        best = min(split.cost for split in splits.values())
        tied = [split for split in splits.values() if num_eq(split.cost, best)]
        chosen = policy.choose(tied, rng)

        first, second = sorted((chosen.side, chosen.rest), key=min)
        blocks = blocks[:chosen.block] + [first, second] + blocks[chosen.block + 1:]
        trace.add("split", {"block": chosen.block, "parts": [sorted(first), sorted(second)]},
                  chosen.cost, len(splits), blocks)
        log("SPLIT", f"round {round_}: {sorted(first)} | {sorted(second)} cost {chosen.cost} "
                     f"({len(tied)} tied of {len(splits)})", Fore.CYAN)

    partition = Partition.from_blocks(blocks, f.size, _witness(matroid, blocks, "greedy_split"))
    trace.final_value = values.total(blocks)
    return partition, trace


def cheapest_singleton(f: SubmodularOracle, matroid: Matroid) -> Partition:
    """k-1 cheapest singletons (an independent set of M) plus the remainder block."""
    k = _constraint_rank(f, matroid)
    if not f.monotone:
        warn("GREEDY", f"cheapest_singleton on a {f.kind} oracle not declared monotone")
    if k == 1:
        return _whole(f, matroid, "cheapest_singleton")[0]

    weights = [f.value(frozenset([v])) for v in range(f.size)]
    chosen, _ = min_weight_basis(truncate(matroid, k - 1), weights)
    # the completing element lies outside the chosen singletons, so it always lands in the remainder
    completion = next((v for v in sorted(f.ground.elements - chosen, key=lambda v: (weights[v], v))
                       if matroid.independent(chosen | {v})), None)
    if completion is None:
        raise InternalInvariantError(f"the independent set {sorted(chosen)} cannot be completed to a basis")

    singles = sorted(chosen, key=lambda v: (weights[v], v))
    blocks = [frozenset([v]) for v in singles] + [f.ground.elements - chosen]
    log("GREEDY", f"cheapest singletons {singles}, completed by {completion}")
    return Partition.from_blocks(blocks, f.size, chosen | {completion})


def _require_tree(tree: WeightedGraph):
    if not tree.is_tree():
        raise InvalidArgumentError("the input graph is not a tree")


def tree_multiway_cut(tree: WeightedGraph, matroid: Matroid) -> Tuple[Partition, Number]:
    """Exact solver on trees: a minimum weight basis of the tree-edge matroid is the cheapest cut set."""
    _require_tree(tree)
    if matroid.ground != tuple(range(tree.n)):
        raise InvalidArgumentError("the matroid must live on the tree vertices")
    if matroid.full_rank == 0:
        raise InfeasibleError("the constraint matroid has rank 0")
    if matroid.full_rank == 1:
        blocks = [frozenset(range(tree.n))]
        return Partition.from_blocks(blocks, tree.n, _witness(matroid, blocks, "tree_multiway_cut")), 0

    edge_matroid = TreeEdgeMatroid(tree, matroid)
    cut, weight = min_weight_basis(edge_matroid, [w for _, _, w in tree.edges])
    blocks = tree.components_without(cut)
    partition = Partition.from_blocks(blocks, tree.n, _witness(matroid, blocks, "tree_multiway_cut"))
    log("TREE", f"cut edges {sorted(cut)} weight {weight}", Fore.GREEN)
    return partition, 2 * weight


def double_tree_multiway_cut(tree: WeightedGraph, first: Matroid, second: Matroid) -> Tuple[Partition, Number]:
    """Exact solver on trees under two matroids, each needing its own transversal basis.

    The cheapest edge set spanning in both tree-edge matroids is the complement of the
    heaviest common independent set of their duals. Its components are then merged
    pairwise while the merged block still holds at most one witness element of each.
    """
    _require_tree(tree)
    if first.full_rank != second.full_rank:
        raise InvalidArgumentError(f"matroid ranks differ ({first.full_rank} and {second.full_rank})")
    for matroid in (first, second):
        if matroid.ground != tuple(range(tree.n)):
            raise InvalidArgumentError("both matroids must live on the tree vertices")
    k = first.full_rank
    if k == 0:
        raise InfeasibleError("the constraint matroids have rank 0")

    edges = frozenset(range(len(tree.edges)))
    if k == 1:
        cut: Subset = frozenset()
    else:
        weights = [w for _, _, w in tree.edges]
        kept, _ = max_weight_common_independent(dual(TreeEdgeMatroid(tree, first)), dual(TreeEdgeMatroid(tree, second)),
                                                weights, maximum_cardinality=False)
        cut = edges - kept
    components = tree.components_without(cut)

    witnesses = []
    for matroid in (first, second):
        unit = PartitionMatroid(components, [1] * len(components), ground=matroid.ground)
        basis = matroid_intersection_max(matroid, unit)
        if len(basis) != k:
            raise InternalInvariantError("the common spanning set does not admit a transversal basis")
        witnesses.append(basis)

    blocks = list(components)
    while len(blocks) > k:
        pair = next(((i, j) for i, j in combinations(range(len(blocks)), 2)
                     if all(len((blocks[i] | blocks[j]) & basis) <= 1 for basis in witnesses)), None)
        if pair is None:
            raise InternalInvariantError(f"no mergeable pair among {len(blocks)} blocks")
        i, j = pair
        blocks[i] = blocks[i] | blocks[j]
        del blocks[j]

    partition = Partition.from_blocks(blocks, tree.n, witnesses[0], witnesses[1])
    value = 2 * tree.crossing_weight(blocks)
    log("TREE", f"double matroid cut: {len(components)} components merged to {k}, value {value}", Fore.GREEN)
    return partition, value


def _set_partitions(n: int, k: int) -> Iterator[List[int]]:
    """Restricted growth strings of length n using exactly k labels, in lexicographic order."""
    labels = [0] * n

    def extend(position: int, used: int):
        if n - position < k - used:
            return
        if position == n:
            if used == k:
                yield list(labels)
            return
        for label in range(min(used + 1, k)):
            labels[position] = label
            yield from extend(position + 1, max(used, label + 1))

    if n >= 1 and k >= 1:
        yield from extend(1, 1)


def _common_transversal(first: Matroid, second: Matroid, blocks: Sequence[Subset]) -> Optional[Subset]:
    for choice in product(*(sorted(block) for block in blocks)):
        candidate = frozenset(choice)
        if first.independent(candidate) and second.independent(candidate):
            return candidate
    return None


def brute_force_opt(f: SubmodularOracle, matroid: Matroid, second: Optional[Matroid] = None,
                    mode: Optional[str] = None) -> Tuple[Partition, Number]:
    """Exact optimum by enumerating every k-partition.

    With a second matroid, mode "double" asks for a transversal basis of each matroid,
    mode "common" for one transversal that is a basis of both.
    """
    n = f.size
    if n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"exhaustive search is limited to {BRUTE_FORCE_LIMIT} elements, got {n}")
    k = _constraint_rank(f, matroid)
    mode = mode or ("double" if second is not None else "single")
    if mode not in ("single", "double", "common"):
        raise InvalidArgumentError(f"unknown feasibility mode {mode!r}")
    if mode != "single":
        if second is None:
            raise InvalidArgumentError(f"mode {mode!r} needs a second matroid")
        if second.full_rank != k or second.ground != matroid.ground:
            raise InvalidArgumentError("both matroids need the same ground set and rank")

    values = _Values(f)
    best: Optional[Partition] = None
    best_value = None
    for labels in _set_partitions(n, k):
        blocks = [frozenset(v for v in range(n) if labels[v] == label) for label in range(k)]
        value = values.total(blocks)
        if best_value is not None and not lt(value, best_value):
            continue
        if mode == "common":
            witness = _common_transversal(matroid, second, blocks)
            if witness is None:
                continue
            candidate = Partition.from_blocks(blocks, n, witness, witness)
        else:
            witness = has_transversal_basis(matroid, blocks)
            if witness is None:
                continue
            other = None
            if mode == "double":
                other = has_transversal_basis(second, blocks)
                if other is None:
                    continue
            candidate = Partition.from_blocks(blocks, n, witness, other)
        best, best_value = candidate, value

    if best is None:
        raise InfeasibleError("no feasible k-partition exists")
    log("BRUTE", f"{mode} optimum {best_value} at {best.as_lists()}", Fore.GREEN)
    return best, best_value


def gh_greedy_coverage(f: GraphCoverageOracle, matroid: Matroid) -> Tuple[Partition, AlgorithmTrace]:
    """gh_greedy on the cut function of the coverage graph, scored by the coverage objective."""
    if not isinstance(f, GraphCoverageOracle):
        raise InvalidArgumentError("gh_greedy_coverage needs a graph-coverage oracle")
    cut = GraphCutOracle(f.graph, f.ground.labels)
    partition, trace = gh_greedy(cut, matroid)
    trace.algorithm = "gh_greedy_coverage"
    trace.final_value = partition_value(f, partition)
    return partition, trace


def main_lemma_bound(f: SubmodularOracle, blocks: Sequence[Sequence[int]], dropped: Optional[int] = None) -> Number:
    """Upper bound on the greedy i-partition value given a feasible i-partition `blocks`.

    Sum of f(V_j) + f(V - V_j) over every block but `dropped`, minus (i - 2) f(V).
    The bound holds whichever block is dropped; by default the largest term goes
    (lowest index on ties), which gives the tightest bound.
    """
    ground = f.ground.elements
    terms = [f.value(part) + f.value(ground - part) for part in map(frozenset, blocks)]
    if dropped is None:
        dropped = min(range(len(terms)), key=lambda index: (-terms[index], index))
    elif not 0 <= dropped < len(terms):
        raise InvalidArgumentError(f"dropped block {dropped} is outside 0..{len(terms) - 1}")
    total = sum((term for index, term in enumerate(terms) if index != dropped), 0)
    return total - (len(terms) - 2) * f.value(ground)
