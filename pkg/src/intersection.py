import os
from collections import deque
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from colorama import Fore

from config import WEIGHTED_INTERSECTION_CHECK_LIMIT
from src.errors import InternalInvariantError, InvalidArgumentError, InvalidPartitionError
from src.matroid import Matroid, PartitionMatroid, PavingMatroid, Weights, truncate
from src.partition import Partition
from src.submodular import WeightedGraph, leq, lt, num_eq
from utils.console import log

Subset = FrozenSet[int]


def _same_ground(m1: Matroid, m2: Matroid):
    if m1.ground != m2.ground:
        raise InvalidArgumentError(f"ground sets differ: {m1.kind} on {m1.size} elements, {m2.kind} on {m2.size}")


def _weighted_check_enabled() -> bool:
    return os.getenv("MATROIDCUT_CHECK_WEIGHTED", "0").lower() in ("1", "true", "yes")


class _ExchangeGraph:
    """Exchange graph of a common independent set I.

    Arcs go y -> x when I - y + x is independent in m1 and x -> y when it is
    independent in m2 (y in I, x outside I). Arcs are computed on demand.
    """

    def __init__(self, m1: Matroid, m2: Matroid, current: Subset):
        self.m1, self.m2, self.current = m1, m2, current
        self.inside = sorted(current)
        self.outside = sorted(m1.ground_set - current)
        self.sources = [x for x in self.outside if m1.independent(current | {x})]
        self.sinks = {x for x in self.outside if m2.independent(current | {x})}
        self._arcs: Dict[int, List[int]] = {}

    def successors(self, node: int) -> List[int]:
        if node not in self._arcs:
            if node in self.current:
                base = self.current - {node}
                self._arcs[node] = [x for x in self.outside if self.m1.independent(base | {x})]
            else:
                self._arcs[node] = [y for y in self.inside
                                    if self.m2.independent((self.current - {y}) | {node})]
        return self._arcs[node]

    def arcs(self):
        for node in self.inside + self.outside:
            for target in self.successors(node):
                yield node, target


def _path_from(parents: Dict[int, Optional[int]], end: int) -> List[int]:
    path = []
    node: Optional[int] = end
    while node is not None:
        path.append(node)
        node = parents[node]
    return path[::-1]


def _shortest_augmenting_path(graph: _ExchangeGraph) -> Optional[List[int]]:
    parents: Dict[int, Optional[int]] = {}
    queue = deque()
    for source in graph.sources:
        parents[source] = None
        queue.append(source)
    while queue:
        node = queue.popleft()
        if node in graph.sinks:
            return _path_from(parents, node)
        for target in graph.successors(node):
            if target not in parents:
                parents[target] = node
                queue.append(target)
    return None


def matroid_intersection_max(m1: Matroid, m2: Matroid) -> Subset:
    """Maximum cardinality common independent set by shortest augmenting paths."""
    _same_ground(m1, m2)
    current: Subset = frozenset()
    while True:
        path = _shortest_augmenting_path(_ExchangeGraph(m1, m2, current))
        if path is None:
            break
        current = current.symmetric_difference(path)
    log("INTERSECT", f"{m1.kind} x {m2.kind}: common independent set of size {len(current)}")
    return current


def _total(elements: Iterable[int], weights: Weights):
    return sum((weights[e] for e in elements), 0)


def _cheapest_augmenting_path(graph: _ExchangeGraph, weights: Weights) -> Optional[List[int]]:
    """Minimum length source-sink path, fewest arcs among those, by Bellman-Ford.

    A vertex outside I costs -w, a vertex in I costs +w.
    """
    if not graph.sources or not graph.sinks:
        return None

    def length(node):
        return weights[node] if node in graph.current else -weights[node]

    best: Dict[int, Tuple[object, int]] = {}
    parents: Dict[int, Optional[int]] = {}
    for source in graph.sources:
        best[source] = (length(source), 0)
        parents[source] = None
    arcs = list(graph.arcs())
    for _ in range(len(graph.inside) + len(graph.outside)):
        changed = False
        for u, v in arcs:
            if u not in best:
                continue
            candidate = (best[u][0] + length(v), best[u][1] + 1)
            known = best.get(v)
            if known is None or lt(candidate[0], known[0]) or \
                    (num_eq(candidate[0], known[0]) and candidate[1] < known[1]):
                best[v] = candidate
                parents[v] = u
                changed = True
        if not changed:
            break

    reached = [s for s in sorted(graph.sinks) if s in best]
    if not reached:
        return None
    end = reached[0]
    for sink in reached[1:]:
        if lt(best[sink][0], best[end][0]) or (num_eq(best[sink][0], best[end][0]) and best[sink][1] < best[end][1]):
            end = sink
    return _path_from(parents, end)


def _brute_force_weighted(m1: Matroid, m2: Matroid, weights: Weights, maximum_cardinality: bool):
    best_key = None
    for size in range(m1.size + 1):
        for combo in combinations(m1.ground, size):
            subset = frozenset(combo)
            if not (m1.independent(subset) and m2.independent(subset)):
                continue
            total = _total(subset, weights)
            key = (size, total) if maximum_cardinality else (total,)
            if best_key is None or key > best_key:
                best_key = key
    return best_key


def max_weight_common_independent(m1: Matroid, m2: Matroid, weights: Weights,
                                  maximum_cardinality: bool = True) -> Tuple[Subset, object]:
    """Weighted matroid intersection.

    Each augmentation along a cheapest path keeps I heaviest among common
    independent sets of its size. With `maximum_cardinality` the heaviest
    maximum-size set is returned, otherwise the heaviest set of any size.
    """
    _same_ground(m1, m2)
    for element in m1.ground:
        if weights[element] < 0:
            raise InvalidArgumentError(f"element {element} has negative weight {weights[element]}")

    current: Subset = frozenset()
    chosen, chosen_weight = current, 0
    while True:
        path = _cheapest_augmenting_path(_ExchangeGraph(m1, m2, current), weights)
        if path is None:
            break
        current = current.symmetric_difference(path)
        weight = _total(current, weights)
        if maximum_cardinality or leq(chosen_weight, weight):
            chosen, chosen_weight = current, weight

    log("INTERSECT", f"weighted {m1.kind} x {m2.kind}: size {len(chosen)} weight {chosen_weight}", Fore.CYAN)

    if _weighted_check_enabled() and m1.size <= WEIGHTED_INTERSECTION_CHECK_LIMIT:
        expected = _brute_force_weighted(m1, m2, weights, maximum_cardinality)
        found = (len(chosen), chosen_weight) if maximum_cardinality else (chosen_weight,)
        if expected[0] != found[0] or not num_eq(expected[-1], found[-1]):
            raise InternalInvariantError(f"weighted intersection found {found}, enumeration found {expected}")
    return chosen, chosen_weight


# --- transversals ---

def _paving_transversal(matroid: PavingMatroid, blocks: Sequence[Subset]) -> Optional[Subset]:
    # one fixed element from every block but one, then each element of the remaining block
    firsts = [min(block) for block in blocks]
    for rotation in range(len(blocks)):
        base = frozenset(firsts[:rotation] + firsts[rotation + 1:])
        for element in sorted(blocks[rotation]):
            candidate = base | {element}
            if matroid.independent(candidate):
                return candidate
    return None


def independent_transversal(matroid: Matroid, blocks: Sequence[Iterable[int]]) -> Optional[Subset]:
    """An independent set meeting each of the disjoint `blocks` exactly once, or None.

    The blocks need not cover the ground set; uncovered elements are never used.
    """
    blocks = [frozenset(block) for block in blocks]
    if len(blocks) > matroid.full_rank or any(not block for block in blocks):
        return None
    if not blocks:
        return frozenset()
    if isinstance(matroid, PavingMatroid):
        found = _paving_transversal(matroid, blocks)
        if found is not None:
            return found
    unit = PartitionMatroid(blocks, [1] * len(blocks), ground=matroid.ground)
    common = matroid_intersection_max(matroid, unit)
    return common if len(common) == len(blocks) else None


def has_transversal_basis(matroid: Matroid, partition: Union[Partition, Sequence[Iterable[int]]]) -> Optional[Subset]:
    """A basis B with |B ∩ V_i| = 1 for every block, or None when none exists."""
    blocks = [frozenset(block) for block in (partition.blocks if isinstance(partition, Partition) else partition)]
    seen: Subset = frozenset()
    for position, block in enumerate(blocks):
        if not block:
            raise InvalidPartitionError(f"block {position} is empty")
        if not block <= matroid.ground_set:
            raise InvalidPartitionError(f"block {position} leaves the ground set")
        if block & seen:
            raise InvalidPartitionError(f"block {position} overlaps an earlier block")
        seen |= block
    if seen != matroid.ground_set:
        raise InvalidPartitionError(f"blocks miss {sorted(matroid.ground_set - seen)}")
    if len(blocks) != matroid.full_rank:
        return None
    return independent_transversal(truncate(matroid, len(blocks)), blocks)


class TreeEdgeMatroid(Matroid):
    """Matroid on the edges of a spanning tree.

    A set X of tree edges is independent when the |X|+1 components of the tree
    minus X have a transversal that is independent in the inner matroid.
    """
    kind = "tree-edge"
    memoize = True

    def __init__(self, tree: WeightedGraph, inner: Matroid):
        if inner.ground != tuple(range(tree.n)):
            raise InvalidArgumentError("the tree must span the ground set of the inner matroid")
        if not tree.is_tree():
            raise InvalidArgumentError("the edge set does not form a spanning tree")
        if inner.full_rank < 1:
            raise InvalidArgumentError("the inner matroid needs rank at least 1")
        super().__init__(len(tree.edges))
        self.tree = tree
        self.inner = inner
        self._truncations: Dict[int, Matroid] = {}
        self._full_rank = inner.full_rank - 1

    def _truncated(self, level: int) -> Matroid:
        if level not in self._truncations:
            self._truncations[level] = truncate(self.inner, level)
        return self._truncations[level]

    def components(self, edges: Iterable[int]) -> List[Subset]:
        return self.tree.components_without(edges)

    def _independent(self, subset: Subset) -> bool:
        level = len(subset) + 1
        if level > self.inner.full_rank:
            return False
        components = self.components(subset)
        return has_transversal_basis(self._truncated(level), components) is not None

    def describe(self) -> dict:
        return {"kind": self.kind, "edges": [list(e) for e in self.tree.edges], "inner": self.inner.describe()}


def tree_edge_independent(tree_matroid: TreeEdgeMatroid, edges: Iterable[int]) -> bool:
    return tree_matroid.is_independent(edges)
