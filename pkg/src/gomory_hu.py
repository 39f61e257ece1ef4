from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

import networkx as nx
from colorama import Fore
from networkx.algorithms.flow import edmonds_karp

from config import MIN_CUT_ENUMERATION_LIMIT, SYMMETRY_CHECK_LIMIT
from src.errors import InvalidArgumentError, InvalidSubsetError, PropertyViolationError, ResourceLimitError
from src.submodular import GraphCutOracle, Number, SubmodularOracle, WeightedGraph, lt, num_eq, subset_of_mask
from utils.console import log, warn

Subset = FrozenSet[int]


@dataclass(frozen=True)
class GomoryHuTree:
    """Cut-equivalent tree of a symmetric submodular function.

    For every pair s, t the lightest edge on the tree path has the weight of a
    minimum s-t cut, and removing it leaves the two sides of such a cut.
    """
    n: int
    edges: Tuple[Tuple[int, int, Number], ...]
    fingerprint: str
    trusted: bool = False

    def as_graph(self) -> WeightedGraph:
        return WeightedGraph(self.n, self.edges)

    def path_edges(self, s: int, t: int) -> List[int]:
        if s == t:
            raise InvalidArgumentError("s and t must differ")
        for element in (s, t):
            if not 0 <= element < self.n:
                raise InvalidSubsetError(f"element {element} is outside 0..{self.n - 1}")
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        for position, (u, v, _) in enumerate(self.edges):
            graph.add_edge(u, v, position=position)
        nodes = nx.shortest_path(graph, s, t)
        return [graph[u][v]["position"] for u, v in zip(nodes, nodes[1:])]

    def path_minimum(self, s: int, t: int) -> Tuple[int, Number]:
        """Position and weight of the lightest edge on the s-t path (lowest position on ties)."""
        position = min(self.path_edges(s, t), key=lambda p: (self.edges[p][2], p))
        return position, self.edges[position][2]

    def cut_side(self, s: int, t: int) -> Subset:
        position, _ = self.path_minimum(s, t)
        return next(c for c in self.as_graph().components_without([position]) if s in c)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(edge) for edge in self.edges],
                "fingerprint": self.fingerprint, "trusted": self.trusted}


def _residual_source_side(graph: nx.DiGraph, flows: Dict, source: int) -> Set[int]:
    # vertices reachable from the source in the residual network: the smallest minimum cut side
    reached = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.successors(u):
            if v in reached:
                continue
            residual = graph[u][v]["capacity"] - flows[u][v] + flows[v].get(u, 0)
            if lt(0, residual):
                reached.add(v)
                queue.append(v)
    return reached


def flow_separating(f: GraphCutOracle, groups: Sequence[Subset], s_group: int, t_group: int) -> Set[int]:
    owner = {element: index for index, group in enumerate(groups) for element in group}
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(groups)))
    for u, v, w in f.graph.edges:
        a, b = owner.get(u), owner.get(v)
        if a is None or b is None or a == b:
            continue
        for x, y in ((a, b), (b, a)):
            if graph.has_edge(x, y):
                graph[x][y]["capacity"] += w
            else:
                graph.add_edge(x, y, capacity=w)
    _, flows = nx.maximum_flow(graph, s_group, t_group, capacity="capacity", flow_func=edmonds_karp)
    return _residual_source_side(graph, flows, s_group)


def _enumerated_separating(f: SubmodularOracle, groups: Sequence[Subset], s_group: int, t_group: int) -> Set[int]:
    if f.size > MIN_CUT_ENUMERATION_LIMIT:
        raise ResourceLimitError(
            f"minimum cuts of {f.kind} oracles are enumerated, limited to {MIN_CUT_ENUMERATION_LIMIT} elements")
    free = [index for index in range(len(groups)) if index not in (s_group, t_group)]
    best_side, best_value = None, None
    for size in range(len(free) + 1):
        for chosen in combinations(free, size):
            side = {s_group, *chosen}
            value = f.value(frozenset().union(*(groups[index] for index in side)))
            if best_value is None or lt(value, best_value):
                best_side, best_value = side, value
    return best_side


def _min_separating(f: SubmodularOracle, groups: Sequence[Subset], s_group: int, t_group: int) -> Tuple[Set[int], Number]:
    """Minimum cut of f with each group kept together; returns the group indices on the s side."""
    if isinstance(f, GraphCutOracle):
        side = flow_separating(f, groups, s_group, t_group)
    else:
        side = _enumerated_separating(f, groups, s_group, t_group)
    return side, f.value(frozenset().union(*(groups[index] for index in side)))


def min_st_cut(f: SubmodularOracle, s: int, t: int) -> Tuple[Subset, Number]:
    """Minimum of f over sets containing s and avoiding t.

    Graph cuts go through max-flow, other oracles are enumerated. Among minimum
    cuts the smallest one is returned (it is unique since minimum cuts are closed
    under intersection).
    """
    if s == t:
        raise InvalidArgumentError("s and t must differ")
    f.ground.subset([s, t])
    groups = [frozenset([element]) for element in range(f.size)]
    side, value = _min_separating(f, groups, s, t)
    cut = frozenset(side)
    log("GH", f"min {s}-{t} cut {sorted(cut)} value {value}")
    return cut, value


def _check_symmetric(f: SubmodularOracle) -> bool:
    """Returns True when symmetry had to be trusted rather than checked."""
    n = f.size
    if n <= SYMMETRY_CHECK_LIMIT:
        full = (1 << n) - 1
        for mask in range(1 << (n - 1)):
            subset = subset_of_mask(mask)
            if not num_eq(f.value(subset), f.value(subset_of_mask(full ^ mask))):
                raise PropertyViolationError(f"{f.kind} oracle is not symmetric: f({sorted(subset)}) differs from its complement")
        return False
    if not f.symmetric:
        raise PropertyViolationError(f"{f.kind} oracle is not declared symmetric")
    warn("GH", f"symmetry of the {f.kind} oracle on {n} elements is trusted, not checked")
    return True


def _neighbor_components(tree_edges: List[List], center: int) -> Dict[int, Set[int]]:
    """Supernode indices reachable through each neighbor of `center`."""
    graph = nx.Graph()
    graph.add_edges_from((a, b) for a, b, _ in tree_edges)
    if center not in graph:
        return {}
    neighbors = sorted(graph.neighbors(center))
    graph.remove_node(center)
    return {neighbor: set(nx.node_connected_component(graph, neighbor)) for neighbor in neighbors}


def gomory_hu_tree(f: SubmodularOracle) -> GomoryHuTree:
    """Contraction-based Gomory-Hu construction.

    Starts from one supernode holding every element. While some supernode holds
    two elements, its two smallest elements are separated by a minimum cut in which
    each subtree hanging off the supernode is contracted to a single group.
    """
    trusted = _check_symmetric(f)
    n = f.size
    supernodes: List[Subset] = [frozenset(range(n))]
    tree_edges: List[List] = []

    while True:
        splittable = [index for index, node in enumerate(supernodes) if len(node) >= 2]
        if not splittable:
            break
        center = min(splittable, key=lambda index: min(supernodes[index]))
        members = sorted(supernodes[center])
        s, t = members[0], members[1]

        components = _neighbor_components(tree_edges, center)
        groups = [frozenset([element]) for element in members]
        group_of_neighbor = {}
        for neighbor, reached in components.items():
            group_of_neighbor[neighbor] = len(groups)
            groups.append(frozenset().union(*(supernodes[index] for index in reached)))

        side, value = _min_separating(f, groups, 0, 1)
        kept = frozenset(members[index] for index in side if index < len(members))
        split_off = supernodes[center] - kept
        supernodes[center] = kept
        supernodes.append(split_off)
        new_index = len(supernodes) - 1

        for edge in tree_edges:
            for end in (0, 1):
                other = edge[1 - end]
                if edge[end] == center and group_of_neighbor[other] not in side:
                    edge[end] = new_index
        tree_edges.append([center, new_index, value])
        log("GH", f"split {sorted(kept)} | {sorted(split_off)} at value {value}", Fore.CYAN)

    element_of = [next(iter(node)) for node in supernodes]
    edges = tuple(sorted(
        (min(element_of[a], element_of[b]), max(element_of[a], element_of[b]), w) for a, b, w in tree_edges))
    tree = GomoryHuTree(n, edges, f.fingerprint(), trusted)
    log("GH", f"tree on {n} elements: {[(u, v, w) for u, v, w in edges]}", Fore.GREEN)
    return tree
