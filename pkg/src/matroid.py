import threading
from abc import ABC, abstractmethod
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
from colorama import Fore

from config import BRUTE_FORCE_LIMIT, EXPLICIT_BASES_VALIDATION_LIMIT, MATROID_AXIOM_LIMIT
from src.errors import InvalidArgumentError, InvalidSubsetError, ResourceLimitError
from utils.console import log, warn

Subset = FrozenSet[int]
Weights = Union[Mapping[int, object], Sequence[object]]


def _ground_tuple(ground: Union[int, Iterable[int]]) -> Tuple[int, ...]:
    if isinstance(ground, int):
        if ground < 0:
            raise InvalidArgumentError(f"ground size {ground} is negative")
        return tuple(range(ground))
    elements = tuple(sorted(set(ground)))
    if any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in elements):
        raise InvalidArgumentError("ground elements must be nonnegative integers")
    return elements


class Matroid(ABC):
    """Independence oracle over a finite ground set of integers.

    `is_independent` and `rank` validate their argument; `independent` and `_rank`
    are the unchecked versions the algorithms call. Kinds that are expensive to
    query set `memoize` and share one answer cache guarded by a lock.
    """
    kind = ""
    memoize = False

    def __init__(self, ground: Union[int, Iterable[int]]):
        self.ground = _ground_tuple(ground)
        self.ground_set = frozenset(self.ground)
        self._full_rank: Optional[int] = None
        self._cache: Dict[Subset, bool] = {}
        self._cache_lock = threading.Lock()

    @property
    def size(self) -> int:
        return len(self.ground)

    def check_subset(self, elements: Iterable[int]) -> Subset:
        subset = frozenset(elements)
        stray = subset - self.ground_set
        if stray:
            raise InvalidSubsetError(f"{sorted(stray, key=repr)} not in the ground set of this {self.kind} matroid")
        return subset

    def is_independent(self, elements: Iterable[int]) -> bool:
        return self.independent(self.check_subset(elements))

    def independent(self, subset: Subset) -> bool:
        if not self.memoize:
            return self._independent(subset)
        with self._cache_lock:
            cached = self._cache.get(subset)
        if cached is None:
            cached = self._independent(subset)
            with self._cache_lock:
                self._cache[subset] = cached
        return cached

    @abstractmethod
    def _independent(self, subset: Subset) -> bool:
        ...

    def rank(self, elements: Optional[Iterable[int]] = None) -> int:
        if elements is None:
            return self.full_rank
        return self._rank(self.check_subset(elements))

    def _rank(self, subset: Subset) -> int:
        return len(self.max_independent(subset))

    def max_independent(self, subset: Iterable[int]) -> Subset:
        """Greedy maximal independent subset, scanning by ascending index."""
        chosen: Subset = frozenset()
        for element in sorted(subset):
            candidate = chosen | {element}
            if self.independent(candidate):
                chosen = candidate
        return chosen

    @property
    def full_rank(self) -> int:
        if self._full_rank is None:
            self._full_rank = self._rank(self.ground_set)
        return self._full_rank

    def describe(self) -> dict:
        return {"kind": self.kind, "ground": list(self.ground)}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.size}, rank={self.full_rank})"


class PavingMatroid(Matroid):
    """Bases are the r-sets not contained in any hyperedge."""
    kind = "paving"

    def __init__(self, rank: int, hyperedges: Iterable[Iterable[int]] = (), ground: Union[int, Iterable[int]] = 0):
        super().__init__(ground)
        if rank < 0 or rank > self.size:
            raise InvalidArgumentError(f"rank {rank} does not fit a ground set of size {self.size}")
        self.r = rank
        self.hyperedges: Tuple[Subset, ...] = tuple(frozenset(h) for h in hyperedges)
        for i, h in enumerate(self.hyperedges):
            if not h <= self.ground_set:
                raise InvalidArgumentError(f"hyperedge {i} leaves the ground set")
            if h == self.ground_set:
                raise InvalidArgumentError(f"hyperedge {i} is the whole ground set")
            if len(h) < rank:
                raise InvalidArgumentError(f"hyperedge {i} has {len(h)} elements, fewer than the rank {rank}")
        if rank == 0 and self.hyperedges:
            raise InvalidArgumentError("a rank 0 paving matroid has no hyperedges")
        for (i, a), (j, b) in combinations(enumerate(self.hyperedges), 2):
            if len(a & b) > rank - 2:
                raise InvalidArgumentError(f"hyperedges {i} and {j} share {len(a & b)} elements, at most {rank - 2} allowed")
        self._full_rank = rank

    def _independent(self, subset: Subset) -> bool:
        if len(subset) < self.r:
            return True
        if len(subset) > self.r:
            return False
        return not any(subset <= h for h in self.hyperedges)

    def _rank(self, subset: Subset) -> int:
        if len(subset) < self.r:
            return len(subset)
        # the hyperedges are exactly the hyperplanes with at least r elements
        if any(subset <= h for h in self.hyperedges):
            return self.r - 1
        return self.r

    def describe(self) -> dict:
        return {**super().describe(), "rank": self.r, "hyperedges": [sorted(h) for h in self.hyperedges]}


class UniformMatroid(PavingMatroid):
    kind = "uniform"

    def __init__(self, rank: int, ground: Union[int, Iterable[int]]):
        super().__init__(rank, (), ground)

    def describe(self) -> dict:
        return {"kind": self.kind, "ground": list(self.ground), "rank": self.r}


class PartitionMatroid(Matroid):
    """Capacity per class; elements outside every class are loops."""
    kind = "partition"

    def __init__(self, classes: Sequence[Iterable[int]], capacities: Sequence[int],
                 ground: Union[int, Iterable[int], None] = None):
        classes = [frozenset(c) for c in classes]
        if ground is None:
            ground = frozenset().union(*classes) if classes else ()
        super().__init__(ground)
        if len(classes) != len(capacities):
            raise InvalidArgumentError(f"{len(classes)} classes but {len(capacities)} capacities")
        seen: Subset = frozenset()
        for i, (c, cap) in enumerate(zip(classes, capacities)):
            if not c <= self.ground_set:
                raise InvalidArgumentError(f"class {i} leaves the ground set")
            if c & seen:
                raise InvalidArgumentError(f"class {i} overlaps an earlier class")
            if isinstance(cap, bool) or not isinstance(cap, int) or cap < 0:
                raise InvalidArgumentError(f"class {i} has invalid capacity {cap!r}")
            seen |= c
        self.classes: Tuple[Subset, ...] = tuple(classes)
        self.capacities: Tuple[int, ...] = tuple(capacities)
        self.loops = self.ground_set - seen

    def _independent(self, subset: Subset) -> bool:
        if subset & self.loops:
            return False
        return all(len(subset & c) <= cap for c, cap in zip(self.classes, self.capacities))

    def _rank(self, subset: Subset) -> int:
        return sum(min(len(subset & c), cap) for c, cap in zip(self.classes, self.capacities))

    def describe(self) -> dict:
        return {**super().describe(), "classes": [sorted(c) for c in self.classes], "capacities": list(self.capacities)}


class LaminarMatroid(Matroid):
    kind = "laminar"

    def __init__(self, ground: Union[int, Iterable[int]], family: Sequence[Iterable[int]], bounds: Sequence[int],
                 rank_cap: Optional[int] = None):
        super().__init__(ground)
        family = [frozenset(f) for f in family]
        if len(family) != len(bounds):
            raise InvalidArgumentError(f"{len(family)} sets but {len(bounds)} bounds")
        for i, (f, bound) in enumerate(zip(family, bounds)):
            if not f <= self.ground_set:
                raise InvalidArgumentError(f"laminar set {i} leaves the ground set")
            if isinstance(bound, bool) or not isinstance(bound, int) or bound < 0:
                raise InvalidArgumentError(f"laminar set {i} has invalid bound {bound!r}")
        for (i, a), (j, b) in combinations(enumerate(family), 2):
            if a & b and not (a <= b or b <= a):
                raise InvalidArgumentError(f"sets {i} and {j} are neither nested nor disjoint")
        if rank_cap is not None and rank_cap < 0:
            raise InvalidArgumentError("rank cap must be nonnegative")
        self.family: Tuple[Subset, ...] = tuple(family)
        self.bounds: Tuple[int, ...] = tuple(bounds)
        self.rank_cap = rank_cap

    def _independent(self, subset: Subset) -> bool:
        if self.rank_cap is not None and len(subset) > self.rank_cap:
            return False
        return all(len(subset & f) <= bound for f, bound in zip(self.family, self.bounds))

    def describe(self) -> dict:
        return {**super().describe(), "family": [sorted(f) for f in self.family],
                "bounds": list(self.bounds), "rank_cap": self.rank_cap}


class GraphicMatroid(Matroid):
    """Cycle matroid; the ground set is the edge positions 0..m-1."""
    kind = "graphic"

    def __init__(self, vertices: int, edges: Sequence[Tuple[int, int]]):
        super().__init__(len(edges))
        self.vertices = vertices
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < vertices and 0 <= v < vertices):
                raise InvalidArgumentError(f"edge {i} has an endpoint outside 0..{vertices - 1}")

    def _independent(self, subset: Subset) -> bool:
        graph = nx.MultiGraph()
        graph.add_edges_from(self.edges[i] for i in subset)
        return nx.is_forest(graph) if graph.number_of_nodes() else True

    def describe(self) -> dict:
        return {**super().describe(), "vertices": self.vertices, "edges": [list(e) for e in self.edges]}


class ExplicitBasesMatroid(Matroid):
    kind = "explicit-bases"

    def __init__(self, ground: Union[int, Iterable[int]], bases: Iterable[Iterable[int]], trusted: bool = False):
        super().__init__(ground)
        self.bases: Tuple[Subset, ...] = tuple(sorted({frozenset(b) for b in bases}, key=lambda b: sorted(b)))
        if not self.bases:
            raise InvalidArgumentError("an explicit-bases matroid needs at least one basis")
        sizes = {len(b) for b in self.bases}
        if len(sizes) != 1:
            raise InvalidArgumentError(f"bases have different sizes {sorted(sizes)}")
        for b in self.bases:
            if not b <= self.ground_set:
                raise InvalidArgumentError(f"basis {sorted(b)} leaves the ground set")
        self.trusted = trusted
        if self.size <= EXPLICIT_BASES_VALIDATION_LIMIT:
            problem = self._exchange_violation()
            if problem:
                raise InvalidArgumentError(problem)
            self.trusted = False
        elif not trusted:
            self.trusted = True
            warn("MATROID", f"explicit-bases matroid on {self.size} elements accepted without exchange validation")
        self._full_rank = sizes.pop()

    def _exchange_violation(self) -> Optional[str]:
        known = set(self.bases)
        for a in self.bases:
            for b in self.bases:
                for x in sorted(a - b):
                    if not any((a - {x}) | {y} in known for y in b - a):
                        return f"basis exchange fails for {sorted(a)}, {sorted(b)} at {x}"
        return None

    def _independent(self, subset: Subset) -> bool:
        return any(subset <= b for b in self.bases)

    def describe(self) -> dict:
        return {**super().describe(), "bases": [sorted(b) for b in self.bases], "trusted": self.trusted}


class TruncatedMatroid(Matroid):
    kind = "truncation"

    def __init__(self, inner: Matroid, k: int):
        if k < 0 or k > inner.full_rank:
            raise InvalidArgumentError(f"truncation level {k} outside 0..{inner.full_rank}")
        super().__init__(inner.ground)
        self.inner = inner
        self.k = k
        self._full_rank = k

    def _independent(self, subset: Subset) -> bool:
        return len(subset) <= self.k and self.inner.independent(subset)

    def _rank(self, subset: Subset) -> int:
        return min(self.k, self.inner._rank(subset))

    def describe(self) -> dict:
        return {"kind": self.kind, "inner": self.inner.describe(), "k": self.k}


class ContractedMatroid(Matroid):
    """M/Z on V-Z; X is independent when X together with a fixed basis of Z is independent in M."""
    kind = "contraction"

    def __init__(self, inner: Matroid, contracted: Iterable[int]):
        contracted = inner.check_subset(contracted)
        super().__init__(inner.ground_set - contracted)
        self.inner = inner
        self.contracted = contracted
        self.anchor = inner.max_independent(contracted)

    def _independent(self, subset: Subset) -> bool:
        return self.inner.independent(subset | self.anchor)

    def _rank(self, subset: Subset) -> int:
        return self.inner._rank(subset | self.contracted) - len(self.anchor)

    def describe(self) -> dict:
        return {"kind": self.kind, "inner": self.inner.describe(), "contracted": sorted(self.contracted)}


class DualMatroid(Matroid):
    kind = "dual"
    memoize = True

    def __init__(self, inner: Matroid):
        super().__init__(inner.ground)
        self.inner = inner

    def _independent(self, subset: Subset) -> bool:
        return self.inner._rank(self.ground_set - subset) == self.inner.full_rank

    def _rank(self, subset: Subset) -> int:
        return len(subset) + self.inner._rank(self.ground_set - subset) - self.inner.full_rank

    def describe(self) -> dict:
        return {"kind": self.kind, "inner": self.inner.describe()}


# --- operations ---

def is_independent(matroid: Matroid, elements: Iterable[int]) -> bool:
    return matroid.is_independent(elements)


def rank(matroid: Matroid, elements: Optional[Iterable[int]] = None) -> int:
    return matroid.rank(elements)


def min_weight_basis(matroid: Matroid, weights: Weights) -> Tuple[Subset, object]:
    """Greedy by ascending (weight, element). `weights` is indexed by element."""
    chosen: Subset = frozenset()
    total = 0
    target = matroid.full_rank
    for element in sorted(matroid.ground, key=lambda e: (weights[e], e)):
        if len(chosen) == target:
            break
        candidate = chosen | {element}
        if matroid.independent(candidate):
            chosen = candidate
            total += weights[element]
    log("MATROID", f"min weight {matroid.kind} basis {sorted(chosen)} weight {total}", Fore.CYAN)
    return chosen, total


def truncate(matroid: Matroid, k: int) -> Matroid:
    if k < 0 or k > matroid.full_rank:
        raise InvalidArgumentError(f"truncation level {k} outside 0..{matroid.full_rank}")
    if k == matroid.full_rank:
        return matroid
    # every set smaller than the rank of a paving matroid is independent
    if isinstance(matroid, PavingMatroid):
        return UniformMatroid(k, matroid.ground)
    if isinstance(matroid, TruncatedMatroid):
        return TruncatedMatroid(matroid.inner, k)
    return TruncatedMatroid(matroid, k)


def contract(matroid: Matroid, elements: Iterable[int]) -> Matroid:
    elements = matroid.check_subset(elements)
    if not elements:
        return matroid
    return ContractedMatroid(matroid, elements)


def dual(matroid: Matroid) -> Matroid:
    if isinstance(matroid, DualMatroid):
        return matroid.inner
    return DualMatroid(matroid)


def _all_subsets(ground: Sequence[int]) -> List[Subset]:
    return [frozenset(c) for size in range(len(ground) + 1) for c in combinations(ground, size)]


def check_axioms(matroid: Matroid) -> Optional[str]:
    """Exhaustive independence axiom check. Returns a description of the first violation, or None."""
    if matroid.size > MATROID_AXIOM_LIMIT:
        raise ResourceLimitError(f"axiom check is limited to {MATROID_AXIOM_LIMIT} elements")
    family = {s for s in _all_subsets(matroid.ground) if matroid.independent(s)}
    if frozenset() not in family:
        return "the empty set is dependent"
    for s in family:
        for element in s:
            if s - {element} not in family:
                return f"{sorted(s)} is independent but {sorted(s - {element})} is not"
    by_size: Dict[int, List[Subset]] = {}
    for s in family:
        by_size.setdefault(len(s), []).append(s)
    for a in family:
        for size in range(len(a) + 1, len(matroid.ground) + 1):
            for b in by_size.get(size, []):
                if not any(a | {x} in family for x in b - a):
                    return f"exchange fails for {sorted(a)} against {sorted(b)}"
    return None


def bases(matroid: Matroid) -> List[Subset]:
    if matroid.size > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"basis enumeration is limited to {BRUTE_FORCE_LIMIT} elements")
    return [frozenset(c) for c in combinations(matroid.ground, matroid.full_rank) if matroid.independent(frozenset(c))]
