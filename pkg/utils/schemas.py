from fractions import Fraction
from itertools import combinations
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, model_validator

from config import SCHEMA_VERSION


def parse_weight(value: Any):
    """JSON weight: an integer, a "p/q" string for rationals, or a float."""
    if isinstance(value, bool):
        raise ValueError("booleans are not weights")
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{value!r} is not a rational weight")
        if value.denominator == 1:
            value = value.numerator
    if isinstance(value, Fraction) and value.denominator == 1:
        value = value.numerator
    if not isinstance(value, (int, float, Fraction)):
        raise ValueError(f"{value!r} is not a number")
    if value < 0:
        raise ValueError(f"weight {value} is negative")
    return value


def dump_weight(value: Any):
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return value


Weight = Annotated[Any, BeforeValidator(parse_weight), PlainSerializer(dump_weight)]


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --- matroids ---

class UniformSpec(_Spec):
    kind: Literal["uniform"] = "uniform"
    rank: int = Field(ge=0)


class PartitionSpec(_Spec):
    kind: Literal["partition"] = "partition"
    classes: List[List[int]]
    capacities: List[int]

    @model_validator(mode="after")
    def _classes(self):
        if len(self.classes) != len(self.capacities):
            raise ValueError(f"{len(self.classes)} classes but {len(self.capacities)} capacities")
        if any(cap < 0 for cap in self.capacities):
            raise ValueError("capacities must be nonnegative")
        seen = set()
        for i, members in enumerate(self.classes):
            if seen & set(members):
                raise ValueError(f"class {i} overlaps an earlier class")
            seen |= set(members)
        return self


class LaminarSpec(_Spec):
    kind: Literal["laminar"] = "laminar"
    family: List[List[int]]
    bounds: List[int]
    rank_cap: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _laminar(self):
        if len(self.family) != len(self.bounds):
            raise ValueError(f"{len(self.family)} sets but {len(self.bounds)} bounds")
        if any(bound < 0 for bound in self.bounds):
            raise ValueError("bounds must be nonnegative")
        for (i, a), (j, b) in combinations(enumerate(map(set, self.family)), 2):
            if a & b and not (a <= b or b <= a):
                raise ValueError(f"family sets {i} and {j} are neither nested nor disjoint")
        return self


class GraphicSpec(_Spec):
    kind: Literal["graphic"] = "graphic"
    vertices: int = Field(ge=1)
    edges: List[Tuple[int, int]]

    @model_validator(mode="after")
    def _endpoints(self):
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise ValueError(f"edge {i} has an endpoint outside 0..{self.vertices - 1}")
        return self


class PavingSpec(_Spec):
    kind: Literal["paving"] = "paving"
    rank: int = Field(ge=0)
    hyperedges: List[List[int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _paving(self):
        for i, h in enumerate(self.hyperedges):
            if len(set(h)) < self.rank:
                raise ValueError(f"hyperedge {i} has fewer than rank {self.rank} elements")
        for (i, a), (j, b) in combinations(enumerate(map(set, self.hyperedges)), 2):
            if len(a & b) > self.rank - 2:
                raise ValueError(f"hyperedges {i} and {j} share {len(a & b)} elements, at most {self.rank - 2} allowed")
        return self


class ExplicitBasesSpec(_Spec):
    kind: Literal["explicit-bases"] = "explicit-bases"
    bases: List[List[int]] = Field(min_length=1)
    trusted: bool = False


class TruncationSpec(_Spec):
    kind: Literal["truncation"] = "truncation"
    inner: "MatroidSpec"
    k: int = Field(ge=0)


class DualSpec(_Spec):
    kind: Literal["dual"] = "dual"
    inner: "MatroidSpec"


MatroidSpec = Annotated[
    Union[UniformSpec, PartitionSpec, LaminarSpec, GraphicSpec, PavingSpec, ExplicitBasesSpec, TruncationSpec, DualSpec],
    Field(discriminator="kind"),
]

TruncationSpec.model_rebuild()
DualSpec.model_rebuild()


# --- functions ---

class GraphFunctionSpec(_Spec):
    kind: Literal["graph-cut", "graph-coverage"]
    edges: List[Tuple[int, int, Weight]]

    @model_validator(mode="after")
    def _no_loops(self):
        for i, (u, v, _) in enumerate(self.edges):
            if u == v:
                raise ValueError(f"edge {i} is a self-loop")
        return self


class HyperedgeSpec(_Spec):
    members: List[int] = Field(min_length=1)
    weight: Weight


class HypergraphFunctionSpec(_Spec):
    kind: Literal["hypergraph-cut"] = "hypergraph-cut"
    hyperedges: List[HyperedgeSpec]


class RankFunctionSpec(_Spec):
    kind: Literal["matroid-rank"] = "matroid-rank"
    matroid: MatroidSpec


class TableFunctionSpec(_Spec):
    kind: Literal["explicit-table"] = "explicit-table"
    values: List[Weight]
    symmetric: bool = False
    monotone: bool = False


FunctionSpec = Annotated[
    Union[GraphFunctionSpec, HypergraphFunctionSpec, RankFunctionSpec, TableFunctionSpec],
    Field(discriminator="kind"),
]


# --- instance file ---

class Metadata(_Spec):
    name: Optional[str] = None
    seed: Optional[int] = None
    generator: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)


def matroid_ground_size(spec) -> Optional[int]:
    """Ground size a matroid spec pins down by itself (graphic matroids live on their edges)."""
    if isinstance(spec, GraphicSpec):
        return len(spec.edges)
    if isinstance(spec, (TruncationSpec, DualSpec)):
        return matroid_ground_size(spec.inner)
    return None


def matroid_elements(spec) -> List[int]:
    if isinstance(spec, PartitionSpec):
        return [e for members in spec.classes for e in members]
    if isinstance(spec, LaminarSpec):
        return [e for members in spec.family for e in members]
    if isinstance(spec, PavingSpec):
        return [e for members in spec.hyperedges for e in members]
    if isinstance(spec, ExplicitBasesSpec):
        return [e for basis in spec.bases for e in basis]
    if isinstance(spec, (TruncationSpec, DualSpec)):
        return matroid_elements(spec.inner)
    return []


def _check_matroid(spec, n: int, where: str):
    size = matroid_ground_size(spec)
    if size is not None and size != n:
        raise ValueError(f"{where}: graphic matroid has {size} edges but the ground set has {n} elements")
    stray = sorted({e for e in matroid_elements(spec) if not 0 <= e < n})
    if stray:
        raise ValueError(f"{where}: elements {stray} outside 0..{n - 1}")
    if isinstance(spec, PavingSpec):
        for i, h in enumerate(spec.hyperedges):
            if len(set(h)) >= n:
                raise ValueError(f"{where}.hyperedges[{i}]: a hyperedge must be a proper subset")
        if spec.rank > n:
            raise ValueError(f"{where}: rank {spec.rank} exceeds the ground size {n}")
    if isinstance(spec, UniformSpec) and spec.rank > n:
        raise ValueError(f"{where}: rank {spec.rank} exceeds the ground size {n}")


class InstanceFile(_Spec):
    schema_version: int
    labels: List[str] = Field(min_length=1)
    function: FunctionSpec
    matroids: List[MatroidSpec] = Field(min_length=1, max_length=2)
    constraint: Literal["double", "common"] = "double"
    k: int = Field(ge=0)
    metadata: Metadata = Field(default_factory=Metadata)

    @model_validator(mode="after")
    def _consistent(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"schema_version {self.schema_version} is not supported (expected {SCHEMA_VERSION})")
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")

        function = self.function
        if isinstance(function, GraphFunctionSpec):
            for i, (u, v, _) in enumerate(function.edges):
                if not (0 <= u < n and 0 <= v < n):
                    raise ValueError(f"function.edges[{i}]: endpoint outside 0..{n - 1}")
        elif isinstance(function, HypergraphFunctionSpec):
            for i, hyperedge in enumerate(function.hyperedges):
                if any(not 0 <= m < n for m in hyperedge.members):
                    raise ValueError(f"function.hyperedges[{i}]: member outside 0..{n - 1}")
        elif isinstance(function, RankFunctionSpec):
            _check_matroid(function.matroid, n, "function.matroid")
        elif isinstance(function, TableFunctionSpec):
            if len(function.values) != 1 << n:
                raise ValueError(f"function.values: {n} elements need {1 << n} values, got {len(function.values)}")
            if function.values[0] != 0:
                raise ValueError("function.values[0]: f(empty set) must be 0")

        for i, spec in enumerate(self.matroids):
            _check_matroid(spec, n, f"matroids[{i}]")
        if self.constraint == "common" and len(self.matroids) != 2:
            raise ValueError("constraint 'common' needs two matroids")
        return self


# --- service payloads ---

class SolveRequest(_Spec):
    instance: InstanceFile
    algorithms: Optional[List[str]] = None
    tie_break: str = "lexicographic"
    seed: Optional[int] = None
    verify: bool = False


class InstanceRequest(_Spec):
    instance: InstanceFile
    full_pairs: bool = False
