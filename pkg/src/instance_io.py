import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Union

from pydantic import ValidationError

from src.errors import InstanceValidationError, MatroidCutError
from src.matroid import (ExplicitBasesMatroid, GraphicMatroid, LaminarMatroid, Matroid, PartitionMatroid,
                         PavingMatroid, UniformMatroid, dual, truncate)
from src.submodular import (ExplicitTableOracle, GraphCoverageOracle, GraphCutOracle, HypergraphCutOracle,
                            MatroidRankOracle, SubmodularOracle, WeightedGraph, WeightedHypergraph)
from utils.console import log
from utils.schemas import (DualSpec, ExplicitBasesSpec, GraphFunctionSpec, GraphicSpec, HypergraphFunctionSpec,
                           InstanceFile, LaminarSpec, PartitionSpec, PavingSpec, RankFunctionSpec, TableFunctionSpec,
                           TruncationSpec, UniformSpec)


def build_matroid(spec, n: int) -> Matroid:
    if isinstance(spec, UniformSpec):
        return UniformMatroid(spec.rank, n)
    if isinstance(spec, PartitionSpec):
        return PartitionMatroid(spec.classes, spec.capacities, ground=n)
    if isinstance(spec, LaminarSpec):
        return LaminarMatroid(n, spec.family, spec.bounds, spec.rank_cap)
    if isinstance(spec, GraphicSpec):
        return GraphicMatroid(spec.vertices, spec.edges)
    if isinstance(spec, PavingSpec):
        return PavingMatroid(spec.rank, spec.hyperedges, n)
    if isinstance(spec, ExplicitBasesSpec):
        return ExplicitBasesMatroid(n, spec.bases, spec.trusted)
    if isinstance(spec, TruncationSpec):
        return truncate(build_matroid(spec.inner, n), spec.k)
    if isinstance(spec, DualSpec):
        return dual(build_matroid(spec.inner, n))
    raise InstanceValidationError(f"unsupported matroid kind {spec.kind!r}", field="kind")


def build_function(spec, labels: List[str]) -> SubmodularOracle:
    n = len(labels)
    if isinstance(spec, GraphFunctionSpec):
        graph = WeightedGraph(n, tuple(spec.edges))
        oracle = GraphCutOracle if spec.kind == "graph-cut" else GraphCoverageOracle
        return oracle(graph, labels)
    if isinstance(spec, HypergraphFunctionSpec):
        return HypergraphCutOracle(WeightedHypergraph(n, tuple((h.members, h.weight) for h in spec.hyperedges)), labels)
    if isinstance(spec, RankFunctionSpec):
        return MatroidRankOracle(build_matroid(spec.matroid, n), labels)
    if isinstance(spec, TableFunctionSpec):
        return ExplicitTableOracle(n, spec.values, spec.symmetric, spec.monotone, labels)
    raise InstanceValidationError(f"unsupported function kind {spec.kind!r}", field="function.kind")


@dataclass
class Instance:
    """A validated instance file together with the oracle and matroids it describes."""
    spec: InstanceFile
    function: SubmodularOracle
    matroids: List[Matroid] = field(default_factory=list)

    @classmethod
    def from_spec(cls, spec: InstanceFile) -> "Instance":
        n = len(spec.labels)
        try:
            function = build_function(spec.function, spec.labels)
        except MatroidCutError as e:
            raise InstanceValidationError(str(e), field="function") from e
        matroids = []
        for position, matroid_spec in enumerate(spec.matroids):
            try:
                matroids.append(build_matroid(matroid_spec, n))
            except MatroidCutError as e:
                raise InstanceValidationError(str(e), field=f"matroids[{position}]") from e
        for position, matroid in enumerate(matroids):
            if matroid.size != n:
                raise InstanceValidationError(f"matroid has {matroid.size} elements, expected {n}",
                                              field=f"matroids[{position}]")
            if matroid.full_rank != spec.k:
                raise InstanceValidationError(f"matroid {position} has rank {matroid.full_rank}, but k = {spec.k}",
                                              field="k")
        return cls(spec, function, matroids)

    @property
    def n(self) -> int:
        return len(self.spec.labels)

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def matroid(self) -> Matroid:
        return self.matroids[0]

    @property
    def second_matroid(self):
        return self.matroids[1] if len(self.matroids) > 1 else None

    @property
    def constraint(self) -> str:
        return self.spec.constraint

    @property
    def instance_id(self) -> str:
        return self.spec.metadata.name or self.function.fingerprint()[:12]


def _field_path(location) -> str:
    path = ""
    for part in location:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path


def parse_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceValidationError(f"malformed JSON: {e.msg}", line=e.lineno) from e
    try:
        spec = InstanceFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise InstanceValidationError(first["msg"], field=_field_path(first["loc"]) or None) from e
    return Instance.from_spec(spec)


def dump_instance(instance: Union[Instance, InstanceFile]) -> str:
    spec = instance.spec if isinstance(instance, Instance) else instance
    return json.dumps(spec.model_dump(mode="json"), indent=2) + "\n"


def load_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    log("IO", f"loading {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceValidationError(f"cannot read {path}: {e.strerror}") from e
    return parse_instance(text)


def save_instance(instance: Union[Instance, InstanceFile], path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_instance(instance), encoding="utf-8")
    log("IO", f"saved {path}")
