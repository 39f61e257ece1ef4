import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from colorama import Fore

from config import BRUTE_FORCE_LIMIT, CSV_COLUMNS, DEFAULT_WORKERS
from src.errors import BoundViolationError, InternalInvariantError, InvalidArgumentError, MatroidCutError
from src.instance_io import Instance
from src.partition import Partition
from src.partition_algorithms import (AlgorithmTrace, TieBreakPolicy, brute_force_opt, cheapest_singleton,
                                      double_tree_multiway_cut, gh_greedy, gh_greedy_coverage, greedy_split,
                                      tree_multiway_cut)
from src.submodular import GraphCoverageOracle, GraphCutOracle, Number, leq, partition_value
from utils.console import log, warn
from utils.schemas import dump_weight


# --- algorithm registry ---

def _is_tree_cut(instance: Instance) -> bool:
    return isinstance(instance.function, GraphCutOracle) and instance.function.graph.is_tree()


def _single_matroid(instance: Instance) -> Optional[str]:
    if instance.second_matroid is not None:
        return "needs a single constraint matroid"
    return None


@dataclass(frozen=True)
class Algorithm:
    name: str
    skip_reason: Callable[[Instance], Optional[str]]
    run: Callable[[Instance, TieBreakPolicy], Tuple[Partition, Number, Optional[AlgorithmTrace]]]


def _run_gh_greedy(instance, policy):
    partition, trace = gh_greedy(instance.function, instance.matroid)
    return partition, trace.final_value, trace


def _run_greedy_split(instance, policy):
    partition, trace = greedy_split(instance.function, instance.matroid, policy)
    return partition, trace.final_value, trace


def _run_cheapest_singleton(instance, policy):
    partition = cheapest_singleton(instance.function, instance.matroid)
    return partition, partition_value(instance.function, partition), None


def _run_tree(instance, policy):
    partition, value = tree_multiway_cut(instance.function.graph, instance.matroid)
    return partition, value, None


def _run_double_tree(instance, policy):
    partition, value = double_tree_multiway_cut(instance.function.graph, instance.matroid, instance.second_matroid)
    return partition, value, None


def _run_gh_coverage(instance, policy):
    partition, trace = gh_greedy_coverage(instance.function, instance.matroid)
    return partition, trace.final_value, trace


ALGORITHMS: Dict[str, Algorithm] = {
    "gh_greedy": Algorithm(
        "gh_greedy",
        lambda i: _single_matroid(i) or (None if i.function.symmetric else "objective is not symmetric"),
        _run_gh_greedy),
    "greedy_split": Algorithm("greedy_split", _single_matroid, _run_greedy_split),
    "cheapest_singleton": Algorithm(
        "cheapest_singleton",
        lambda i: _single_matroid(i) or (None if i.function.monotone else "objective is not monotone"),
        _run_cheapest_singleton),
    "tree_multiway_cut": Algorithm(
        "tree_multiway_cut",
        lambda i: _single_matroid(i) or (None if _is_tree_cut(i) else "objective is not a tree cut function"),
        _run_tree),
    "double_tree_multiway_cut": Algorithm(
        "double_tree_multiway_cut",
        lambda i: ("needs two constraint matroids" if i.second_matroid is None
                   else None if _is_tree_cut(i) else "objective is not a tree cut function"),
        _run_double_tree),
    "gh_greedy_coverage": Algorithm(
        "gh_greedy_coverage",
        lambda i: _single_matroid(i) or (None if isinstance(i.function, GraphCoverageOracle)
                                         else "objective is not a graph coverage function"),
        _run_gh_coverage),
}


def skip_reason(algorithm: str, instance: Instance) -> Optional[str]:
    if instance.constraint == "common":
        return "no solver for a common-basis constraint"
    return ALGORITHMS[algorithm].skip_reason(instance)


def solve_instance(instance: Instance, algorithm: str,
                   policy: Optional[TieBreakPolicy] = None) -> Tuple[Partition, Number, Optional[AlgorithmTrace]]:
    if algorithm not in ALGORITHMS:
        raise InvalidArgumentError(f"unknown algorithm {algorithm!r}, expected one of {sorted(ALGORITHMS)}")
    reason = skip_reason(algorithm, instance)
    if reason:
        raise InvalidArgumentError(f"{algorithm} does not apply: {reason}")
    partition, value, trace = ALGORITHMS[algorithm].run(instance, policy or TieBreakPolicy())
    check_feasible(instance, partition)
    return partition, value, trace


def check_feasible(instance: Instance, partition: Partition):
    """Re-checks the returned witnesses against the instance matroids."""
    if len(partition) != instance.k:
        raise InternalInvariantError(f"partition has {len(partition)} blocks, expected {instance.k}")
    pairs = [(instance.matroid, partition.witness)]
    if instance.second_matroid is not None:
        pairs.append((instance.second_matroid, partition.second_witness))
    for matroid, witness in pairs:
        if witness is None or not partition.is_transversal(witness) or not matroid.is_independent(witness):
            raise InternalInvariantError(f"witness {sorted(witness or [])} does not certify feasibility")


def proven_bound(algorithm: str, instance: Instance) -> Fraction:
    """Approximation guarantee of `algorithm` on the instance's function class (never below 1)."""
    k = instance.k
    f = instance.function
    if algorithm == "gh_greedy":
        bound = Fraction(2) - Fraction(2, k)
    elif algorithm == "greedy_split":
        bound = Fraction(2) - Fraction(2, k) if (f.symmetric or f.monotone) else Fraction(k - 1)
    elif algorithm == "cheapest_singleton":
        bound = Fraction(2) - Fraction(1, k)
    elif algorithm == "gh_greedy_coverage":
        bound = Fraction(4, 3)
    else:
        bound = Fraction(1)
    return max(bound, Fraction(1))


def ratio_of(value: Number, opt: Number):
    if opt == 0:
        return Fraction(1) if value == 0 else math.inf
    if isinstance(value, float) or isinstance(opt, float):
        return value / opt
    return Fraction(value) / Fraction(opt)


# --- runner ---

@dataclass
class ExperimentConfig:
    algorithms: Optional[List[str]] = None
    policy: TieBreakPolicy = field(default_factory=TieBreakPolicy)
    verify: bool = False
    workers: Optional[int] = None

    def resolved_workers(self) -> int:
        if self.workers:
            return self.workers
        return int(os.getenv("MATROIDCUT_WORKERS", DEFAULT_WORKERS))

    def resolved_algorithms(self) -> List[str]:
        names = self.algorithms or sorted(ALGORITHMS)
        unknown = [name for name in names if name not in ALGORITHMS]
        if unknown:
            raise InvalidArgumentError(f"unknown algorithms {unknown}, expected some of {sorted(ALGORITHMS)}")
        return list(names)


@dataclass
class ReportRow:
    instance_id: str
    algorithm: str
    value: Optional[Number] = None
    opt: Optional[Number] = None
    ratio: Optional[object] = None
    bound: Optional[Fraction] = None
    verified: str = "skipped"
    runtime_ms: Optional[float] = None
    note: str = ""

    def cells(self) -> Dict[str, object]:
        return {
            "instance_id": self.instance_id,
            "algorithm": self.algorithm,
            "value": _cell(self.value),
            "opt": _cell(self.opt),
            "ratio": _ratio_cell(self.ratio),
            "bound": _ratio_cell(self.bound),
            "verified": self.verified,
            "runtime_ms": "" if self.runtime_ms is None else f"{self.runtime_ms:.3f}",
        }


def _cell(value) -> str:
    return "" if value is None else str(dump_weight(value))


def _ratio_cell(value) -> str:
    if value is None:
        return ""
    if value == math.inf:
        return "inf"
    return f"{float(value):.6g}"


@dataclass
class ExperimentReport:
    rows: List[ReportRow] = field(default_factory=list)

    @property
    def violations(self) -> List[ReportRow]:
        return [row for row in self.rows if row.verified == "false"]

    def raise_for_violations(self):
        if self.violations:
            first = self.violations[0]
            raise BoundViolationError(f"{first.algorithm} on {first.instance_id}: ratio {_ratio_cell(first.ratio)} "
                                      f"exceeds bound {_ratio_cell(first.bound)}")

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.cells())
        return buffer.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": [{**row.cells(), "note": row.note} for row in self.rows]}, indent=2) + "\n"


def _optimum(instance: Instance) -> Tuple[Optional[Number], str]:
    if instance.n > BRUTE_FORCE_LIMIT:
        return None, f"n = {instance.n} is above the exhaustive search limit {BRUTE_FORCE_LIMIT}"
    mode = instance.constraint if instance.second_matroid is not None else "single"
    try:
        _, opt = brute_force_opt(instance.function, instance.matroid, instance.second_matroid, mode)
    except MatroidCutError as e:
        if e.exit_code != 1:
            raise
        return None, f"no optimum: {e}"
    return opt, ""


def _run_cell(instance: Instance, algorithm: str, config: ExperimentConfig,
              optimum: Optional[Tuple[Optional[Number], str]]) -> ReportRow:
    row = ReportRow(instance.instance_id, algorithm)
    reason = skip_reason(algorithm, instance)
    if reason:
        row.note = reason
        return row

    started = time.perf_counter()
    try:
        partition, value, _ = solve_instance(instance, algorithm, config.policy)
    except MatroidCutError as e:
        if e.exit_code != 1:
            raise
        row.note = f"error: {e}"
        return row
    row.runtime_ms = (time.perf_counter() - started) * 1000
    row.value = value
    row.bound = proven_bound(algorithm, instance)
    row.verified = "unverified"

    if optimum is None:
        return row
    opt, note = optimum
    if opt is None:
        row.note = note
        return row
    row.opt = opt
    row.ratio = ratio_of(value, opt)
    limit = float(row.bound) * opt if isinstance(opt, float) or isinstance(value, float) else row.bound * opt
    bound_ok = row.ratio != math.inf and leq(value, limit)
    row.verified = "true" if bound_ok else "false"
    if not bound_ok:
        log("RUN", f"{algorithm} on {instance.instance_id}: value {value} above {row.bound} x {opt}", Fore.RED)
    return row


def run_experiment(instances: Sequence[Instance], config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    """Runs every requested algorithm on every instance; rows come back sorted by (instance_id, algorithm)."""
    config = config or ExperimentConfig()
    algorithms = config.resolved_algorithms()
    workers = max(1, config.resolved_workers())
    log("RUN", f"{len(instances)} instances x {len(algorithms)} algorithms, verify={config.verify}, workers={workers}")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        optima: List[Optional[Tuple[Optional[Number], str]]] = [None] * len(instances)
        if config.verify:
            needed = [index for index, instance in enumerate(instances)
                      if any(skip_reason(name, instance) is None for name in algorithms)]
            for index, result in zip(needed, pool.map(lambda i: _optimum(instances[i]), needed)):
                optima[index] = result
                if result[0] is None:
                    warn("RUN", f"{instances[index].instance_id}: verification skipped, {result[1]}")
        cells = [(index, name) for index in range(len(instances)) for name in algorithms]
        rows = list(pool.map(lambda cell: _run_cell(instances[cell[0]], cell[1], config, optima[cell[0]]), cells))

    rows.sort(key=lambda row: (row.instance_id, row.algorithm))
    return ExperimentReport(rows)
