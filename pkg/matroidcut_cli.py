import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from colorama import Fore, Style, init

from config import DEFAULT_SEED, MATROID_AXIOM_LIMIT
from src.errors import InvalidArgumentError, MatroidCutError
from src.experiment import ALGORITHMS, ExperimentConfig, run_experiment, skip_reason, solve_instance
from src.generators import FAMILIES, generate
from src.gomory_hu import gomory_hu_tree
from src.instance_io import Instance, dump_instance, load_instance
from src.matroid import check_axioms
from src.partition_algorithms import TieBreakPolicy
from src.submodular import verify_properties
from utils.console import log, set_debug
from utils.schemas import dump_weight

# Initialize colorama
init(autoreset=True)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 like every other input problem; 2 is kept for invariant violations."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(Fore.RED + f"error: {message}" + Style.RESET_ALL, file=sys.stderr)
        sys.exit(1)


def _instance_paths(paths: Sequence[str]) -> List[Path]:
    found = []
    for raw in paths:
        path = Path(raw)
        found.extend(sorted(path.glob("*.json")) if path.is_dir() else [path])
    return found


def _load_all(paths: Sequence[str]) -> List[Instance]:
    return [load_instance(path) for path in _instance_paths(paths)]


def _params(pairs: Optional[List[str]]) -> Dict[str, str]:
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise InvalidArgumentError(f"--param expects key=value, got {pair!r}")
        params[key.strip()] = value.strip()
    return params


def _algorithms(raw: Optional[List[str]]) -> Optional[List[str]]:
    if not raw:
        return None
    return [name.strip() for item in raw for name in item.split(",") if name.strip()]


def _policy(args) -> TieBreakPolicy:
    if args.tie_break == "random":
        return TieBreakPolicy.seeded(args.seed if args.seed is not None else DEFAULT_SEED)
    return TieBreakPolicy(args.tie_break)


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        log("CLI", f"wrote {out}")
    else:
        sys.stdout.write(text)


def _labelled(instance: Instance, elements) -> List[str]:
    return [instance.spec.labels[e] for e in sorted(elements)]


def _solutions(instances: List[Instance], algorithms: List[str], policy: TieBreakPolicy) -> List[dict]:
    results = []
    for instance in instances:
        for name in algorithms:
            entry = {"instance_id": instance.instance_id, "algorithm": name}
            reason = skip_reason(name, instance)
            if reason:
                results.append({**entry, "skipped": reason})
                continue
            partition, value, trace = solve_instance(instance, name, policy)
            entry.update({
                "value": dump_weight(value),
                "blocks": [_labelled(instance, block) for block in partition.blocks],
                "witness": _labelled(instance, partition.witness),
            })
            if partition.second_witness is not None:
                entry["second_witness"] = _labelled(instance, partition.second_witness)
            if trace is not None:
                entry["trace"] = json.loads(json.dumps(trace.as_dict(), default=dump_weight))
            results.append(entry)
    return results


def cmd_solve(args) -> int:
    instances = _load_all(args.instances)
    config = ExperimentConfig(_algorithms(args.algorithm), _policy(args), verify=False, workers=args.workers)
    if args.format == "json":
        text = json.dumps({"solutions": _solutions(instances, config.resolved_algorithms(), config.policy)}, indent=2)
        _emit(text + "\n", args.out)
    else:
        _emit(run_experiment(instances, config).to_csv(), args.out)
    return 0


def cmd_verify(args) -> int:
    instances = _load_all(args.instances)
    config = ExperimentConfig(_algorithms(args.algorithm), _policy(args), verify=True, workers=args.workers)
    report = run_experiment(instances, config)
    _emit(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    report.raise_for_violations()
    return 0


def cmd_gen(args) -> int:
    instance = generate(args.family, _params(args.param), args.seed)
    _emit(dump_instance(instance), args.out)
    return 0


def cmd_gh_tree(args) -> int:
    instance = load_instance(args.instance)
    tree = gomory_hu_tree(instance.function)
    data = tree.to_dict()
    data["edges"] = [[instance.spec.labels[u], instance.spec.labels[v], dump_weight(w)] for u, v, w in tree.edges]
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    return 0


def cmd_check(args) -> int:
    instance = load_instance(args.instance)
    report = verify_properties(instance.function, full_pairs=args.full_pairs, seed=args.seed)
    axioms = []
    for position, matroid in enumerate(instance.matroids):
        if matroid.size > MATROID_AXIOM_LIMIT:
            axioms.append({"matroid": position, "checked": False, "violation": None})
        else:
            axioms.append({"matroid": position, "checked": True, "violation": check_axioms(matroid)})
    data = {"instance_id": instance.instance_id, "function": instance.function.kind,
            "properties": report.as_dict(), "matroids": axioms}
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matroidcut", description="Submodular partitioning under matroid constraints")
    parser.add_argument("--debug", action="store_true", help="print [SECTION] trace lines")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def run_options(sub):
        sub.add_argument("instances", nargs="+", help="instance files or directories of *.json files")
        sub.add_argument("--algorithm", action="append", help=f"one or more of {', '.join(sorted(ALGORITHMS))}")
        sub.add_argument("--tie-break", default="lexicographic", choices=TieBreakPolicy.MODES)
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--format", choices=["csv", "json"], default="csv")
        sub.add_argument("--workers", type=int, default=None)
        sub.add_argument("--out")

    solve = commands.add_parser("solve", help="run algorithms on instances")
    run_options(solve)
    solve.set_defaults(handler=cmd_solve)

    verify = commands.add_parser("verify", help="run algorithms and compare against the exhaustive optimum")
    run_options(verify)
    verify.set_defaults(handler=cmd_verify)

    gen = commands.add_parser("gen", help="generate an instance file")
    gen.add_argument("family", choices=sorted(FAMILIES))
    gen.add_argument("--param", action="append", help="generator parameter key=value")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--out")
    gen.set_defaults(handler=cmd_gen)

    tree = commands.add_parser("gh-tree", help="emit the Gomory-Hu tree of a symmetric objective")
    tree.add_argument("instance")
    tree.add_argument("--out")
    tree.set_defaults(handler=cmd_gh_tree)

    check = commands.add_parser("check", help="verify oracle properties and matroid axioms")
    check.add_argument("instance")
    check.add_argument("--full-pairs", action="store_true")
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--out")
    check.set_defaults(handler=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        set_debug(True)
    try:
        return args.handler(args)
    except MatroidCutError as e:
        print(Fore.RED + f"[{type(e).__name__}] {e}" + Style.RESET_ALL, file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
