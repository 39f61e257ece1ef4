import csv
import io
import json
import os
import tempfile
import unittest
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from dotenv import load_dotenv

import matroidcut_cli
from config import CSV_COLUMNS
from src.errors import BoundViolationError, InstanceValidationError, InvalidArgumentError
from src.experiment import (ExperimentConfig, ExperimentReport, ReportRow, proven_bound, run_experiment,
                            skip_reason, solve_instance)
from src.generators import FAMILIES, generate, global_matroid, terminal_matroid
from src.instance_io import Instance, dump_instance, load_instance, parse_instance, save_instance
from src.partition_algorithms import TieBreakPolicy, brute_force_opt
from src.submodular import subset_of_mask
from utils.schemas import GraphFunctionSpec, InstanceFile, Metadata, UniformSpec

load_dotenv()
os.environ["MATROIDCUT_CHECK_WEIGHTED"] = "1"


def triangle_instance() -> Instance:
    spec = InstanceFile(
        schema_version=1,
        labels=["a", "b", "c"],
        function=GraphFunctionSpec(kind="graph-cut", edges=[(0, 1, 1), (1, 2, 1), (0, 2, 1)]),
        matroids=[UniformSpec(rank=2)],
        k=2,
        metadata=Metadata(name="triangle"),
    )
    return Instance.from_spec(spec)


def instance_text(**overrides) -> str:
    data = {
        "schema_version": 1,
        "labels": ["a", "b", "c", "d", "e"],
        "function": {"kind": "graph-cut", "edges": [[0, 1, 1], [1, 2, "1/2"], [3, 4, 2]]},
        "matroids": [{"kind": "uniform", "rank": 3}],
        "k": 3,
    }
    data.update(overrides)
    return json.dumps({key: value for key, value in data.items() if value is not None})


class TestInstanceFiles(unittest.TestCase):
    def setUp(self):
        """Temporary directory for instance files."""
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip(self):
        """save then load reproduces the file and every evaluation."""
        instance = triangle_instance()
        path = self.dir / "triangle.json"
        save_instance(instance, path)
        loaded = load_instance(path)
        self.assertEqual(dump_instance(loaded), dump_instance(instance))
        for mask in range(1 << 3):
            subset = subset_of_mask(mask)
            self.assertEqual(loaded.function.value(subset), instance.function.value(subset))
        self.assertEqual(loaded.instance_id, "triangle")

    def test_rational_weights(self):
        """Rational "p/q" weights load as exact fractions and dump back as strings."""
        instance = parse_instance(instance_text())
        self.assertEqual(instance.function.value(frozenset([2])), Fraction(1, 2))
        self.assertIn('"1/2"', dump_instance(instance))

    def test_paving_intersection_rejected(self):
        """Hyperedges sharing r-1 elements fail validation on the matroid field."""
        text = instance_text(matroids=[{"kind": "paving", "rank": 3, "hyperedges": [[0, 1, 2], [1, 2, 3]]}])
        with self.assertRaises(InstanceValidationError) as cm:
            parse_instance(text)
        self.assertTrue(cm.exception.field.startswith("matroids[0]"))

    def test_missing_k(self):
        """A file without k names the missing field."""
        with self.assertRaises(InstanceValidationError) as cm:
            parse_instance(instance_text(k=None))
        self.assertEqual(cm.exception.field, "k")

    def test_rank_must_equal_k(self):
        """k has to be the rank of the constraint matroid."""
        with self.assertRaises(InstanceValidationError) as cm:
            parse_instance(instance_text(k=2))
        self.assertEqual(cm.exception.field, "k")

    def test_malformed_json_reports_line(self):
        """JSON syntax errors carry their line number."""
        with self.assertRaises(InstanceValidationError) as cm:
            parse_instance('{\n  "schema_version": 1,\n  oops\n}')
        self.assertEqual(cm.exception.line, 3)

    def test_negative_weight_rejected(self):
        """Weights must be nonnegative."""
        text = instance_text(function={"kind": "graph-cut", "edges": [[0, 1, -1]]})
        with self.assertRaises(InstanceValidationError):
            parse_instance(text)

    def test_missing_file(self):
        """Unreadable paths are validation errors."""
        with self.assertRaises(InstanceValidationError):
            load_instance(self.dir / "missing.json")


class TestGenerators(unittest.TestCase):
    def test_every_family_is_deterministic(self):
        """Same family, params and seed give byte-identical files."""
        for family in sorted(FAMILIES):
            first = dump_instance(generate(family, seed=7))
            second = dump_instance(generate(family, seed=7))
            self.assertEqual(first, second, family)

    def test_seeds_differ(self):
        """Different seeds give different random instances."""
        self.assertNotEqual(dump_instance(generate("random", seed=1)), dump_instance(generate("random", seed=2)))

    def test_string_params(self):
        """Command-line style string parameters are accepted."""
        instance = generate("random", {"n": "5", "k": "3", "matroid": "paving"}, 3)
        self.assertEqual((instance.n, instance.k), (5, 3))

    def test_bad_params(self):
        """Unknown families, unknown keys and out-of-range values are rejected."""
        with self.assertRaises(InvalidArgumentError):
            generate("lattice")
        with self.assertRaises(InvalidArgumentError):
            generate("random", {"size": 4})
        with self.assertRaises(InvalidArgumentError):
            generate("random", {"n": 3, "k": 5})

    def test_tightness_shape(self):
        """The tightness family has 2k elements and rank k."""
        instance = generate("tightness", {"k": 4})
        self.assertEqual((instance.n, instance.k), (8, 4))
        self.assertTrue(instance.function.monotone)

    def test_common_mc_with_common_basis(self):
        """A planted common basis gives optimum 0."""
        instance = generate("common-mc", {"m": 4, "r": 2, "planted": True}, 3)
        self.assertEqual(instance.constraint, "common")
        _, value = brute_force_opt(instance.function, instance.matroid, instance.second_matroid, "common")
        self.assertEqual(value, 0)
        self.assertTrue(all(skip_reason(name, instance) for name in ("gh_greedy", "greedy_split")))

    def test_common_mc_without_common_basis(self):
        """Conflicting classes force a positive optimum."""
        for seed in range(60):
            instance = generate("common-mc", {"m": 3, "r": 2}, seed)
            first, second, third = instance.spec.metadata.params["classes"]
            common = [set(pair) for pair in combinations(range(3), 2)
                      if all(all(len(set(pair) & set(c)) == 1 for c in classes) for classes in (first, second, third))]
            if common:
                continue
            _, value = brute_force_opt(instance.function, instance.matroid, instance.second_matroid, "common")
            self.assertGreater(value, 0)
            return
        self.fail("no generated triple without a common basis")

    def test_setting_matroids(self):
        """Global and terminal settings are matroids of rank k."""
        self.assertEqual(global_matroid(5, 3).full_rank, 3)
        terminals = terminal_matroid(5, [0, 3])
        self.assertEqual(terminals.full_rank, 2)
        self.assertFalse(terminals.is_independent([1]))


class TestExperiments(unittest.TestCase):
    def test_triangle_report(self):
        """All applicable algorithms are verified; the rest are skipped with a reason."""
        print("\n--- Testing Experiment Runner ---")
        report = run_experiment([triangle_instance()], ExperimentConfig(verify=True))
        print(report.to_csv())
        rows = {row.algorithm: row for row in report.rows}
        self.assertEqual([row.algorithm for row in report.rows], sorted(rows))
        self.assertEqual(rows["gh_greedy"].ratio, 1)
        self.assertEqual(rows["gh_greedy"].verified, "true")
        self.assertEqual(rows["greedy_split"].verified, "true")
        for name in ("tree_multiway_cut", "double_tree_multiway_cut", "gh_greedy_coverage", "cheapest_singleton"):
            self.assertEqual(rows[name].verified, "skipped")
            self.assertTrue(rows[name].note)
        self.assertEqual(report.violations, [])

    def test_tightness_ratio(self):
        """Adversarial greedy splitting on tightness(4) reaches ratio 1.5."""
        config = ExperimentConfig(["greedy_split"], TieBreakPolicy.adversarial(), verify=True)
        report = run_experiment([generate("tightness", {"k": 4})], config)
        row = report.rows[0]
        self.assertEqual((row.value, row.opt), (6, 4))
        self.assertEqual(row.ratio, Fraction(3, 2))
        self.assertEqual(row.cells()["ratio"], "1.5")
        self.assertEqual(row.verified, "true")

    def test_empty_report(self):
        """No instances give an empty table with a header."""
        report = run_experiment([], ExperimentConfig(verify=True))
        self.assertEqual(report.rows, [])
        self.assertEqual(report.to_csv().strip(), ",".join(CSV_COLUMNS))
        report.raise_for_violations()

    def test_csv_columns(self):
        """The CSV header is fixed."""
        report = run_experiment([triangle_instance()], ExperimentConfig(["gh_greedy"]))
        reader = csv.DictReader(io.StringIO(report.to_csv()))
        self.assertEqual(reader.fieldnames, CSV_COLUMNS)
        row = next(reader)
        self.assertEqual(row["verified"], "unverified")
        self.assertEqual(row["value"], "4")

    def test_unchecked_rows(self):
        """Without verification a run that produced a value is unverified; one that never ran is skipped."""
        report = run_experiment([triangle_instance()], ExperimentConfig(["gh_greedy", "tree_multiway_cut"]))
        rows = {row.algorithm: row for row in report.rows}
        self.assertEqual(rows["gh_greedy"].verified, "unverified")
        self.assertEqual(rows["gh_greedy"].value, 4)
        self.assertIsNone(rows["gh_greedy"].opt)
        self.assertEqual(rows["tree_multiway_cut"].verified, "skipped")
        self.assertIsNone(rows["tree_multiway_cut"].value)
        self.assertTrue(rows["tree_multiway_cut"].note)
        self.assertEqual(report.violations, [])

    def test_violations_raise(self):
        """A row above its bound turns into a bound violation."""
        report = ExperimentReport([ReportRow("x", "gh_greedy", 5, 2, Fraction(5, 2), Fraction(1), "false")])
        with self.assertRaises(BoundViolationError) as cm:
            report.raise_for_violations()
        self.assertEqual(cm.exception.exit_code, 2)

    def test_unknown_algorithm(self):
        """Unknown algorithm names are rejected up front."""
        with self.assertRaises(InvalidArgumentError):
            run_experiment([triangle_instance()], ExperimentConfig(["simplex"]))
        with self.assertRaises(InvalidArgumentError):
            solve_instance(triangle_instance(), "tree_multiway_cut")

    def test_proven_bounds(self):
        """Bounds follow the function class and are never below 1."""
        triangle = triangle_instance()
        self.assertEqual(proven_bound("gh_greedy", triangle), 1)
        self.assertEqual(proven_bound("cheapest_singleton", triangle), Fraction(3, 2))
        mixed = generate("random", {"n": 5, "k": 4, "function": "mixed"}, 0)
        expected = Fraction(3, 2) if (mixed.function.symmetric or mixed.function.monotone) else Fraction(3)
        self.assertEqual(proven_bound("greedy_split", mixed), expected)


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        """Temporary directory for generated files and reports."""
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_gen_then_verify(self):
        """gen writes an instance that verify accepts."""
        instance_path = str(self.dir / "tight.json")
        report_path = str(self.dir / "report.csv")
        self.assertEqual(matroidcut_cli.main(["gen", "tightness", "--param", "k=3", "--out", instance_path]), 0)
        code = matroidcut_cli.main(["verify", instance_path, "--algorithm", "greedy_split",
                                    "--tie-break", "adversarial", "--out", report_path])
        self.assertEqual(code, 0)
        rows = list(csv.DictReader(io.StringIO(Path(report_path).read_text(encoding="utf-8"))))
        self.assertEqual(rows[0]["value"], "4")
        self.assertEqual(rows[0]["opt"], "3")

    def test_solve_json(self):
        """JSON solutions list labelled blocks and witnesses."""
        instance_path = str(self.dir / "global.json")
        out = str(self.dir / "solutions.json")
        matroidcut_cli.main(["gen", "global", "--param", "n=5", "--param", "k=2", "--out", instance_path])
        code = matroidcut_cli.main(["solve", instance_path, "--algorithm", "gh_greedy,greedy_split",
                                    "--format", "json", "--out", out])
        self.assertEqual(code, 0)
        solutions = json.loads(Path(out).read_text(encoding="utf-8"))["solutions"]
        self.assertEqual([s["algorithm"] for s in solutions], ["gh_greedy", "greedy_split"])
        self.assertEqual(len(solutions[0]["blocks"]), 2)
        self.assertTrue(all(label.startswith("v") for block in solutions[0]["blocks"] for label in block))

    def test_gh_tree_and_check(self):
        """gh-tree and check both write JSON for a cut instance."""
        instance_path = str(self.dir / "global.json")
        matroidcut_cli.main(["gen", "global", "--out", instance_path])
        tree_path = self.dir / "tree.json"
        check_path = self.dir / "check.json"
        self.assertEqual(matroidcut_cli.main(["gh-tree", instance_path, "--out", str(tree_path)]), 0)
        self.assertEqual(len(json.loads(tree_path.read_text(encoding="utf-8"))["edges"]), 5)
        self.assertEqual(matroidcut_cli.main(["check", instance_path, "--out", str(check_path)]), 0)
        data = json.loads(check_path.read_text(encoding="utf-8"))
        self.assertTrue(data["properties"]["symmetric"])
        self.assertIsNone(data["matroids"][0]["violation"])

    def test_exit_codes(self):
        """Input problems exit with 1."""
        self.assertEqual(matroidcut_cli.main(["solve", str(self.dir / "missing.json")]), 1)
        instance_path = str(self.dir / "tight.json")
        matroidcut_cli.main(["gen", "tightness", "--out", instance_path])
        self.assertEqual(matroidcut_cli.main(["gh-tree", instance_path, "--out", str(self.dir / "t.json")]), 1)
        with self.assertRaises(SystemExit) as cm:
            matroidcut_cli.main(["frobnicate"])
        self.assertEqual(cm.exception.code, 1)


if __name__ == "__main__":
    unittest.main()
