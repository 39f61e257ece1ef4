import random
import unittest
from itertools import combinations

from dotenv import load_dotenv

from src.errors import InvalidArgumentError, InvalidSubsetError, ResourceLimitError
from src.generators import MATROID_KINDS, random_matroid_spec
from src.instance_io import build_matroid
from src.matroid import (ContractedMatroid, DualMatroid, ExplicitBasesMatroid, GraphicMatroid, LaminarMatroid,
                         Matroid, PartitionMatroid, PavingMatroid, TruncatedMatroid, UniformMatroid, bases,
                         check_axioms, contract, dual, is_independent, min_weight_basis, rank, truncate)

load_dotenv()


def all_subsets(ground):
    return [frozenset(c) for size in range(len(ground) + 1) for c in combinations(ground, size)]


def triangle() -> GraphicMatroid:
    return GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])


class _ExchangeBroken(Matroid):
    """Downward closed but {2} cannot be extended from {0, 1}."""
    kind = "broken"

    def _independent(self, subset):
        return subset in (frozenset(), frozenset([0]), frozenset([1]), frozenset([0, 1]), frozenset([2]))


class TestMatroidOracles(unittest.TestCase):
    def setUp(self):
        """Matroids from the worked examples."""
        self.partition = PartitionMatroid([[0, 1], [2, 3]], [1, 1])
        self.paving = PavingMatroid(2, [[0, 1, 2]], 4)

    def test_partition_matroid(self):
        """One element per class is independent, two from a class is not."""
        self.assertTrue(is_independent(self.partition, [0, 2]))
        self.assertFalse(is_independent(self.partition, [0, 1]))
        self.assertEqual(rank(self.partition), 2)

    def test_partition_loops(self):
        """Elements outside every class are loops."""
        matroid = PartitionMatroid([[0]], [1], ground=3)
        self.assertFalse(matroid.is_independent([1]))
        self.assertEqual(matroid.rank([0, 1, 2]), 1)

    def test_paving_matroid(self):
        """An r-set inside a hyperedge is dependent."""
        self.assertFalse(is_independent(self.paving, [0, 1]))
        self.assertTrue(is_independent(self.paving, [0, 3]))
        self.assertEqual(self.paving.rank([0, 1, 2]), 1)
        self.assertEqual(self.paving.rank([0, 1, 3]), 2)

    def test_graphic_triangle(self):
        """Two edges of a triangle form a forest, three form a cycle."""
        matroid = triangle()
        for pair in combinations(range(3), 2):
            self.assertTrue(matroid.is_independent(pair))
        self.assertFalse(matroid.is_independent([0, 1, 2]))
        self.assertEqual(matroid.rank([0, 1, 2]), 2)

    def test_uniform_rank(self):
        """U(2,4) has rank 2 on the whole ground set."""
        self.assertEqual(rank(UniformMatroid(2, 4), range(4)), 2)

    def test_laminar_matroid(self):
        """Nested bounds cap the rank, crossing families are rejected."""
        matroid = LaminarMatroid(4, [[0, 1, 2], [0, 1]], [2, 1])
        self.assertFalse(matroid.is_independent([0, 1]))
        self.assertTrue(matroid.is_independent([0, 2, 3]))
        self.assertEqual(matroid.full_rank, 3)
        with self.assertRaises(InvalidArgumentError):
            LaminarMatroid(3, [[0, 1], [1, 2]], [1, 1])

    def test_stray_elements(self):
        """Queries outside the ground set are rejected."""
        with self.assertRaises(InvalidSubsetError):
            self.partition.is_independent([7])

    def test_paving_validation(self):
        """Hyperedges sharing r-1 elements do not describe a paving matroid."""
        with self.assertRaises(InvalidArgumentError):
            PavingMatroid(3, [[0, 1, 2], [1, 2, 3]], 5)
        with self.assertRaises(InvalidArgumentError):
            PavingMatroid(3, [[0, 1]], 4)

    def test_explicit_bases_validation(self):
        """Bases failing the exchange axiom are rejected."""
        with self.assertRaises(InvalidArgumentError):
            ExplicitBasesMatroid(4, [[0, 1], [2, 3]])
        matroid = ExplicitBasesMatroid(4, [[0, 2], [0, 3]])
        self.assertFalse(matroid.is_independent([1]))
        self.assertEqual(matroid.full_rank, 2)


class TestMatroidOperations(unittest.TestCase):
    def test_min_weight_basis(self):
        """Greedy picks the cheapest basis."""
        self.assertEqual(min_weight_basis(UniformMatroid(2, 3), [3, 1, 2]), (frozenset([1, 2]), 3))
        self.assertEqual(min_weight_basis(triangle(), [1, 2, 3])[1], 3)
        partition = PartitionMatroid([[0, 1], [2]], [1, 1])
        self.assertEqual(min_weight_basis(partition, [5, 1, 2]), (frozenset([1, 2]), 3))

    def test_truncate_uniform(self):
        """Truncating U(3,4) to 2 behaves as U(2,4)."""
        truncated = truncate(UniformMatroid(3, 4), 2)
        expected = UniformMatroid(2, 4)
        for subset in all_subsets(range(4)):
            self.assertEqual(truncated.is_independent(subset), expected.is_independent(subset))

    def test_truncate_to_full_rank(self):
        """Truncating to the rank changes nothing."""
        matroid = triangle()
        self.assertIs(truncate(matroid, 2), matroid)

    def test_truncate_triangle(self):
        """At level 1 single edges are independent and pairs are not."""
        truncated = truncate(triangle(), 1)
        self.assertIsInstance(truncated, TruncatedMatroid)
        self.assertTrue(all(truncated.is_independent([e]) for e in range(3)))
        self.assertFalse(any(truncated.is_independent(pair) for pair in combinations(range(3), 2)))
        with self.assertRaises(InvalidArgumentError):
            truncate(truncated, 2)

    def test_contract_empty(self):
        """Contracting nothing returns the matroid itself."""
        matroid = triangle()
        self.assertIs(contract(matroid, []), matroid)

    def test_contract_triangle_edge(self):
        """Contracting one triangle edge leaves two parallel edges."""
        contracted = contract(triangle(), [0])
        self.assertIsInstance(contracted, ContractedMatroid)
        self.assertEqual(contracted.ground, (1, 2))
        self.assertTrue(contracted.is_independent([1]))
        self.assertTrue(contracted.is_independent([2]))
        self.assertFalse(contracted.is_independent([1, 2]))
        self.assertEqual(contracted.full_rank, 1)

    def test_contract_uniform(self):
        """U(2,4) contracted by one element is U(1,3) on the rest."""
        contracted = contract(UniformMatroid(2, 4), [0])
        for subset in all_subsets((1, 2, 3)):
            self.assertEqual(contracted.is_independent(subset), len(subset) <= 1)

    def test_dual_uniform(self):
        """The dual of U(1,3) is U(2,3)."""
        dual_matroid = dual(UniformMatroid(1, 3))
        expected = UniformMatroid(2, 3)
        for subset in all_subsets(range(3)):
            self.assertEqual(dual_matroid.is_independent(subset), expected.is_independent(subset))

    def test_dual_triangle(self):
        """Removing one triangle edge keeps the graph connected, removing two does not."""
        dual_matroid = dual(triangle())
        self.assertTrue(all(dual_matroid.is_independent([e]) for e in range(3)))
        self.assertFalse(any(dual_matroid.is_independent(pair) for pair in combinations(range(3), 2)))
        self.assertEqual(dual_matroid.full_rank, 1)

    def test_dual_is_an_involution(self):
        """dual(dual(M)) returns M, and a doubly wrapped dual agrees with M everywhere."""
        matroid = PavingMatroid(2, [[0, 1, 2]], 4)
        self.assertIs(dual(dual(matroid)), matroid)
        wrapped = DualMatroid(DualMatroid(matroid))
        for subset in all_subsets(range(4)):
            self.assertEqual(wrapped.is_independent(subset), matroid.is_independent(subset))

    def test_bases(self):
        """U(2,3) has three bases."""
        self.assertEqual(len(bases(UniformMatroid(2, 3))), 3)

    def test_axiom_checker_finds_violation(self):
        """A family violating exchange is reported."""
        self.assertIsNotNone(check_axioms(_ExchangeBroken(3)))

    def test_axiom_checker_limit(self):
        """The exhaustive check refuses large ground sets."""
        with self.assertRaises(ResourceLimitError):
            check_axioms(UniformMatroid(1, 11))


class TestRandomMatroids(unittest.TestCase):
    def setUp(self):
        """Reproducible random matroids of every generated kind."""
        self.rng = random.Random(20240611)

    def _random_matroids(self, count):
        for _ in range(count):
            n = self.rng.randint(2, 7)
            k = self.rng.randint(1, n)
            kind = self.rng.choice(MATROID_KINDS)
            yield build_matroid(random_matroid_spec(self.rng, kind, n, k), n), k

    def test_generated_matroids_satisfy_axioms(self):
        """Every generated matroid, its dual and its truncations pass the axiom check."""
        print("\n--- Testing Random Matroid Axioms ---")
        checked = 0
        for matroid, k in self._random_matroids(40):
            self.assertEqual(matroid.full_rank, k)
            self.assertIsNone(check_axioms(matroid), matroid.describe())
            self.assertIsNone(check_axioms(dual(matroid)), matroid.describe())
            self.assertIsNone(check_axioms(truncate(matroid, k - 1)), matroid.describe())
            checked += 1
        print(f"Checked {checked} matroids")

    def test_rank_matches_independence(self):
        """rank(S) equals the size of a largest independent subset of S."""
        for matroid, _ in self._random_matroids(30):
            family = [s for s in all_subsets(matroid.ground) if matroid.is_independent(s)]
            for subset in all_subsets(matroid.ground):
                self.assertEqual(matroid.rank(subset), max(len(s) for s in family if s <= subset))

    def test_dual_rank_formula(self):
        """r*(S) = |S| + r(V - S) - r(V) for every S, and it matches the dual's independent sets."""
        for matroid, k in self._random_matroids(30):
            co = dual(matroid)
            ground = matroid.ground_set
            self.assertEqual(co.full_rank, matroid.size - k)
            family = [s for s in all_subsets(matroid.ground) if co.is_independent(s)]
            for subset in all_subsets(matroid.ground):
                expected = len(subset) + matroid.rank(ground - subset) - k
                self.assertEqual(co.rank(subset), expected, (matroid.describe(), sorted(subset)))
                self.assertEqual(max(len(s) for s in family if s <= subset), expected)

    def test_contract_rank_formula(self):
        """r_{M/Z}(X) = r(X + Z) - r(Z), whichever basis of Z the contraction anchors on."""
        for matroid, _ in self._random_matroids(30):
            contracted = frozenset(e for e in matroid.ground if self.rng.random() < 0.4)
            minor = contract(matroid, contracted)
            rest = sorted(matroid.ground_set - contracted)
            base = matroid.rank(contracted)
            for subset in all_subsets(rest):
                expected = matroid.rank(subset | contracted) - base
                self.assertEqual(minor.rank(subset), expected, (matroid.describe(), sorted(contracted)))
                self.assertEqual(minor.is_independent(subset), expected == len(subset))

    def test_min_weight_basis_matches_enumeration(self):
        """The greedy basis is as light as the lightest basis found by enumeration."""
        for matroid, _ in self._random_matroids(40):
            weights = [self.rng.randint(0, 9) for _ in range(matroid.size)]
            basis, total = min_weight_basis(matroid, weights)
            self.assertIn(basis, bases(matroid))
            self.assertEqual(total, sum(weights[e] for e in basis))
            self.assertEqual(total, min(sum(weights[e] for e in b) for b in bases(matroid)))


if __name__ == "__main__":
    unittest.main()
