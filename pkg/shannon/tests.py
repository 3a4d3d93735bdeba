import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.test import SimpleTestCase

from functions.atoms import FiberKind, eval_atom
from functions.inner import inner_product_exact
from groups.cases import CaseTag
from groups.exceptions import CaseMismatch
from intertwiners.charts import chart_forward

from .bijections import DR, DT, TableBijection, canonical_D_R, canonical_D_R_inv, canonical_D_T, canonical_D_T_inv
from .exceptions import RangeError
from .lifts import (
    Side,
    band_index,
    band_indices,
    canonical_lift,
    generator_J,
    lifted_generator_q,
    shannon_atom,
)
from .serializers import BijectionOverrideSerializer


class BijectionTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(canonical_D_R(0, 0), 1)
        self.assertEqual(canonical_D_R(1, 0), 2)
        self.assertEqual(canonical_D_R_inv(2), (1, 0))
        self.assertEqual([canonical_D_T(l) for l in (0, 1, -1, 2)], [1, 2, 3, 4])

    def test_injective_on_a_box(self):
        seen = {canonical_D_R(k, l) for k in range(-50, 51) for l in range(-50, 51)}
        self.assertEqual(len(seen), 101 * 101)
        self.assertGreaterEqual(min(seen), 1)

    def test_inverse_consistent(self):
        for n in range(1, 10202):
            self.assertEqual(canonical_D_R(*canonical_D_R_inv(n)), n)
            self.assertEqual(canonical_D_T(canonical_D_T_inv(n)), n)

    def test_indices_start_at_one(self):
        with self.assertRaises(RangeError):
            canonical_D_R_inv(0)
        with self.assertRaises(RangeError):
            canonical_D_T_inv(-3)


class TableBijectionTests(SimpleTestCase):

    def test_swap_inside_the_box(self):
        swapped = TableBijection(DT, ((0, 1),), {(0,): 2, (1,): 1})
        self.assertEqual(swapped.forward((0,)), 2)
        self.assertEqual(swapped.inverse(1), (1,))
        self.assertEqual(swapped.forward((-1,)), 3)
        self.assertEqual(swapped.inverse(3), (-1,))

    def test_rejects_values_outside_the_canonical_set(self):
        with self.assertRaises(RangeError):
            TableBijection(DT, ((0, 1),), {(0,): 1, (1,): 5})

    def test_rejects_partial_cover(self):
        with self.assertRaises(RangeError):
            TableBijection(DR, ((0, 1), (0, 0)), {(0, 0): 1})

    def test_serializer(self):
        data = {"base": "DR", "box": {"k": [0, 1], "l": [0, 0]}, "table": [[[0, 0], 2], [[1, 0], 1]]}
        serializer = BijectionOverrideSerializer(data=data)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        bijection = serializer.to_bijection()
        self.assertEqual(bijection.forward((1, 0)), 1)
        self.assertEqual(bijection.name, "DR+table")

    def test_serializer_errors(self):
        bad = [
            {"base": "DR", "box": {"l": [0, 0]}, "table": [[[0, 0], 1]]},
            {"base": "DT", "box": {"l": [0, 1]}, "table": [[[0], 1], [[0], 2]]},
            {"base": "DT", "box": {"l": [1, 0]}, "table": []},
            {"base": "DT", "box": {"l": [0, 1]}, "table": [[[0], 1], [[1], 7]]},
        ]
        for data in bad:
            self.assertFalse(BijectionOverrideSerializer(data=data).is_valid(), data)


class BandTests(SimpleTestCase):

    def test_band_index(self):
        self.assertEqual(band_index(1.0), 1)
        self.assertEqual(band_index(0.75), 1)
        self.assertEqual(band_index(0.5), 2)
        self.assertEqual(band_index(0.3), 2)
        self.assertIsNone(band_index(1.5))
        self.assertIsNone(band_index(0.0))

    def test_vectorized_agrees(self):
        xi = np.random.default_rng(20).uniform(-0.2, 1.2, 500)
        expected = [band_index(x) or 0 for x in xi]
        np.testing.assert_array_equal(band_indices(xi), expected)

    def test_shannon_atom(self):
        atom = shannon_atom(1, 3)
        self.assertAlmostEqual(atom.coeff, math.sqrt(2), places=15)
        self.assertEqual((atom.radial.a, atom.radial.b), (0.5, 1.0))
        self.assertEqual(atom.radial.lin_phase, 6.0)


class LiftTests(SimpleTestCase):

    def test_band_atoms_built_once_across_threads(self):
        lift = canonical_lift()
        bands = [n for n in range(1, 40) for _ in range(8)]
        with ThreadPoolExecutor(max_workers=8) as pool:
            atoms = list(pool.map(lift.band_atom, bands))
        for n, atom in zip(bands, atoms):
            self.assertIs(atom, lift.band_atom(n))
        self.assertEqual(len(lift._atoms), 39)
        q_side = lifted_generator_q(lift)
        self.assertIsNot(q_side._lock, lift._lock)
        self.assertIsNot(q_side.band_atom(1), lift.band_atom(1))

    def test_term_at(self):
        lift = canonical_lift()
        atom = lift.term_at(0.75)
        self.assertEqual((atom.radial.a, atom.radial.b), (0.5, 1.0))
        self.assertEqual((atom.fiber.c, atom.fiber.d, atom.fiber.freq), (0, 1, 0))
        atom = lift.term_at(0.3)
        self.assertEqual((atom.radial.a, atom.radial.b), (0.25, 0.5))
        self.assertEqual((atom.fiber.c, atom.fiber.d, atom.fiber.freq), (1, 2, 0))
        self.assertIsNone(lift.term_at(1.5))

    def test_zero_beyond_one(self):
        lift = canonical_lift()
        xi = np.linspace(1.0001, 5.0, 50)
        self.assertTrue(all(lift.term_at(x) is None for x in xi))
        np.testing.assert_array_equal(lift(xi, np.full(50, 0.5)), 0)

    def test_partial_sum_norms(self):
        lift = canonical_lift()
        zero = lift.partial_sum(0)
        self.assertAlmostEqual(inner_product_exact(zero, zero).real, 0.5, places=15)
        circle = canonical_lift(FiberKind.CIRCLE).partial_sum(1)
        self.assertAlmostEqual(inner_product_exact(circle, circle).real, 0.875, places=15)

    def test_single_term_consistency(self):
        rng = np.random.default_rng(21)
        lift = canonical_lift()
        N = 4
        partial = lift.partial_sum(N)
        for xi in rng.uniform(1e-3, 1.0, 1000):
            n = lift.band_of(xi)
            k, l = lift.key(n)
            if max(abs(k), abs(l)) > N:
                continue
            atom = lift.term_at(xi)
            y = np.array([k + 0.25, k + 0.75, k + 1.0])
            x = np.full(3, xi)
            np.testing.assert_allclose(partial(x, y), eval_atom(atom, x, y), atol=1e-15)

    def test_lazy_evaluation_matches_terms(self):
        lift = canonical_lift()
        x = np.array([0.75, 0.3, 0.1, 0.9])
        y = np.array([0.5, 1.5, 0.2, 3.0])
        expected = [complex(eval_atom(lift.term_at(a), np.array([a]), np.array([b]))[0]) for a, b in zip(x, y)]
        np.testing.assert_allclose(lift(x, y), expected, atol=0)

    def test_band_truncation_norm(self):
        lift = canonical_lift()
        head = lift.band_truncation(10)
        self.assertAlmostEqual(inner_product_exact(head, head).real, 1 - 2.0 ** -10, places=14)

    def test_bijection_arity_must_match_fiber(self):
        with self.assertRaises(ValueError):
            canonical_lift().__class__(DT, FiberKind.LINE)


class QSideLiftTests(SimpleTestCase):

    def test_term_inside_the_support(self):
        lift = lifted_generator_q(canonical_lift())
        self.assertIs(lift.side, Side.Q)
        atom = lift.term_at(0.9)
        self.assertAlmostEqual(atom.coeff, math.sqrt(2), places=15)
        self.assertEqual(atom.radial.power, 0.5)
        self.assertAlmostEqual(atom.radial.a, 1 / math.sqrt(2), places=15)
        self.assertEqual(atom.radial.b, 1.0)
        self.assertEqual((atom.fiber.c, atom.fiber.d), (0, 1))
        self.assertAlmostEqual(lift(np.array([0.9]), np.array([0.5]))[0], math.sqrt(1.8), places=14)

    def test_zero_beyond_one(self):
        self.assertIsNone(lifted_generator_q(canonical_lift()).term_at(1.1))

    def test_unitarity_of_truncations(self):
        lift = canonical_lift()
        q_head = lifted_generator_q(lift).band_truncation(12)
        self.assertAlmostEqual(inner_product_exact(q_head, q_head).real, 1 - 2.0 ** -12, places=13)


class GeneratorTests(SimpleTestCase):

    def test_case_one_at_minus_one_is_the_q_side(self):
        lift = canonical_lift()
        generator = generator_J(CaseTag("I", -1), lift)
        q_side = lifted_generator_q(lift)
        rng = np.random.default_rng(22)
        x1, x2 = rng.uniform(0.01, 1.2, 64), rng.uniform(-3, 3, 64)
        np.testing.assert_allclose(generator(x1, x2), q_side(x1, x2), atol=1e-15)

    def test_case_two_value(self):
        case = CaseTag("II")
        lift = canonical_lift()
        y1, y2 = chart_forward(case, (0.9, 0.0))
        self.assertAlmostEqual(y2, -math.log(0.9), places=15)
        expected = lifted_generator_q(lift)(np.array([y1]), np.array([y2]))[0] / math.sqrt(0.9)
        self.assertAlmostEqual(generator_J(case, lift).at((0.9, 0.0)), expected, places=14)
        self.assertAlmostEqual(expected, math.sqrt(2), places=14)

    def test_case_three_needs_the_circle_lift(self):
        with self.assertRaises(CaseMismatch):
            generator_J(CaseTag("III", 0.5), canonical_lift())
        generator = generator_J(CaseTag("III", 0.5), canonical_lift(FiberKind.CIRCLE))
        self.assertEqual(generator.at((2.0, 0.0)), 0)
