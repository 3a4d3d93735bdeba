import math

import numpy as np
from django.test import SimpleTestCase

from functions.atoms import AtomSum, line_atom
from functions.evaluators import Domain, bump, demote
from functions.inner import inner_product_quadrature, norm

from .actions import act
from .cases import (
    L_CASE,
    Q_CASE,
    CaseKind,
    CaseTag,
    GroupElement,
    compose,
    haar_density,
    identity,
    inverse,
    lattice_element,
    left_translation_jacobian,
    to_q_parameters,
)
from .exceptions import CaseMismatch

CASES = [
    L_CASE,
    Q_CASE,
    CaseTag("I", -1.0),
    CaseTag("I", -0.5),
    CaseTag("II"),
    CaseTag("III", 0.7),
    CaseTag("IV", 0.7),
]


def random_element(rng, case):
    if case.kind in (CaseKind.L, CaseKind.Q):
        return GroupElement(float(rng.uniform(-2, 2)), float(rng.uniform(0.5, 2.0)), case)
    return GroupElement(float(rng.uniform(-2, 2)), float(rng.uniform(-0.5, 0.5)), case)


def sample_function(case):
    if case.kind in (CaseKind.L, CaseKind.Q):
        return AtomSum([line_atom(1, 0.5, 1.5, 0, 1), line_atom(0.5j, 1.0, 2.0, -1, 1, freq=2)])
    if case.kind in (CaseKind.I, CaseKind.II):
        return bump(Domain.HALF_PLANE, (1.0, 0.2), (0.4, 0.5), freq=(0.0, 1.0))
    if case.kind is CaseKind.III:
        return bump(Domain.PLANE, (0.6, -0.3), (0.4, 0.4), freq=(1.0, 0.0))
    return bump(Domain.PLANE, (1.2, 0.1), (0.3, 0.3), freq=(0.0, 1.0))


def sample_points(rng, case, count=32):
    if case.kind is CaseKind.III:
        return rng.uniform(-1.5, 1.5, count), rng.uniform(-1.5, 1.5, count)
    if case.kind is CaseKind.IV:
        x1 = rng.uniform(0.5, 2.0, count)
        return x1, x1 * rng.uniform(-0.9, 0.9, count)
    return rng.uniform(0.05, 2.5, count), rng.uniform(-1.5, 1.5, count)


class CaseTagTests(SimpleTestCase):

    def test_alpha_zero_invalid_for_case_one(self):
        with self.assertRaisesMessage(ValueError, "alpha=0 invalid for case I"):
            CaseTag("I", 0.0)

    def test_alpha_ranges(self):
        with self.assertRaises(ValueError):
            CaseTag("I", -1.5)
        with self.assertRaises(ValueError):
            CaseTag("III", -0.1)
        with self.assertRaises(ValueError):
            CaseTag("IV")
        with self.assertRaises(ValueError):
            CaseTag("II", 0.3)
        self.assertEqual(CaseTag("IV", 0).alpha, 0.0)

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            CaseTag("V")

    def test_as_dict(self):
        self.assertEqual(CaseTag("I", -0.5).as_dict(), {"case": "I", "alpha": -0.5})
        self.assertEqual(CaseTag("II").as_dict(), {"case": "II"})


class GroupLawTests(SimpleTestCase):

    def test_compose_examples(self):
        g = compose(L_CASE, GroupElement(1, 2), GroupElement(3, 4))
        self.assertEqual((g.u, g.t), (7, 8))
        g = compose(Q_CASE, GroupElement(1, 2), GroupElement(3, 4))
        self.assertEqual((g.u, g.t), (13, 8))
        g = compose(CaseTag("I", -1), GroupElement(0, 1), GroupElement(1, 0))
        self.assertAlmostEqual(g.u, math.e ** 2, places=13)
        self.assertEqual(g.t, 1)

    def test_inverse_examples(self):
        g = inverse(L_CASE, GroupElement(3, 4))
        self.assertEqual((g.u, g.t), (-0.75, 0.25))
        g = inverse(Q_CASE, GroupElement(0, 5))
        self.assertEqual((g.u, g.t), (0, 0.2))
        for case in CASES[2:]:
            g = inverse(case, GroupElement(0, 0.3))
            self.assertEqual((g.u, g.t), (0, -0.3))

    def test_inverse_composes_to_identity(self):
        rng = np.random.default_rng(1)
        for case in CASES:
            e = identity(case)
            for _ in range(50):
                g = random_element(rng, case)
                h = compose(case, inverse(case, g), g)
                self.assertAlmostEqual(h.u, e.u, delta=1e-14)
                self.assertAlmostEqual(h.t, e.t, delta=1e-14)

    def test_associativity(self):
        rng = np.random.default_rng(2)
        for case in CASES:
            for _ in range(200):
                g1, g2, g3 = (random_element(rng, case) for _ in range(3))
                left = compose(case, g3, compose(case, g2, g1))
                right = compose(case, compose(case, g3, g2), g1)
                self.assertAlmostEqual(left.u, right.u, delta=1e-13 * max(1.0, abs(left.u)))
                self.assertAlmostEqual(left.t, right.t, delta=1e-13 * max(1.0, abs(left.t)))

    def test_case_mismatch(self):
        with self.assertRaises(CaseMismatch):
            compose(Q_CASE, GroupElement(0, 1, L_CASE), GroupElement(0, 1))
        with self.assertRaises(CaseMismatch):
            inverse(L_CASE, GroupElement(0, -1))


class HaarTests(SimpleTestCase):

    def test_density_examples(self):
        self.assertEqual(haar_density(L_CASE, GroupElement(0, 2)), 0.25)
        self.assertEqual(haar_density(Q_CASE, GroupElement(0, 2)), 0.125)
        self.assertEqual(haar_density(CaseTag("I", -1), GroupElement(0, 0)), 1)

    def test_left_invariance(self):
        rng = np.random.default_rng(3)
        for case in CASES:
            for _ in range(20):
                g0, g = random_element(rng, case), random_element(rng, case)
                moved = compose(case, g0, g)
                pushed = haar_density(case, moved) * left_translation_jacobian(case, g0, g)
                self.assertAlmostEqual(pushed / haar_density(case, g), 1.0, delta=1e-7)


class LatticeTests(SimpleTestCase):

    def test_lattice_examples(self):
        g = lattice_element(Q_CASE, 2, 1)
        self.assertEqual((g.u, g.t), (8, 2))
        g = lattice_element(CaseTag("I", -1), 2, 1)
        self.assertEqual(g.u, 8)
        self.assertAlmostEqual(g.t, math.log(2), places=15)
        g = lattice_element(L_CASE, 0, 0)
        self.assertEqual((g.u, g.t), (0, 1))

    def test_lattice_maps_onto_q_lattice(self):
        for case in CASES[2:]:
            for k in range(-3, 4):
                for m in range(-3, 4):
                    mapped = to_q_parameters(case, lattice_element(case, k, m))
                    target = lattice_element(Q_CASE, k, m)
                    self.assertEqual(mapped.u, target.u)
                    self.assertAlmostEqual(mapped.t, target.t, delta=1e-15 * target.t)

    def test_lattice_is_injective(self):
        for case in CASES:
            seen = {(g.u, g.t) for g in (lattice_element(case, k, m) for k in range(-4, 5) for m in range(-4, 5))}
            self.assertEqual(len(seen), 81)


class ActionTests(SimpleTestCase):

    def test_identity_element_leaves_functions_unchanged(self):
        rng = np.random.default_rng(4)
        for case in CASES:
            f = sample_function(case)
            g = act(case, identity(case), f)
            x1, x2 = sample_points(rng, case)
            np.testing.assert_allclose(g(x1, x2), f(x1, x2), atol=1e-15)

    def test_q_dilation_of_indicator(self):
        f = AtomSum([line_atom(1, 1, 2, 0, 1)])
        g = act(Q_CASE, GroupElement(0, 4), f)
        (atom,) = g.atoms
        self.assertEqual(atom.coeff, 2)
        self.assertEqual((atom.radial.a, atom.radial.b), (0.25, 0.5))

    def test_case_one_at_minus_one_matches_q(self):
        rng = np.random.default_rng(5)
        case = CaseTag("I", -1)
        f = sample_function(case)
        for _ in range(5):
            u, t = float(rng.uniform(-2, 2)), float(rng.uniform(-0.5, 0.5))
            left = act(case, GroupElement(u, t), f)
            right = act(Q_CASE, GroupElement(u, math.exp(t)), f)
            x1, x2 = sample_points(rng, case, 64)
            np.testing.assert_allclose(left(x1, x2), right(x1, x2), atol=1e-14)

    def test_representation_property(self):
        rng = np.random.default_rng(6)
        for case in CASES:
            f = sample_function(case)
            for _ in range(20):
                g1, g2 = random_element(rng, case), random_element(rng, case)
                once = act(case, compose(case, g2, g1), f)
                twice = act(case, g2, act(case, g1, f))
                x1, x2 = sample_points(rng, case)
                np.testing.assert_allclose(once(x1, x2), twice(x1, x2), atol=1e-12, rtol=0)

    def test_unitarity(self):
        rng = np.random.default_rng(7)
        for case in CASES:
            f = sample_function(case)
            expected = norm(f, tol=1e-11)
            for _ in range(20 if case is L_CASE else 3):
                g = act(case, random_element(rng, case), f)
                if case is L_CASE:
                    got = norm(g)
                else:
                    evaluator = demote(g) if isinstance(g, AtomSum) else g
                    value, _ = inner_product_quadrature(evaluator, evaluator, tol=1e-11)
                    got = math.sqrt(value.real)
                self.assertAlmostEqual(got, expected, delta=1e-9)

    def test_case_four_vanishes_off_the_cone(self):
        case = CaseTag("IV", 0.7)
        g = act(case, GroupElement(0.3, 0.1), sample_function(case))
        self.assertEqual(g.at((0.5, 0.6)), 0)
        self.assertEqual(g.at((-1.0, 0.0)), 0)
