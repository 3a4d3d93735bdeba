import math

import numpy as np
from django.test import SimpleTestCase

from functions.atoms import AtomSum, line_atom
from functions.evaluators import Domain, PointEvaluator, SupportBox, bump, demote
from functions.inner import inner_product_quadrature
from groups.actions import act
from groups.cases import L_CASE, Q_CASE, CaseKind, CaseTag, GroupElement, to_q_parameters

from .charts import CoordChart, chart_backward, chart_forward, finite_difference_jacobian, jacobian, second_coordinate_drift
from .exceptions import DomainError
from .operators import apply_U, apply_U_inv, apply_U_J, apply_U_J_inv, to_hyperbolic, to_polar

ALPHAS = {
    CaseKind.I: (-1.0, -0.5, -0.1),
    CaseKind.II: (None,),
    CaseKind.III: (0.0, 0.7, 2.0),
    CaseKind.IV: (0.0, 0.7, 2.0),
}


def all_cases():
    return [CaseTag(kind, alpha) for kind, alphas in ALPHAS.items() for alpha in alphas]


def source_points(rng, case, count):
    if case.kind is CaseKind.III:
        return rng.uniform(0.1, 3.0, count), rng.uniform(0.0, 1.0, count)
    return rng.uniform(0.1, 3.0, count), rng.uniform(-2.0, 2.0, count)


def circle_distance(a, b):
    return abs((a - b + 0.5) % 1.0 - 0.5)


def source_function(case):
    if case.kind in (CaseKind.I, CaseKind.II):
        return bump(Domain.HALF_PLANE, (1.0, 0.3), (0.4, 0.5), freq=(0.5, 1.0))
    if case.kind is CaseKind.III:
        return bump(Domain.PLANE, (0.6, -0.3), (0.4, 0.4), freq=(1.0, 0.0))
    return bump(Domain.PLANE, (1.2, 0.1), (0.3, 0.3), freq=(0.0, 1.0))


def chart_points(rng, case, count=64):
    y1 = rng.uniform(0.3, 2.5, count)
    if case.kind is CaseKind.III:
        return y1, rng.uniform(0.0, 1.0, count)
    return y1, rng.uniform(-2.0, 2.0, count)


def cartesian_points(rng, case, count=64):
    if case.kind is CaseKind.III:
        return rng.uniform(-1.5, 1.5, count), rng.uniform(-1.5, 1.5, count)
    if case.kind is CaseKind.IV:
        x1 = rng.uniform(0.5, 2.0, count)
        return x1, x1 * rng.uniform(-0.9, 0.9, count)
    return rng.uniform(0.2, 2.5, count), rng.uniform(-1.5, 1.5, count)


class UTests(SimpleTestCase):

    def test_u_on_indicator(self):
        (atom,) = apply_U(AtomSum([line_atom(1, 1, 2, 0, 1)])).atoms
        self.assertAlmostEqual(atom.coeff, math.sqrt(2), places=15)
        self.assertEqual(atom.radial.power, 0.5)
        self.assertEqual((atom.radial.a, atom.radial.b), (1.0, math.sqrt(2)))

    def test_inverse_round_trip_on_random_atoms(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            a = float(rng.uniform(0.0, 2.0))
            f = AtomSum([line_atom(
                complex(rng.normal(), rng.normal()), a, a + float(rng.uniform(0.1, 2.0)), 0, 1,
                power=float(rng.uniform(-0.4, 2.0)),
            )])
            (back,) = apply_U_inv(apply_U(f)).atoms
            (orig,) = f.atoms
            self.assertAlmostEqual(back.coeff, orig.coeff, delta=1e-14 * abs(orig.coeff))
            self.assertAlmostEqual(back.radial.power, orig.radial.power, delta=1e-15)
            self.assertAlmostEqual(back.radial.a, orig.radial.a, delta=1e-15)
            self.assertAlmostEqual(back.radial.b, orig.radial.b, delta=1e-15 * orig.radial.b)

    def test_linear_phase_becomes_quadratic(self):
        f = AtomSum([line_atom(1, 0.5, 1.5, 0, 1, lin_phase=0.75)])
        (atom,) = apply_U(f).atoms
        self.assertEqual(atom.radial.quad_phase, 1.5)
        self.assertEqual(atom.radial.lin_phase, 0.0)
        (back,) = apply_U_inv(apply_U(f)).atoms
        self.assertEqual(back.radial.lin_phase, 0.75)

    def test_quadratic_phase_is_demoted(self):
        f = AtomSum([line_atom(1, 0.5, 1.5, 0, 1, quad_phase=0.3)])
        g = apply_U(f)
        self.assertIsInstance(g, PointEvaluator)
        r = np.array([0.8, 1.0, 1.2])
        y = np.full(3, 0.5)
        np.testing.assert_allclose(g(r, y), np.sqrt(2 * r) * f(r * r, y), atol=1e-15)

    def test_u_is_unitary(self):
        f = AtomSum([line_atom(1, 0.5, 1.0, 0, 1)])
        g = demote(apply_U(f))
        value, _ = inner_product_quadrature(g, g, tol=1e-12)
        self.assertAlmostEqual(value.real, 0.5, delta=1e-10)

    def test_l_and_q_are_intertwined(self):
        rng = np.random.default_rng(11)
        f = AtomSum([line_atom(1, 0.5, 1.5, 0, 1), line_atom(2 - 1j, 1.0, 3.0, -1, 1, freq=1, power=1)])
        for _ in range(20):
            u, s = float(rng.uniform(-3, 3)), float(rng.uniform(0.25, 4.0))
            left = act(L_CASE, GroupElement(u, s), f)
            right = apply_U_inv(act(Q_CASE, to_q_parameters(L_CASE, GroupElement(u, s)), apply_U(f)))
            self.assertIsInstance(right, AtomSum)
            xi = rng.uniform(0.01, 3.0, 64)
            y = rng.uniform(-1.5, 1.5, 64)
            np.testing.assert_allclose(left(xi, y), right(xi, y), atol=1e-12, rtol=0)


class ChartTests(SimpleTestCase):

    def test_forward_examples(self):
        self.assertEqual(chart_forward(CaseTag("I", -0.5), (2, 3)), (2.0, 6.0))
        self.assertEqual(chart_forward(CaseTag("II"), (1, 5)), (1.0, 5.0))
        self.assertEqual(chart_forward(CaseTag("I", -1), (0.7, -0.2)), (0.7, -0.2))

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            chart_forward(CaseTag("I", -0.5), (0.0, 1.0))
        with self.assertRaises(DomainError):
            chart_backward(CaseTag("III", 0.7), (-1.0, 0.2))
        with self.assertRaises(DomainError):
            jacobian(CaseTag("II"), (0.0, 0.0))

    def test_round_trip(self):
        rng = np.random.default_rng(12)
        for case in all_cases():
            chart = CoordChart(case)
            p1, p2 = source_points(rng, case, 500)
            for point in zip(p1, p2):
                back = chart.backward(chart.forward(point))
                self.assertAlmostEqual(back[0], point[0], delta=1e-14 * max(1.0, point[0]))
                if case.kind is CaseKind.III:
                    self.assertLessEqual(circle_distance(back[1], point[1]), 1e-14)
                else:
                    self.assertAlmostEqual(back[1], point[1], delta=1e-14 * max(1.0, abs(point[1])))

    def test_jacobian_matches_finite_differences(self):
        rng = np.random.default_rng(13)
        for case in all_cases():
            chart = CoordChart(case)
            q1, q2 = source_points(rng, case, 100)
            for point in zip(q1, q2):
                exact = chart.jacobian(point)
                self.assertGreater(exact, 0)
                numeric = finite_difference_jacobian(chart, point, step=1e-6)
                self.assertLessEqual(abs(numeric - exact) / exact, 1e-6)

    def test_second_coordinate_ignores_dilations(self):
        rng = np.random.default_rng(14)
        for case in all_cases():
            chart = CoordChart(case)
            p1, p2 = source_points(rng, case, 200)
            for point, t in zip(zip(p1, p2), rng.uniform(-1.0, 1.0, 200)):
                self.assertLessEqual(second_coordinate_drift(chart, t, point), 1e-12)


class PolarTests(SimpleTestCase):

    def test_disk_is_rotation_invariant(self):
        disk = PointEvaluator(
            domain=Domain.PLANE,
            rule=lambda x1, x2: np.where(x1 * x1 + x2 * x2 <= 1.0, 1.0, 0.0),
            support=SupportBox((-1.0, 1.0), (-1.0, 1.0)),
        )
        fp = to_polar(disk)
        theta = np.linspace(0.0, 0.99, 12)
        np.testing.assert_array_equal(fp(np.full(12, 0.5), theta), np.ones(12))

    def test_coordinate_function(self):
        f = PointEvaluator(domain=Domain.PLANE, rule=lambda x1, x2: x1 + 0j, support=SupportBox((-2, 2), (-2, 2)))
        r, theta = np.array([0.5, 1.0, 1.5]), np.array([0.1, 0.4, 0.8])
        np.testing.assert_allclose(to_polar(f)(r, theta), r * np.cos(2 * np.pi * theta), atol=1e-15)

    def test_hyperbolic_origin_of_angle(self):
        f = bump(Domain.PLANE, (1.0, 0.0), (0.5, 0.3))
        self.assertEqual(to_hyperbolic(f).at((1.0, 0.0)), f.at((1.0, 0.0)))

    def test_hyperbolic_needs_the_cone(self):
        with self.assertRaises(DomainError):
            to_hyperbolic(bump(Domain.PLANE, (-1.0, 0.0), (0.5, 0.3)))


class UJTests(SimpleTestCase):

    def test_case_one_at_minus_one_is_identity(self):
        rng = np.random.default_rng(15)
        case = CaseTag("I", -1)
        f = source_function(case)
        y1, y2 = chart_points(rng, case)
        np.testing.assert_array_equal(apply_U_J(case, f)(y1, y2), f(y1, y2))

    def test_round_trip(self):
        rng = np.random.default_rng(16)
        for case in all_cases():
            f = source_function(case)
            back = apply_U_J_inv(case, apply_U_J(case, f))
            x1, x2 = cartesian_points(rng, case)
            np.testing.assert_allclose(back(x1, x2), f(x1, x2), atol=1e-14, rtol=0)

    def test_case_two_value(self):
        case = CaseTag("II")

        def indicator(x1, x2):
            return np.where((x1 > 1) & (x1 <= 2) & (x2 > 0) & (x2 <= 1), 1.0 + 0j, 0j)

        f = PointEvaluator(domain=Domain.HALF_PLANE, rule=indicator, support=SupportBox((1, 2), (0, 1)))
        expected = math.sqrt(1.5) * indicator(1.5, 1.5 * 0.2 + 1.5 * math.log(1.5))
        self.assertAlmostEqual(apply_U_J(case, f).at((1.5, 0.2)), complex(expected), places=15)

    def test_unitarity(self):
        for case in all_cases():
            f = source_function(case)
            before, _ = inner_product_quadrature(f, f, tol=1e-10)
            g = apply_U_J(case, f)
            after, _ = inner_product_quadrature(g, g, tol=1e-10)
            self.assertAlmostEqual(after.real, before.real, delta=1e-8)

    def test_intertwining(self):
        rng = np.random.default_rng(17)
        for case in all_cases():
            f = source_function(case)
            transferred = apply_U_J(case, f)
            for _ in range(20):
                g = GroupElement(float(rng.uniform(-2, 2)), float(rng.uniform(-0.5, 0.5)), case)
                left = apply_U_J(case, act(case, g, f))
                right = act(Q_CASE, to_q_parameters(case, g), transferred)
                y1, y2 = chart_points(rng, case)
                np.testing.assert_allclose(left(y1, y2), right(y1, y2), atol=1e-10, rtol=0)
