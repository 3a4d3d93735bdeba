import cmath
import math

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import quad
from scipy.special import fresnel

from .atoms import (
    AtomSum,
    Dilation,
    FiberKind,
    FiberShear,
    Identity,
    LinearPhase,
    PowerMultiply,
    SquareSubstitution,
    eval_atom,
    line_atom,
    circle_atom,
    transform_atom,
)
from .evaluators import SupportBox, demote
from .exceptions import MaxSubdivision, NonExactPair, UnboundedSupport, UnsupportedAction
from .inner import (
    DS_OVER_S,
    LEBESGUE,
    RadialWeight,
    inner_product,
    inner_product_exact,
    inner_product_quadrature,
    norm,
    radial_integral,
)
from .quadrature import adaptive_quad
from .serializers import AtomSumSerializer, atom_to_data


def random_atom(rng, integer_power=True):
    a = float(rng.uniform(0.0, 1.0))
    c = float(rng.integers(-2, 2))
    return line_atom(
        complex(rng.normal(), rng.normal()),
        a,
        a + float(rng.uniform(0.2, 1.0)),
        c,
        c + float(rng.uniform(0.5, 2.0)),
        freq=float(rng.integers(-2, 3)),
        power=float(rng.integers(0, 2)) if integer_power else float(rng.uniform(-0.4, 1.0)),
        lin_phase=float(rng.uniform(-2.0, 2.0)),
    )


class EvalAtomTests(SimpleTestCase):

    def test_indicator_inside_and_outside(self):
        atom = line_atom(1, 1, 2, 0, 1)
        self.assertEqual(eval_atom(atom, 1.5, 0.5), 1)
        self.assertEqual(eval_atom(atom, 2.5, 0.5), 0)

    def test_half_open_endpoints(self):
        atom = line_atom(1, 1, 2, 0, 1)
        self.assertEqual(eval_atom(atom, 1.0, 0.5), 0)
        self.assertEqual(eval_atom(atom, 2.0, 1.0), 1)

    def test_linear_phase(self):
        atom = line_atom(1, 0, 3, 0, 1, lin_phase=0.25)
        self.assertAlmostEqual(complex(eval_atom(atom, 2.0, 0.5)), -1, places=14)

    def test_circle_fiber_wraps(self):
        atom = circle_atom(1, 0, 1, freq=3)
        self.assertAlmostEqual(
            complex(eval_atom(atom, 0.5, 1.25)), complex(eval_atom(atom, 0.5, 0.25)), places=14
        )


class ExactInnerProductTests(SimpleTestCase):

    def test_f1_tensor_e00(self):
        f = AtomSum([line_atom(1, 0.5, 1.0, 0, 1)])
        self.assertEqual(inner_product_exact(f, f, LEBESGUE), 0.5)

    def test_shannon_atoms_orthogonal(self):
        f = AtomSum([line_atom(1, 1, 2, 0, 1)])
        g = AtomSum([line_atom(1, 1, 2, 0, 1, lin_phase=1.0)])
        self.assertEqual(inner_product_exact(f, g), 0)

    def test_phase_against_closed_form(self):
        f = AtomSum([line_atom(1, 1, 2, 0, 1, lin_phase=0.3)])
        g = AtomSum([line_atom(1, 1, 2, 0, 1)])
        expected = (cmath.exp(1.2j * math.pi) - cmath.exp(0.6j * math.pi)) / (0.6j * math.pi)
        self.assertLess(abs(inner_product_exact(f, g) - expected), 1e-15)
        approx, _ = inner_product_quadrature(demote(f), demote(g), LEBESGUE, 1e-12)
        self.assertLess(abs(approx - expected), 1e-11)

    def test_disjoint_supports_exactly_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = random_atom(rng)
            radial_apart = line_atom(1, a.radial.b, a.radial.b + 1, a.fiber.c, a.fiber.d)
            fiber_apart = line_atom(1, a.radial.a, a.radial.b, a.fiber.d, a.fiber.d + 1)
            self.assertEqual(inner_product_exact(AtomSum([a]), AtomSum([radial_apart])), 0)
            self.assertEqual(inner_product_exact(AtomSum([a]), AtomSum([fiber_apart])), 0)

    def test_dyadic_band_norms_under_ds_over_s(self):
        for m in range(1, 21):
            f = AtomSum([line_atom(1, 2.0 ** -m, 2.0 ** (-m + 1), 0, 1)])
            self.assertLess(abs(norm(f, DS_OVER_S) ** 2 - math.log(2)), 1e-14)

    def test_fiber_basis_is_normalized(self):
        for k in range(-2, 3):
            for l in range(-2, 3):
                e = AtomSum([line_atom(1, 0, 1, k, k + 1, freq=l)])
                self.assertAlmostEqual(norm(e), 1.0, places=15)

    def test_non_exact_pair_is_flagged(self):
        f = AtomSum([line_atom(1, 1, 2, 0, 1, power=0.5, lin_phase=0.3)])
        g = AtomSum([line_atom(1, 1, 2, 0, 1)])
        with self.assertRaises(NonExactPair):
            inner_product_exact(f, g)
        with self.assertRaises(NonExactPair):
            inner_product_exact(AtomSum([line_atom(1, 0, 1, 0, 1, quad_phase=1.0)]), g.scaled(1))

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            f, g = AtomSum([random_atom(rng)]), AtomSum([random_atom(rng)])
            fg = inner_product_exact(f, g)
            gf = inner_product_exact(g, f)
            self.assertLessEqual(abs(fg - gf.conjugate()), 1e-15)

    def test_exact_and_quadrature_agree(self):
        rng = np.random.default_rng(5)
        for _ in range(12):
            f, g = AtomSum([random_atom(rng)]), AtomSum([random_atom(rng)])
            exact = inner_product_exact(f, g)
            approx, _ = inner_product_quadrature(demote(f), demote(g), LEBESGUE, 1e-10)
            self.assertLessEqual(abs(exact - approx), 1e-9)

    def test_real_power_without_phase_difference(self):
        f = AtomSum([line_atom(2, 0.25, 1.0, 0, 1, power=0.3)])
        expected = 4 * (1 - 0.25 ** 1.6) / 1.6
        self.assertAlmostEqual(inner_product_exact(f, f).real, expected, places=14)


class QuadratureTests(SimpleTestCase):

    def test_area_of_unit_square(self):
        f = demote(AtomSum([line_atom(1, 1, 2, 0, 1)]))
        value, err = inner_product_quadrature(f, f, LEBESGUE, 1e-10)
        self.assertLess(abs(value - 1), 1e-10)
        self.assertLessEqual(err, 1e-10)

    def test_fresnel_integral(self):
        f = demote(AtomSum([line_atom(1, 0, 1, 0, 1, quad_phase=1.0)]))
        g = demote(AtomSum([line_atom(1, 0, 1, 0, 1)]))
        s, c = fresnel(math.sqrt(2.0))
        expected = complex(c, s) / math.sqrt(2.0)
        value, _ = inner_product_quadrature(f, g, LEBESGUE, 1e-12)
        self.assertLess(abs(value - expected), 1e-11)

    def test_disjoint_supports(self):
        f = demote(AtomSum([line_atom(1, 0, 1, 0, 1)]))
        g = demote(AtomSum([line_atom(1, 2, 3, 0, 1)]))
        self.assertEqual(inner_product_quadrature(f, g), (0j, 0.0))

    def test_unbounded_support_rejected(self):
        f = demote(AtomSum([line_atom(1, 1, math.inf, 0, 1, power=-1.0)]))
        with self.assertRaises(UnboundedSupport):
            inner_product_quadrature(f, f)

    def test_power_tail_from_zero_has_no_closed_form(self):
        with self.assertRaises(NonExactPair):
            radial_integral(-2.0, 0.0, 0.0, math.inf)
        f = AtomSum([line_atom(1, 0.0, math.inf, 0, 1, power=-1.0)])
        with self.assertRaises(NonExactPair):
            inner_product_exact(f, f)
        self.assertAlmostEqual(radial_integral(-2.0, 0.0, 2.0, math.inf).real, 0.5, places=15)

    def test_quadrature_conjugate_symmetry(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            f, g = demote(AtomSum([random_atom(rng)])), demote(AtomSum([random_atom(rng)]))
            fg, _ = inner_product_quadrature(f, g)
            gf, _ = inner_product_quadrature(g, f)
            self.assertLessEqual(abs(fg - gf.conjugate()), 1e-15)

    def test_budget_exhaustion(self):
        with self.assertRaises(MaxSubdivision):
            adaptive_quad(lambda x: np.where(x > 0.3, 1.0, 0.0), 0.0, 1.0, tol=1e-14, budget=64)

    def test_vector_valued_integrand(self):
        value, err = adaptive_quad(lambda x: np.stack([x, x ** 2]), 0.0, 1.0, tol=1e-12)
        self.assertAlmostEqual(value[0].real, 0.5, places=13)
        self.assertAlmostEqual(value[1].real, 1.0 / 3.0, places=13)

    def test_weighted_norm_falls_back_to_quadrature(self):
        f = AtomSum([line_atom(1, 0.5, 1.0, 0, 1, power=0.5, lin_phase=0.7),
                     line_atom(1, 0.5, 1.0, 0, 1)])
        cross, _ = quad(lambda r: r ** -0.5 * math.cos(1.4 * math.pi * r), 0.5, 1.0, epsabs=1e-14)
        expected = 0.5 + math.log(2.0) + 2.0 * cross
        self.assertAlmostEqual(norm(f, RadialWeight(-1.0)) ** 2, expected, places=9)
        self.assertAlmostEqual(inner_product(f, f, RadialWeight(-1.0)).real, expected, places=9)


class TransformAtomTests(SimpleTestCase):

    def test_dilation_by_four(self):
        atom = transform_atom(line_atom(1, 1, 2, 0, 1), Dilation(4.0))
        self.assertEqual((atom.radial.a, atom.radial.b), (0.25, 0.5))
        self.assertEqual(atom.coeff, 2)

    def test_square_substitution_matches_u(self):
        atom = line_atom(1, 1, 2, 0, 1)
        out = transform_atom(
            transform_atom(atom, SquareSubstitution()), PowerMultiply(0.5, math.sqrt(2.0))
        )
        self.assertEqual(out.radial.a, 1.0)
        self.assertEqual(out.radial.b, math.sqrt(2.0))
        self.assertAlmostEqual(complex(eval_atom(out, 1.2, 0.5)), math.sqrt(2.4), places=14)

    def test_identity(self):
        atom = line_atom(1, 1, 2, 0, 1, lin_phase=0.3)
        self.assertIs(transform_atom(atom, Identity()), atom)

    def test_dilation_round_trip(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            atom = random_atom(rng, integer_power=False)
            s = float(rng.uniform(0.1, 10.0))
            back = transform_atom(transform_atom(atom, Dilation(s)), Dilation(1.0 / s))
            self.assertLessEqual(abs(back.radial.a - atom.radial.a), 1e-15)
            self.assertLessEqual(abs(back.radial.b - atom.radial.b), 1e-15)
            self.assertLessEqual(abs(back.radial.lin_phase - atom.radial.lin_phase), 1e-15)
            self.assertLessEqual(abs(back.coeff - atom.coeff), 1e-14 * abs(atom.coeff))

    def test_phases_scale_under_dilation(self):
        atom = transform_atom(line_atom(1, 1, 2, 0, 1), LinearPhase(0.5))
        out = transform_atom(atom, Dilation(2.0))
        self.assertEqual(out.radial.lin_phase, 1.0)

    def test_fiber_shear_is_unsupported(self):
        with self.assertRaises(UnsupportedAction):
            transform_atom(line_atom(1, 1, 2, 0, 1), FiberShear(1.0))


class FunctionFormatTests(SimpleTestCase):

    def test_round_trip_through_serializer(self):
        atom = line_atom(complex(0.6, -0.8), 0.5, 1.0, -1, 0, freq=2, power=0.5, lin_phase=0.25)
        serializer = AtomSumSerializer(data={"schemaVersion": 1, "atoms": [atom_to_data(atom)]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.to_sum().atoms[0], atom)

    def test_line_fiber_needs_interval(self):
        data = {"atoms": [{"interval": [0, 1], "fiber": {"kind": "line", "freq": 0}}]}
        serializer = AtomSumSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn("atoms", serializer.errors)

    def test_mixed_fiber_kinds_rejected(self):
        data = {"atoms": [
            {"interval": [0, 1], "fiber": {"kind": "line", "interval": [0, 1]}},
            {"interval": [0, 1], "fiber": {"kind": "circle", "freq": 1}},
        ]}
        self.assertFalse(AtomSumSerializer(data=data).is_valid())

    def test_support_box_intersection(self):
        box = SupportBox((0, 2), (0, 1)).intersect(SupportBox((1, 3), (0.5, 4)))
        self.assertEqual(box, SupportBox((1, 2), (0.5, 1)))
        self.assertIsNone(SupportBox((0, 1), (0, 1)).intersect(SupportBox((1, 2), (0, 1))))
        self.assertIs(demote(AtomSum([circle_atom(1, 0, 1)], FiberKind.CIRCLE)).fiber, FiberKind.CIRCLE)
