import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, TestCase, override_settings

from .cli import EXIT_CONFIG, EXIT_FAILED, EXIT_PASS, join_negative_values, run
from .exceptions import SupportViolation, TruncationTooSmall
from .models import VerificationRun
from .registry import CHECKS
from .reports import VerificationReport, body_hash
from .serializers import (
    DiscreteParamsSerializer,
    IntertwineParamsSerializer,
    RunConfigSerializer,
    flatten_errors,
)
from .systems import ElementExpansion, LatticeBox
from .tasks import execute_check
from .utils import max_defect, ordered_map, parse_expansion, parse_range, rng_for, sample_band_points

SEED = 20240601


def run_check(name, raw, seed=SEED):
    serializer_class, check = CHECKS[name]
    params = serializer_class(data=raw)
    assert params.is_valid(), params.errors
    return check(params.to_params(), seed)


def wide_atom(a=1 / 64, b=1.0):
    return {"atoms": [{"interval": [a, b], "fiber": {"kind": "line", "interval": [0, 1]}}]}


class ReportTests(SimpleTestCase):

    def report(self, defect, tol=1e-12):
        return VerificationReport(check="gram", case="L", params={"k": [-2, 2]}, maxDefect=defect, tolerance=tol, samples=4)

    def test_pass_iff_defect_within_tolerance(self):
        self.assertTrue(self.report(1e-13).passed)
        self.assertTrue(self.report(1e-12).passed)
        self.assertFalse(self.report(2e-12).passed)
        self.assertFalse(self.report(math.nan).passed)
        self.assertFalse(self.report(math.inf, tol=math.inf).passed)

    def test_body_hash_ignores_runtime(self):
        a = self.report(0.0)
        b = self.report(0.0)
        b.runtimeSeconds = 12.5
        self.assertEqual(a.as_dict()["bodyHash"], b.as_dict()["bodyHash"])
        b.samples = 5
        self.assertNotEqual(a.as_dict()["bodyHash"], b.as_dict()["bodyHash"])

    def test_schema_fields(self):
        data = self.report(0.0).as_dict()
        for key in ("check", "case", "params", "maxDefect", "tolerance", "pass", "samples",
                    "runtimeSeconds", "notes", "configHash", "schemaVersion", "workers"):
            self.assertIn(key, data)
        self.assertEqual(data["schemaVersion"], 1)

    def test_tolerance_finer_than_resolution_fails(self):
        report = self.report(0.0, tol=1e-20)
        self.assertTrue(report.passed)
        report.resolution = 2.2e-16
        self.assertFalse(report.passed)
        self.assertFalse(report.as_dict()["pass"])

    def test_failed_report_is_infinite(self):
        report = VerificationReport.failed("parseval", "L", {}, 1e-12, TruncationTooSmall("too small"))
        self.assertFalse(report.passed)
        self.assertEqual(report.as_dict()["maxDefect"], "inf")
        self.assertIn("TruncationTooSmall", report.notes)

    def test_body_hash_of_plain_dict(self):
        self.assertEqual(body_hash({"a": 1, "runtimeSeconds": 3}), body_hash({"a": 1}))


class UtilsTests(SimpleTestCase):

    def test_parse_range(self):
        self.assertEqual(parse_range("-2..2"), (-2, 2))
        self.assertEqual(parse_range("3..3"), (3, 3))
        with self.assertRaises(ValueError):
            parse_range("2..-2")
        with self.assertRaises(ValueError):
            parse_range("a..b")

    def test_parse_expansion(self):
        self.assertEqual(parse_expansion("0,0"), [{"key": [0, 0], "coef_re": 1.0}])
        self.assertEqual(
            parse_expansion("0,0:0.6;1,0:0.8"),
            [{"key": [0, 0], "coef_re": 0.6}, {"key": [1, 0], "coef_re": 0.8}],
        )
        with self.assertRaises(ValueError):
            parse_expansion("x:1")

    def test_sample_points_cover_every_band(self):
        points = sample_band_points(256, SEED, 4)
        self.assertEqual(len(points), 260)
        self.assertTrue(np.all((points > 0) & (points <= 1)))
        np.testing.assert_allclose(points[-4:], [0.75, 0.375, 0.1875, 0.09375])
        np.testing.assert_array_equal(points, sample_band_points(256, SEED, 4))

    def test_max_defect_propagates_nan(self):
        self.assertEqual(max_defect([1e-3, 2e-3]), 2e-3)
        self.assertEqual(max_defect([]), 0.0)
        self.assertEqual(max_defect([1e-3, math.nan]), math.inf)

    def test_rng_is_keyed_by_label(self):
        a = rng_for(SEED, "groups", "I(-0.5)").uniform(size=3)
        b = rng_for(SEED, "groups", "I(-0.5)").uniform(size=3)
        c = rng_for(SEED, "groups", "II").uniform(size=3)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.allclose(a, c))

    @override_settings(METALIFT_WORKERS=4)
    def test_ordered_map_keeps_order(self):
        self.assertEqual(ordered_map(lambda v: v * v, range(20)), [v * v for v in range(20)])

    def test_join_negative_values(self):
        self.assertEqual(
            join_negative_values(["--k", "-2..2", "--rep", "l", "--alpha", "-1,-0.5"]),
            ["--k=-2..2", "--rep", "l", "--alpha=-1,-0.5"],
        )
        self.assertEqual(join_negative_values(["--tol", "1e-10"]), ["--tol", "1e-10"])


class GramTests(SimpleTestCase):

    def test_l_side_box(self):
        report = run_check("gram", {"rep": "l", "generator": "DR", "k": [-2, 2], "m": [-4, 4], "l": [-2, 2]})
        self.assertTrue(report.passed, report.maxDefect)
        self.assertLessEqual(report.maxDefect, 1e-12)
        self.assertEqual(report.samples, (5 * 9) ** 2)

    def test_circle_generator(self):
        report = run_check("gram", {"rep": "l", "generator": "DT", "k": [-1, 1], "m": [-2, 2], "l": [-2, 2]})
        self.assertLessEqual(report.maxDefect, 1e-12)

    def test_single_element(self):
        report = run_check("gram", {"rep": "l", "k": [0, 0], "m": [0, 0], "l": [0, 0]})
        self.assertLessEqual(report.maxDefect, 1e-12)

    def test_asymmetric_fiber_box_rejected(self):
        params = CHECKS["gram"][0](data={"l": [-1, 2]})
        self.assertFalse(params.is_valid())
        self.assertIn("l", params.errors)

    def test_chart_side_needs_a_case(self):
        params = CHECKS["gram"][0](data={"rep": "J"})
        self.assertFalse(params.is_valid())
        self.assertIn("case", params.errors)


class ParsevalTests(SimpleTestCase):

    def test_unit_atom(self):
        report = run_check("parseval", {})
        self.assertLessEqual(report.maxDefect, 1e-12)
        self.assertAlmostEqual(report.extra["norm2"], 1.0, places=12)

    def test_element_expansion(self):
        function = {"elements": [{"k": 0, "m": 0, "coef_re": 0.6}, {"k": 1, "m": -2, "coef_re": 0.0, "coef_im": 0.8}]}
        report = run_check("parseval", {"function": function, "k": [-1, 1], "m": [-3, 3]})
        self.assertLessEqual(report.maxDefect, 1e-12)
        self.assertAlmostEqual(report.extra["coefficientEnergy"], 1.0, places=12)

    def test_zero_function(self):
        report = run_check("parseval", {"function": {"atoms": []}})
        self.assertEqual(report.maxDefect, 0.0)

    def test_bands_beyond_the_box(self):
        with self.assertRaises(TruncationTooSmall):
            run_check("parseval", {"function": wide_atom(), "k": [0, 0]})

    def test_element_outside_the_box(self):
        function = {"elements": [{"k": 5, "m": 0}]}
        with self.assertRaises(TruncationTooSmall):
            run_check("parseval", {"function": function, "k": [-2, 2], "m": [-4, 4]})

    def test_defect_shrinks_with_the_box(self):
        defects = [
            run_check("parseval", {"function": wide_atom(), "k": [-n, n], "allowPartial": True}).maxDefect
            for n in range(1, 6)
        ]
        for smaller, larger in zip(defects, defects[1:]):
            self.assertLessEqual(larger, smaller + 1e-15)
        self.assertLess(defects[-1], defects[0])


class IsometryTests(SimpleTestCase):

    def test_l_side_operator_gram(self):
        report = run_check("isometry", {"rep": "l", "L": 1})
        self.assertLessEqual(report.maxDefect, 1e-12)

    def test_q_side_operator_gram(self):
        report = run_check("isometry", {"rep": "q", "L": 1})
        self.assertLessEqual(report.maxDefect, 1e-10)

    def test_discrete_l_side(self):
        report = run_check("discrete", {"rep": "l", "samples": 32})
        self.assertTrue(report.passed, report.maxDefect)
        self.assertLessEqual(report.maxDefect, 1e-12)
        self.assertAlmostEqual(abs(report.extra["innerProduct"]), 1.0, places=14)

    def test_discrete_orthogonal_pair(self):
        report = run_check(
            "discrete", {"rep": "l", "samples": 32, "f": parse_expansion("0,0"), "g": parse_expansion("1,0")}
        )
        self.assertEqual(report.extra["innerProduct"], 0)
        self.assertLessEqual(report.maxDefect, 1e-12)

    def test_discrete_q_side(self):
        report = run_check("discrete", {"rep": "q", "samples": 16})
        self.assertLessEqual(report.maxDefect, 1e-10)

    def test_generator_beyond_the_unit_band(self):
        psi = {"atoms": [{"interval": [0.5, 2.0], "fiber": {"kind": "line", "interval": [0, 1]}}]}
        with self.assertRaises(SupportViolation):
            run_check("discrete", {"rep": "l", "samples": 8, "function": psi})

    def test_fiber_keys_must_match_the_generator(self):
        params = DiscreteParamsSerializer(data={"generator": "DT", "f": [{"key": [0, 0]}]})
        self.assertFalse(params.is_valid())
        self.assertIn("f", params.errors)

    def test_bandlimited_pairs(self):
        report = run_check("bandlimited", {"k": 0})
        self.assertLessEqual(report.maxDefect, 1e-8)

    def test_kernel_case_one_at_minus_one(self):
        report = run_check("kernel", {"case": "I", "alpha": -1.0, "L": 0})
        self.assertTrue(report.passed, report.maxDefect)


class IntertwiningTests(SimpleTestCase):

    def test_case_one_at_minus_one(self):
        report = run_check("intertwine", {"case": "I", "alpha": -1.0, "elements": 5, "points": 16})
        self.assertLessEqual(report.maxDefect, 1e-13)

    def test_case_four(self):
        report = run_check("intertwine", {"case": "IV", "alpha": 0.7, "elements": 5, "points": 16})
        self.assertLessEqual(report.maxDefect, 1e-10)

    def test_l_to_q(self):
        report = run_check("intertwine", {"case": "LQ", "elements": 3, "points": 16})
        self.assertEqual(report.case, "LQ")
        self.assertIn("unitarity", report.extra)

    def test_charts(self):
        for prop in ("roundtrip", "jacobian", "invariance"):
            with self.subTest(prop=prop):
                report = run_check("charts", {"case": "II", "property": prop, "points": 20})
                self.assertTrue(report.passed, report.maxDefect)

    def test_group_laws(self):
        for raw in ({"case": "L"}, {"case": "Q"}, {"case": "I", "alpha": -0.5}, {"case": "III", "alpha": 0.7}):
            with self.subTest(**raw):
                report = run_check("groups", {**raw, "elements": 10})
                self.assertTrue(report.passed, report.extra)
        self.assertNotIn("lattice", run_check("groups", {"case": "Q", "elements": 2}).extra)


class SerializerTests(SimpleTestCase):

    def test_alpha_zero_for_case_one(self):
        params = IntertwineParamsSerializer(data={"case": "I", "alpha": 0})
        self.assertFalse(params.is_valid())
        self.assertIn("alpha=0 invalid for case I", " ".join(flatten_errors(params.errors)))

    def test_unknown_case(self):
        params = IntertwineParamsSerializer(data={"case": "V"})
        self.assertFalse(params.is_valid())
        self.assertIn("case", params.errors)

    def test_default_tolerances(self):
        params = IntertwineParamsSerializer(data={"case": "I", "alpha": -1})
        self.assertTrue(params.is_valid(), params.errors)
        self.assertEqual(params.validated_data["tol"], 1e-13)
        params = IntertwineParamsSerializer(data={"case": "II", "tol": 1e-6})
        self.assertTrue(params.is_valid(), params.errors)
        self.assertEqual(params.validated_data["tol"], 1e-6)

    def test_flatten_errors_paths(self):
        config = RunConfigSerializer(data={"cases": [{"case": "I", "alpha": 0}], "checks": []})
        self.assertFalse(config.is_valid())
        self.assertEqual(flatten_errors(config.errors), ["cases[0].alpha: alpha=0 invalid for case I"])

    def test_over_cases_expands_allowed_cases(self):
        config = RunConfigSerializer(data={
            "cases": [{"case": "I", "alpha": -0.5}, {"case": "L"}, {"case": "II"}],
            "samples": {"groups": 5},
            "checks": [{"check": "groups", "overCases": True}, {"check": "charts", "overCases": True}],
        })
        self.assertTrue(config.is_valid(), config.errors)
        runs = config.validated_data["runs"]
        self.assertEqual([name for name, _ in runs], ["groups", "groups", "groups", "charts", "charts"])
        self.assertEqual(runs[0][1]["elements"], 5)

    def test_unknown_check(self):
        config = RunConfigSerializer(data={"checks": [{"check": "proof"}]})
        self.assertFalse(config.is_valid())
        self.assertIn("checks[0].check: unknown check 'proof'", flatten_errors(config.errors))

    def test_generator_must_fit_the_case(self):
        params = CHECKS["kernel"][0](data={"case": "III", "alpha": 0.0, "generator": "DR"})
        self.assertFalse(params.is_valid())
        self.assertIn("generator", params.errors)


class ElementExpansionTests(SimpleTestCase):

    def test_coefficients_and_norm(self):
        f = ElementExpansion(((0, 0, 0.6), (0, 1, 0.8)))
        self.assertAlmostEqual(f.norm2(), 1.0, places=14)
        self.assertAlmostEqual(abs(f.coefficient(0, 1)), 0.8, places=14)
        self.assertEqual(f.outside(LatticeBox((0, 0), (0, 0))), [(0, 1)])


class ExecuteCheckTests(SimpleTestCase):

    def test_domain_errors_become_failed_reports(self):
        report = execute_check("parseval", {"function": wide_atom(), "k": [0, 0]}, SEED)
        self.assertFalse(report["pass"])
        self.assertEqual(report["maxDefect"], "inf")

    def test_workers_recorded(self):
        with override_settings(METALIFT_WORKERS=3):
            report = execute_check("groups", {"case": "II", "elements": 4}, SEED)
        self.assertEqual(report["workers"], 3)


class CommandLineTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def reports(self, directory=None):
        return [json.loads(p.read_text()) for p in sorted((directory or self.out).glob("*.json"))]

    def write(self, name, data):
        path = self.out / "inputs" / name
        path.parent.mkdir(exist_ok=True)
        path.write_text(json.dumps(data) if not isinstance(data, str) else data)
        return str(path)

    def test_gram_passes(self):
        code = run([
            "verify", "gram", "--rep", "l", "--generator", "DR", "--k", "-2..2", "--m", "-4..4", "--l", "-2..2",
            "--output-dir", str(self.out),
        ])
        self.assertEqual(code, EXIT_PASS)
        [report] = self.reports()
        self.assertTrue(report["pass"])
        self.assertLessEqual(report["maxDefect"], 1e-12)

    def test_intertwine_over_an_alpha_grid(self):
        code = run([
            "verify", "intertwine", "--case", "I", "--alpha", "-1,-0.5", "--elements", "4", "--points", "16",
            "--tol", "1e-10", "--output-dir", str(self.out),
        ])
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(sorted(r["case"] for r in self.reports()), ["I[alpha=-0.5]", "I[alpha=-1]"])

    def test_gram_tolerance_below_double_precision(self):
        code = run(["verify", "gram", "--rep", "l", "--generator", "DR", "--tol", "1e-20", "--output-dir", str(self.out)])
        self.assertEqual(code, EXIT_FAILED)
        [report] = self.reports()
        self.assertFalse(report["pass"])
        self.assertLessEqual(report["maxDefect"], 1e-12)
        self.assertEqual(report["resolution"], float(np.finfo(float).eps))

    def test_configured_alpha_grid(self):
        code = run(["verify", "groups", "--case", "III", "--alpha", "grid", "--elements", "3", "--output-dir", str(self.out)])
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(len(self.reports()), 3)
        self.assertEqual(run(["verify", "groups", "--case", "II", "--alpha", "grid"]), EXIT_CONFIG)

    def test_failed_check(self):
        code = run(["verify", "bandlimited", "--M", "1", "--output-dir", str(self.out)])
        self.assertEqual(code, EXIT_FAILED)
        [report] = self.reports()
        self.assertIn("TailBoundExceedsTol", report["notes"])

    def test_config_errors(self):
        self.assertEqual(run(["verify", "intertwine", "--case", "I", "--alpha", "0"]), EXIT_CONFIG)
        self.assertEqual(run(["verify", "gram", "--rep", "J", "--output-dir", str(self.out)]), EXIT_CONFIG)
        self.assertEqual(run(["prove"]), EXIT_CONFIG)
        self.assertEqual(run(["suite", self.write("broken.json", "{\"checks\": [")]), EXIT_CONFIG)
        self.assertEqual(run(["suite", self.write("bad.json", {"checks": [{"check": "proof"}]})]), EXIT_CONFIG)
        self.assertEqual(self.reports(), [])

    def test_reports_are_deterministic(self):
        argv = ["verify", "discrete", "--rep", "l", "--samples", "16", "--seed", "7"]
        first, second = self.out / "a", self.out / "b"
        self.assertEqual(run(argv + ["--output-dir", str(first)]), EXIT_PASS)
        self.assertEqual(run(argv + ["--output-dir", str(second)]), EXIT_PASS)
        [a], [b] = self.reports(first), self.reports(second)
        self.assertEqual(a["bodyHash"], b["bodyHash"])

    def test_suite(self):
        config = self.write("suite-config.json", {
            "seed": 11,
            "outputDir": str(self.out / "suite"),
            "cases": [{"case": "II"}, {"case": "IV", "alpha": 0.7}],
            "samples": {"groups": 4},
            "checks": [{"check": "groups", "overCases": True}, {"check": "parseval"}],
        })
        self.assertEqual(run(["suite", config]), EXIT_PASS)
        summary = json.loads((self.out / "suite" / "suite.json").read_text())
        self.assertTrue(summary["pass"])
        self.assertEqual(summary["checks"], 3)
        self.assertEqual(summary["seed"], 11)

    def coeffs(self, function, *extra):
        out = self.out / "coeffs.csv"
        code = run(["coeffs", "--function", self.write("f.json", function), "--out", str(out), *extra])
        lines = out.read_text().splitlines() if out.exists() else []
        rows = [line.split(",") for line in lines if not line.startswith("#")]
        return code, rows

    def test_coeffs_of_a_basis_element(self):
        code, rows = self.coeffs({"elements": [{"k": 1, "m": -3}]})
        self.assertEqual(code, EXIT_PASS)
        header, body, parseval = rows[0], rows[1:-1], rows[-1]
        self.assertEqual(header, ["k", "m", "coef_re", "coef_im"])
        self.assertEqual(len(body), 5 * 9)
        nonzero = [row for row in body if abs(complex(float(row[2]), float(row[3]))) > 1e-12]
        self.assertEqual(len(nonzero), 1)
        self.assertEqual(nonzero[0][:2], ["1", "-3"])
        self.assertAlmostEqual(float(nonzero[0][2]), 1.0, places=12)
        self.assertAlmostEqual(float(parseval[2]), 1.0, places=12)

    def test_coeffs_parseval_row(self):
        code, rows = self.coeffs({"elements": [{"k": 0, "m": 0, "coef_re": 0.6}, {"k": 0, "m": 1, "coef_re": 0.8}]})
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(rows[-1][0], "parseval")
        self.assertAlmostEqual(float(rows[-1][2]), 1.0, places=12)

    def test_coeffs_of_nothing(self):
        code, rows = self.coeffs({"atoms": []})
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(rows, [["k", "m", "coef_re", "coef_im"], ["parseval", "", "0.0", ""]])

    def test_coeffs_separable_system(self):
        code, rows = self.coeffs(
            {"atoms": [{"interval": [0, 1], "fiber": {"kind": "line", "interval": [0, 1]}}]},
            "--system", "S", "--k", "0..0", "--m", "0..0",
        )
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(rows[0], ["k", "m", "l", "coef_re", "coef_im"])
        self.assertEqual(rows[-1][0], "parseval")

    def test_coeffs_bad_function_file(self):
        code, rows = self.coeffs({"atoms": [{"interval": [2, 1], "fiber": {"kind": "line", "interval": [0, 1]}}]})
        self.assertEqual(code, EXIT_CONFIG)
        self.assertEqual(rows, [])


@override_settings(METALIFT_RECORD_RUNS=True)
class VerificationRunTests(TestCase):

    def test_task_records_the_run(self):
        from .tasks import run_check as run_check_task

        outcome = run_check_task.apply(args=("groups", {"case": "II", "elements": 4}, SEED, "abc")).get()
        self.assertTrue(outcome["success"])
        run = VerificationRun.objects.get(check_name="groups")
        self.assertEqual(run.status, "SUCCESS")
        self.assertTrue(run.passed)
        self.assertEqual(run.config_hash, "abc")
        self.assertEqual(run.body_hash, outcome["results"][0]["bodyHash"])

    def test_config_error_is_recorded(self):
        from .tasks import run_check as run_check_task

        outcome = run_check_task.apply(args=("groups", {"case": "V"}, SEED)).get()
        self.assertFalse(outcome["success"])
        self.assertTrue(outcome["config"])
        self.assertEqual(VerificationRun.objects.get().status, "FAILURE")
