"""
Validation for check parameters, function files and run configs.

Every check takes a flat JSON object of parameters; its serializer turns
that into the typed arguments the check expects (lifts, boxes, cases,
atom sums) with the defaults a bare `verify <check>` uses.
"""

import math

from django.conf import settings
from rest_framework import serializers

from functions.atoms import AtomSum, FiberKind, circle_atom, line_atom
from functions.serializers import AtomSumSerializer
from groups.cases import CaseKind, CaseTag
from shannon.bijections import DR, DT
from shannon.lifts import LazyShannonLift
from shannon.serializers import BijectionOverrideSerializer, RangeField

from .exceptions import ConfigError
from .intertwining import CHART_PROPERTIES
from .systems import ElementExpansion, LatticeBox, chart_case_for

CASE_CHOICES = ["L", "Q", "LQ", "I", "II", "III", "IV"]


def tolerance(name: str) -> float:
    return settings.METALIFT[name]


def flatten_errors(detail, prefix: str = ""):
    """DRF error detail -> ["path.to.field: message", ...]."""
    if isinstance(detail, dict):
        out = []
        for key, value in detail.items():
            if key == "non_field_errors":
                out.extend(flatten_errors(value, prefix))
            else:
                out.extend(flatten_errors(value, f"{prefix}.{key}" if prefix else str(key)))
        return out
    if isinstance(detail, list):
        if all(isinstance(v, (str, serializers.ErrorDetail)) for v in detail):
            return [f"{prefix}: {v}" if prefix else str(v) for v in detail]
        out = []
        for i, value in enumerate(detail):
            if value:
                out.extend(flatten_errors(value, f"{prefix}[{i}]"))
        return out
    return [f"{prefix}: {detail}" if prefix else str(detail)]


def case_from_data(kind: str, alpha):
    if kind == "LQ":
        kind = "L"
    try:
        return CaseTag(kind, alpha)
    except ValueError as e:
        raise serializers.ValidationError({"alpha": str(e)})


class CaseSerializer(serializers.Serializer):
    case = serializers.ChoiceField(choices=CASE_CHOICES)
    alpha = serializers.FloatField(required=False, allow_null=True)

    def validate(self, attrs):
        attrs["tag"] = case_from_data(attrs["case"], attrs.get("alpha"))
        return attrs


# ----------------------------------------------------------------------
# Function inputs
# ----------------------------------------------------------------------

class ElementSerializer(serializers.Serializer):
    k = serializers.IntegerField()
    m = serializers.IntegerField()
    coef_re = serializers.FloatField(default=1.0)
    coef_im = serializers.FloatField(default=0.0)


class FunctionSpecSerializer(serializers.Serializer):
    """
    A function file: either {"atoms": [...]} (an atom sum) or
    {"elements": [{"k", "m", "coef_re", "coef_im"}]} (a finite combination
    of lattice elements of the lift).
    """
    schemaVersion = serializers.IntegerField(default=1, min_value=1, max_value=1)
    atoms = serializers.ListField(child=serializers.DictField(), required=False)
    elements = ElementSerializer(many=True, required=False)

    def validate(self, attrs):
        if ("atoms" in attrs) == ("elements" in attrs):
            raise serializers.ValidationError("give exactly one of atoms or elements")
        if "atoms" in attrs:
            inner = AtomSumSerializer(data={"schemaVersion": attrs["schemaVersion"], "atoms": attrs["atoms"]})
            if not inner.is_valid():
                raise serializers.ValidationError(inner.errors)
            attrs["function"] = inner.to_sum()
        else:
            attrs["function"] = ElementExpansion(
                tuple((e["k"], e["m"], complex(e["coef_re"], e["coef_im"])) for e in attrs["elements"])
            )
        return attrs

    def to_function(self):
        return self.validated_data["function"]


class FiberTermSerializer(serializers.Serializer):
    key = serializers.ListField(child=serializers.IntegerField(), min_length=1, max_length=2)
    coef_re = serializers.FloatField(default=1.0)
    coef_im = serializers.FloatField(default=0.0)


def expansion_from_data(terms) -> dict:
    out = {}
    for term in terms:
        key = tuple(term["key"])
        out[key] = out.get(key, 0j) + complex(term["coef_re"], term["coef_im"])
    return out


def unit_atom(fiber: FiberKind) -> AtomSum:
    """sqrt(2) f_1 tensor e_00 (e_0 on the circle): unit norm, one band."""
    if fiber is FiberKind.LINE:
        return AtomSum((line_atom(math.sqrt(2.0), 0.5, 1.0, 0, 1),), fiber)
    return AtomSum((circle_atom(math.sqrt(2.0), 0.5, 1.0),), fiber)


def indicator(a: float, b: float) -> AtomSum:
    return AtomSum((circle_atom(1.0, a, b),), FiberKind.CIRCLE)


# ----------------------------------------------------------------------
# Check parameters
# ----------------------------------------------------------------------

class CheckParamsSerializer(serializers.Serializer):
    """Shared fields: tolerance, and case/generator when a check uses them."""
    tol = serializers.FloatField(required=False, min_value=0.0)

    def default_tol(self, attrs) -> float:
        return tolerance("EXACT_TOL")

    def resolve(self, attrs) -> dict:
        return attrs

    def validate(self, attrs):
        attrs = self.resolve(attrs)
        if attrs.get("tol") is None:
            attrs["tol"] = self.default_tol(attrs)
        return attrs

    def to_params(self) -> dict:
        return dict(self.validated_data)


class LiftMixin(serializers.Serializer):
    generator = serializers.ChoiceField(choices=["DR", "DT"], required=False)
    override = BijectionOverrideSerializer(required=False)

    def build_lift(self, attrs, case: CaseTag | None = None) -> LazyShannonLift:
        override = attrs.get("override")
        name = attrs.get("generator")
        if name is None:
            name = override["base"] if override else ("DT" if case is not None and case.kind is CaseKind.III else "DR")
        if override is not None:
            if override["base"] != name:
                raise serializers.ValidationError({"override": f"override base {override['base']} does not match generator {name}"})
            bijection = override["bijection"]
        else:
            bijection = DR if name == "DR" else DT
        attrs["generator"] = name
        return LazyShannonLift(bijection, FiberKind.LINE if name == "DR" else FiberKind.CIRCLE)

    def match_case(self, lift: LazyShannonLift, case: CaseTag) -> CaseTag:
        try:
            return chart_case_for(lift, case)
        except ConfigError as e:
            raise serializers.ValidationError({"generator": str(e)})


class CaseMixin(serializers.Serializer):
    case = serializers.ChoiceField(choices=CASE_CHOICES, required=False)
    alpha = serializers.FloatField(required=False, allow_null=True)

    allowed_cases = ("I", "II", "III", "IV")

    def build_case(self, attrs, required=True):
        kind = attrs.get("case")
        if kind is None:
            if required:
                raise serializers.ValidationError({"case": "this check needs a case"})
            return None
        if kind not in self.allowed_cases:
            raise serializers.ValidationError({"case": f"{kind} is not supported here (use one of {', '.join(self.allowed_cases)})"})
        return case_from_data(kind, attrs.get("alpha"))


def function_from(data, field: str):
    spec = FunctionSpecSerializer(data=data)
    if not spec.is_valid():
        raise serializers.ValidationError({field: spec.errors})
    return spec.to_function()


class GramParamsSerializer(LiftMixin, CaseMixin, CheckParamsSerializer):
    rep = serializers.ChoiceField(choices=["l", "q", "J"], default="l")
    k = RangeField(default=[-2, 2])
    m = RangeField(default=[-4, 4])
    l = RangeField(default=[-2, 2])
    spotChecks = serializers.IntegerField(default=10, min_value=0)
    spotTol = serializers.FloatField(default=1e-8, min_value=0.0)

    def default_tol(self, attrs):
        return 1e-10 if attrs["rep"] == "J" else tolerance("EXACT_TOL")

    def resolve(self, attrs):
        case = self.build_case(attrs, required=attrs["rep"] == "J")
        lift = self.build_lift(attrs, case)
        if case is not None:
            attrs["case"] = self.match_case(lift, case)
        attrs["lift"] = lift
        lo, hi = attrs["l"]
        if lo != -hi:
            raise serializers.ValidationError({"l": "the fiber box of S_N is symmetric, e.g. -2..2"})
        attrs["box"] = LatticeBox(tuple(attrs["k"]), tuple(attrs["m"]), hi)
        return attrs


class ParsevalParamsSerializer(LiftMixin, CheckParamsSerializer):
    rep = serializers.ChoiceField(choices=["l", "q"], default="l")
    k = RangeField(default=[-2, 2])
    m = RangeField(required=False)
    function = serializers.DictField(required=False)
    allowPartial = serializers.BooleanField(default=False)

    def resolve(self, attrs):
        lift = self.build_lift(attrs)
        attrs["lift"] = lift
        attrs["box"] = LatticeBox(tuple(attrs["k"]), tuple(attrs["m"]) if attrs.get("m") else None)
        data = attrs.get("function")
        attrs["function"] = unit_atom(lift.fiber) if data is None else function_from(data, "function")
        return attrs


class IsometryParamsSerializer(LiftMixin, CheckParamsSerializer):
    rep = serializers.ChoiceField(choices=["l", "q"], default="l")
    L = serializers.IntegerField(default=3, min_value=0)
    function = serializers.DictField(required=False)

    def resolve(self, attrs):
        attrs["lift"] = self.build_lift(attrs)
        if attrs.get("function") is not None:
            psi = function_from(attrs["function"], "function")
            if not isinstance(psi, AtomSum):
                raise serializers.ValidationError({"function": "a generator must be given as atoms"})
            attrs["function"] = psi
        return attrs


class DiscreteParamsSerializer(LiftMixin, CaseMixin, CheckParamsSerializer):
    rep = serializers.ChoiceField(choices=["l", "q", "J"], default="l")
    samples = serializers.IntegerField(default=256, min_value=1)
    kRange = RangeField(required=False)
    f = FiberTermSerializer(many=True, required=False)
    g = FiberTermSerializer(many=True, required=False)
    function = serializers.DictField(required=False)

    def default_tol(self, attrs):
        return {"l": tolerance("EXACT_TOL"), "q": 1e-10, "J": tolerance("QUADRATURE_TOL")}[attrs["rep"]]

    def resolve(self, attrs):
        case = self.build_case(attrs, required=attrs["rep"] == "J")
        lift = self.build_lift(attrs, case)
        attrs["case"] = self.match_case(lift, case) if case is not None else None
        attrs["lift"] = lift
        unit = (0, 0) if lift.fiber is FiberKind.LINE else (0,)
        for name in ("f", "g"):
            terms = attrs.get(name)
            attrs[name] = expansion_from_data(terms) if terms is not None else {unit: 1.0}
            if any(len(key) != len(unit) for key in attrs[name]):
                raise serializers.ValidationError({name: f"keys must have {len(unit)} entries on the {lift.fiber.value} fiber"})
        if attrs.get("kRange") is not None:
            attrs["kRange"] = tuple(attrs["kRange"])
        if attrs.get("function") is not None:
            attrs["function"] = function_from(attrs["function"], "function")
        return attrs


class KernelParamsSerializer(LiftMixin, CaseMixin, CheckParamsSerializer):
    L = serializers.IntegerField(default=1, min_value=0)

    def default_tol(self, attrs):
        case = attrs["case"]
        if case.kind is CaseKind.I and case.alpha == -1.0:
            return tolerance("EXACT_TOL")
        return tolerance("QUADRATURE_TOL")

    def resolve(self, attrs):
        case = self.build_case(attrs)
        lift = self.build_lift(attrs, case)
        attrs["case"] = self.match_case(lift, case)
        attrs["lift"] = lift
        return attrs


class PairSerializer(serializers.Serializer):
    f = serializers.DictField()
    g = serializers.DictField()
    k = serializers.IntegerField()

    def validate(self, attrs):
        for name in ("f", "g"):
            value = function_from(attrs[name], name)
            if not isinstance(value, AtomSum):
                raise serializers.ValidationError({name: "band-limited pairs are given as atoms"})
            attrs[name] = value
        return attrs


class BandlimitedParamsSerializer(CheckParamsSerializer):
    k = serializers.IntegerField(default=0)
    M = serializers.IntegerField(default=2 ** 14, min_value=1)
    pairs = PairSerializer(many=True, required=False)

    def default_tol(self, attrs):
        return tolerance("QUADRATURE_TOL")

    def resolve(self, attrs):
        if not attrs.get("pairs"):
            k = attrs["k"]
            attrs["pairs"] = [
                {"f": indicator(0.0, 2.0 ** -k), "g": indicator(0.0, 2.0 ** -k), "k": k},
                {"f": indicator(0.0, 2.0 ** (-k - 1)), "g": indicator(0.0, 2.0 ** -k), "k": k},
                {"f": indicator(0.0, 2.0 ** (-k - 2)), "g": indicator(0.0, 2.0 ** (-k - 1)), "k": k + 1},
            ]
        return attrs


class IntertwineParamsSerializer(CaseMixin, CheckParamsSerializer):
    elements = serializers.IntegerField(default=20, min_value=1)
    points = serializers.IntegerField(default=64, min_value=1)

    allowed_cases = ("LQ", "L", "I", "II", "III", "IV")

    def default_tol(self, attrs):
        case = attrs["case"]
        if case.kind is CaseKind.I and case.alpha == -1.0:
            return 1e-13
        return 1e-10

    def resolve(self, attrs):
        attrs["case"] = self.build_case(attrs)
        return attrs


class ChartParamsSerializer(CaseMixin, CheckParamsSerializer):
    property = serializers.ChoiceField(choices=list(CHART_PROPERTIES), default="roundtrip")
    points = serializers.IntegerField(required=False, min_value=1)
    step = serializers.FloatField(required=False, min_value=0.0)

    DEFAULTS = {"roundtrip": (500, 1e-14), "jacobian": (100, 1e-6), "invariance": (200, 1e-12)}

    def default_tol(self, attrs):
        return self.DEFAULTS[attrs["property"]][1]

    def resolve(self, attrs):
        attrs["case"] = self.build_case(attrs)
        if attrs.get("points") is None:
            attrs["points"] = self.DEFAULTS[attrs["property"]][0]
        if attrs.get("step") is None:
            attrs["step"] = tolerance("FD_STEP")
        return attrs


class GroupParamsSerializer(CaseMixin, CheckParamsSerializer):
    elements = serializers.IntegerField(default=20, min_value=1)

    allowed_cases = ("L", "Q", "I", "II", "III", "IV")

    def default_tol(self, attrs):
        return tolerance("QUADRATURE_TOL")

    def resolve(self, attrs):
        attrs["case"] = self.build_case(attrs)
        return attrs


class WindowSerializer(serializers.Serializer):
    U = serializers.FloatField(min_value=0.0)
    s = serializers.ListField(child=serializers.FloatField(min_value=0.0), min_length=2, max_length=2)

    def validate(self, attrs):
        if not 0.0 < attrs["s"][0] < attrs["s"][1]:
            raise serializers.ValidationError({"s": "need 0 < s_min < s_max"})
        return attrs


class CoeffsParamsSerializer(LiftMixin, serializers.Serializer):
    system = serializers.ChoiceField(choices=["l", "q", "S"], default="l")
    k = RangeField(default=[-2, 2])
    m = RangeField(default=[-4, 4])
    l = RangeField(default=[0, 0])
    function = serializers.DictField()
    tol = serializers.FloatField(default=1e-12, min_value=0.0)

    def validate(self, attrs):
        attrs["lift"] = None if attrs["system"] == "S" else self.build_lift(attrs)
        attrs["box"] = LatticeBox(tuple(attrs["k"]), tuple(attrs["m"]))
        attrs["function"] = function_from(attrs["function"], "function")
        return attrs


class ReproducingParamsSerializer(LiftMixin, CheckParamsSerializer):
    function = serializers.DictField(required=False)
    windows = WindowSerializer(many=True, required=False)

    def default_tol(self, attrs):
        return 1e-10

    def resolve(self, attrs):
        lift = self.build_lift(attrs)
        attrs["lift"] = lift
        data = attrs.get("function")
        f = unit_atom(lift.fiber) if data is None else function_from(data, "function")
        if not isinstance(f, AtomSum):
            raise serializers.ValidationError({"function": "the direct mode takes atoms"})
        attrs["function"] = f
        windows = attrs.get("windows") or [{"U": 4.0, "s": [0.25, 4.0]}, {"U": 16.0, "s": [1 / 16, 16.0]}, {"U": 64.0, "s": [1 / 64, 64.0]}]
        attrs["windows"] = [(w["U"], w["s"][0], w["s"][1]) for w in windows]
        return attrs


# ----------------------------------------------------------------------
# Run configs
# ----------------------------------------------------------------------

class CheckEntrySerializer(serializers.Serializer):
    check = serializers.CharField()
    params = serializers.DictField(default=dict)
    overCases = serializers.BooleanField(default=False)


class RunConfigSerializer(serializers.Serializer):
    """
    {"schemaVersion": 1, "seed": 20240601, "outputDir": "reports",
     "cases": [{"case": "I", "alpha": -0.5}, ...],
     "tolerances": {"gram": 1e-12}, "samples": {"discrete": 256},
     "checks": [{"check": "gram", "params": {...}},
                {"check": "intertwine", "overCases": true}]}
    """
    schemaVersion = serializers.IntegerField(default=1, min_value=1, max_value=1)
    seed = serializers.IntegerField(required=False, min_value=0)
    outputDir = serializers.CharField(required=False)
    cases = CaseSerializer(many=True, required=False)
    tolerances = serializers.DictField(child=serializers.FloatField(min_value=0.0), default=dict)
    samples = serializers.DictField(child=serializers.IntegerField(min_value=1), default=dict)
    checks = CheckEntrySerializer(many=True)

    SAMPLE_FIELDS = {
        "discrete": "samples",
        "intertwine": "points",
        "charts": "points",
        "groups": "elements",
    }

    def validate(self, attrs):
        from .registry import CHECKS

        cases = attrs.get("cases") or []
        runs, errors = [], {}
        for i, entry in enumerate(attrs["checks"]):
            name = entry["check"]
            if name not in CHECKS:
                errors[f"checks[{i}].check"] = f"unknown check {name!r}"
                continue
            serializer_class = CHECKS[name][0]
            base = dict(entry["params"])
            if name in attrs["tolerances"]:
                base.setdefault("tol", attrs["tolerances"][name])
            if name in attrs["samples"] and name in self.SAMPLE_FIELDS:
                base.setdefault(self.SAMPLE_FIELDS[name], attrs["samples"][name])
            variants = [base]
            if entry["overCases"]:
                allowed = getattr(serializer_class, "allowed_cases", ())
                variants = [
                    {**base, "case": c["case"], "alpha": c.get("alpha")}
                    for c in cases
                    if c["case"] in allowed
                ]
            for raw in variants:
                check = serializer_class(data=raw)
                if not check.is_valid():
                    errors[f"checks[{i}].params"] = check.errors
                    break
                runs.append((name, raw))
        if errors:
            raise serializers.ValidationError(errors)
        attrs["runs"] = runs
        return attrs
