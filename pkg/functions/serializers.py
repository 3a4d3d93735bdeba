import math

from rest_framework import serializers

from .atoms import AtomSum, FiberFactor, FiberKind, RadialFactor, TensorAtom


class FiberSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=[k.value for k in FiberKind])
    interval = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=2, required=False
    )
    freq = serializers.FloatField(default=0.0)

    def validate(self, attrs):
        kind = attrs["kind"]
        interval = attrs.get("interval")
        if kind == FiberKind.LINE.value:
            if interval is None:
                raise serializers.ValidationError({"interval": "line fibers need an interval [c, d]"})
            if not interval[0] < interval[1]:
                raise serializers.ValidationError({"interval": "c must be smaller than d"})
        else:
            if interval is not None:
                raise serializers.ValidationError({"interval": "circle fibers take no interval"})
            if not float(attrs["freq"]).is_integer():
                raise serializers.ValidationError({"freq": "circle frequencies must be integers"})
        return attrs


class AtomSerializer(serializers.Serializer):
    """
    One tensor atom in the function interchange format.
    interval [a, b] is the half-open (a, b]; b = null means +infinity.
    """
    coeff_re = serializers.FloatField(default=1.0)
    coeff_im = serializers.FloatField(default=0.0)
    power = serializers.FloatField(default=0.0)
    interval = serializers.ListField(
        child=serializers.FloatField(allow_null=True), min_length=2, max_length=2
    )
    lin_phase = serializers.FloatField(default=0.0)
    quad_phase = serializers.FloatField(default=0.0)
    fiber = FiberSerializer()

    def validate(self, attrs):
        a, b = attrs["interval"]
        if a is None or a < 0:
            raise serializers.ValidationError({"interval": "a must be a number >= 0"})
        if b is not None and not a < b:
            raise serializers.ValidationError({"interval": "a must be smaller than b"})
        if b is None and not attrs["power"] < -0.5:
            raise serializers.ValidationError({"interval": "b = infinity needs power < -1/2"})
        return attrs

    def to_atom(self) -> TensorAtom:
        return atom_from_data(self.validated_data)


def atom_from_data(data) -> TensorAtom:
    a, b = data["interval"]
    fiber = data["fiber"]
    kind = FiberKind(fiber["kind"])
    if kind is FiberKind.LINE:
        c, d = fiber["interval"]
        fiber_factor = FiberFactor(freq=fiber.get("freq", 0.0), c=c, d=d)
    else:
        fiber_factor = FiberFactor(freq=float(fiber.get("freq", 0.0)))
    return TensorAtom(
        coeff=complex(data.get("coeff_re", 1.0), data.get("coeff_im", 0.0)),
        radial=RadialFactor(
            power=data.get("power", 0.0),
            a=a,
            b=math.inf if b is None else b,
            lin_phase=data.get("lin_phase", 0.0),
            quad_phase=data.get("quad_phase", 0.0),
        ),
        fiber=fiber_factor,
        domain=kind,
    )


def atom_to_data(atom: TensorAtom) -> dict:
    fiber = {"kind": atom.domain.value, "freq": atom.fiber.freq}
    if atom.domain is FiberKind.LINE:
        fiber["interval"] = [atom.fiber.c, atom.fiber.d]
    b = atom.radial.b
    return {
        "coeff_re": atom.coeff.real,
        "coeff_im": atom.coeff.imag,
        "power": atom.radial.power,
        "interval": [atom.radial.a, None if math.isinf(b) else b],
        "lin_phase": atom.radial.lin_phase,
        "quad_phase": atom.radial.quad_phase,
        "fiber": fiber,
    }


class AtomSumSerializer(serializers.Serializer):
    schemaVersion = serializers.IntegerField(default=1, min_value=1, max_value=1)
    atoms = AtomSerializer(many=True)

    def validate_atoms(self, value):
        kinds = {a["fiber"]["kind"] for a in value}
        if len(kinds) > 1:
            raise serializers.ValidationError("all atoms must share one fiber kind")
        return value

    def to_sum(self) -> AtomSum:
        atoms = [atom_from_data(a) for a in self.validated_data["atoms"]]
        kind = atoms[0].domain if atoms else FiberKind.LINE
        return AtomSum(tuple(atoms), kind)
