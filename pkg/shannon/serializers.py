from rest_framework import serializers

from .bijections import DR, DT, TableBijection
from .exceptions import RangeError


class RangeField(serializers.ListField):
    """[lo, hi], inclusive integers."""

    def __init__(self, **kwargs):
        super().__init__(child=serializers.IntegerField(), min_length=2, max_length=2, **kwargs)

    def to_internal_value(self, data):
        lo, hi = super().to_internal_value(data)
        if lo > hi:
            raise serializers.ValidationError(f"range start {lo} exceeds end {hi}")
        return [lo, hi]


class BoxSerializer(serializers.Serializer):
    k = RangeField(required=False)
    l = RangeField()


class BijectionOverrideSerializer(serializers.Serializer):
    """
    {"base": "DR", "box": {"k": [-1, 1], "l": [0, 0]},
     "table": [[[-1, 0], 4], [[0, 0], 1], [[1, 0], 2]]}
    """
    base = serializers.ChoiceField(choices=["DR", "DT"], default="DR")
    box = BoxSerializer()
    table = serializers.ListField(child=serializers.ListField(min_length=2, max_length=2))

    def validate(self, attrs):
        base = attrs["base"]
        box = attrs["box"]
        if base == "DR" and "k" not in box:
            raise serializers.ValidationError({"box": "a DR override needs both k and l ranges"})
        if base == "DT" and "k" in box:
            raise serializers.ValidationError({"box": "a DT override takes only an l range"})
        arity = 2 if base == "DR" else 1
        table = {}
        for i, entry in enumerate(attrs["table"]):
            key, n = entry
            key = key if isinstance(key, list) else [key]
            if len(key) != arity or not all(isinstance(v, int) for v in key) or not isinstance(n, int):
                raise serializers.ValidationError({"table": f"entry {i} must be [[{'k, l' if arity == 2 else 'l'}], n] with integers"})
            if tuple(key) in table:
                raise serializers.ValidationError({"table": f"key {key} listed twice"})
            table[tuple(key)] = n
        ranges = (box["k"], box["l"]) if arity == 2 else (box["l"],)
        try:
            attrs["bijection"] = TableBijection(DR if arity == 2 else DT, ranges, table)
        except RangeError as e:
            raise serializers.ValidationError({"table": str(e)})
        return attrs

    def to_bijection(self) -> TableBijection:
        return self.validated_data["bijection"]
