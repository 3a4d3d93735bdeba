"""
Verification reports and their JSON form.

A report body is everything except the runtime fields; bodyHash is the
SHA-256 of the canonical body, so two runs with the same config, seed and
worker count produce the same hash.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

from django.conf import settings

RUNTIME_FIELDS = ("runtimeSeconds", "bodyHash")


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, complex):
        return [_clean(value.real), _clean(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def canonical_json(data) -> str:
    return json.dumps(_clean(data), sort_keys=True, separators=(",", ":"))


def body_hash(data: dict) -> str:
    body = {k: v for k, v in data.items() if k not in RUNTIME_FIELDS}
    return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()


@dataclass
class VerificationReport:
    check: str
    case: str
    params: dict
    maxDefect: float
    tolerance: float
    samples: int
    notes: str = ""
    runtimeSeconds: float = 0.0
    configHash: str = ""
    workers: int = 1
    resolution: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Within tolerance, and the tolerance is not finer than the check can resolve."""
        return bool(
            math.isfinite(self.maxDefect)
            and self.maxDefect <= self.tolerance
            and self.tolerance >= self.resolution
        )

    def as_dict(self) -> dict:
        data = asdict(self)
        extra = data.pop("extra")
        data["schemaVersion"] = settings.METALIFT["SCHEMA_VERSION"]
        data["pass"] = self.passed
        data["maxDefect"] = float(self.maxDefect)
        data["tolerance"] = float(self.tolerance)
        if extra:
            data["details"] = extra
        data = _clean(data)
        data["bodyHash"] = body_hash(data)
        return data

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)

    @classmethod
    def failed(cls, check: str, case: str, params: dict, tolerance: float, error: Exception) -> "VerificationReport":
        """A report for a check that raised; its defect is infinite."""
        return cls(
            check=check,
            case=case,
            params=params,
            maxDefect=math.inf,
            tolerance=tolerance,
            samples=0,
            notes=f"{type(error).__name__}: {error}",
        )
