"""
Pointwise-evaluable functions with a declared support box.

PointEvaluator is the carrier for everything that leaves the atom algebra:
warped functions on the case I-IV sides, chart pullbacks and demoted atom
sums. Rules are vectorized callables (x1, x2) -> complex ndarray and must be
pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .atoms import AtomSum, FiberKind


class Domain(str, enum.Enum):
    HALF_PLANE = "half_plane"   # (r, y) with r > 0
    PLANE = "plane"             # Cartesian (x1, x2)
    POLAR = "polar"             # (r, theta), theta in [0, 1)
    HYPERBOLIC = "hyperbolic"   # (r, theta), cone x1 > |x2|


@dataclass(frozen=True)
class SupportBox:
    x1: tuple
    x2: tuple

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(v) for v in (*self.x1, *self.x2))

    def intersect(self, other: "SupportBox") -> "SupportBox | None":
        lo1, hi1 = max(self.x1[0], other.x1[0]), min(self.x1[1], other.x1[1])
        lo2, hi2 = max(self.x2[0], other.x2[0]), min(self.x2[1], other.x2[1])
        if lo1 >= hi1 or lo2 >= hi2:
            return None
        return SupportBox((lo1, hi1), (lo2, hi2))

    def contains(self, x1, x2):
        x1, x2 = np.asarray(x1), np.asarray(x2)
        return (x1 >= self.x1[0]) & (x1 <= self.x1[1]) & (x2 >= self.x2[0]) & (x2 <= self.x2[1])


@dataclass(frozen=True)
class PointEvaluator:
    domain: Domain
    rule: Callable
    support: SupportBox
    fiber: FiberKind = FiberKind.LINE
    breaks: tuple = ((), ())
    freq_hint: tuple = (0.0, 0.0)
    label: str = ""

    def __call__(self, x1, x2):
        x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        if self.fiber is FiberKind.CIRCLE:
            x2 = np.mod(x2, 1.0)
        return np.asarray(self.rule(x1, x2), dtype=complex)

    def at(self, point) -> complex:
        return complex(self(np.array([point[0]]), np.array([point[1]]))[0])

    def with_rule(self, rule, **changes) -> "PointEvaluator":
        values = dict(
            domain=self.domain,
            rule=rule,
            support=self.support,
            fiber=self.fiber,
            breaks=self.breaks,
            freq_hint=self.freq_hint,
            label=self.label,
        )
        values.update(changes)
        return PointEvaluator(**values)


def demote(f: AtomSum, label: str = "") -> PointEvaluator:
    """Exact evaluator for an atom sum, with its interval endpoints as breaks."""
    if len(f) == 0:
        return PointEvaluator(
            domain=Domain.HALF_PLANE,
            rule=lambda x1, x2: np.zeros(np.shape(x1), dtype=complex),
            support=SupportBox((0.0, 1.0), (0.0, 1.0)),
            fiber=f.domain,
            label=label or "zero",
        )
    r_lo = min(a.radial.a for a in f)
    r_hi = max(a.radial.b for a in f)
    r_breaks = sorted({a.radial.a for a in f} | {a.radial.b for a in f if math.isfinite(a.radial.b)})
    if f.domain is FiberKind.CIRCLE:
        y_box, y_breaks = (0.0, 1.0), ()
    else:
        y_box = (min(a.fiber.c for a in f), max(a.fiber.d for a in f))
        y_breaks = tuple(sorted({a.fiber.c for a in f} | {a.fiber.d for a in f}))
    hint = (
        max(a.radial.max_frequency for a in f),
        max(abs(a.fiber.freq) for a in f),
    )
    return PointEvaluator(
        domain=Domain.HALF_PLANE,
        rule=f,
        support=SupportBox((r_lo, r_hi), y_box),
        fiber=f.domain,
        breaks=(tuple(r_breaks), y_breaks),
        freq_hint=hint,
        label=label,
    )


def bump(domain: Domain, centre, width, freq=(0.0, 0.0), label: str = "") -> PointEvaluator:
    """
    (1 - s1^2)^4 (1 - s2^2)^4 exp(2 pi i (freq1 x1 + freq2 x2)) with
    s = (x - centre) / width, supported on the box centre +- width.
    """
    (c1, c2), (w1, w2) = centre, width
    f1, f2 = freq

    def rule(x1, x2):
        s1 = (x1 - c1) / w1
        s2 = (x2 - c2) / w2
        inside = (np.abs(s1) < 1.0) & (np.abs(s2) < 1.0)
        profile = np.where(inside, (1.0 - s1 * s1) ** 4 * (1.0 - s2 * s2) ** 4, 0.0)
        return profile * np.exp(2j * np.pi * (f1 * x1 + f2 * x2))

    box = SupportBox((c1 - w1, c1 + w1), (c2 - w2, c2 + w2))
    return PointEvaluator(
        domain=domain,
        rule=rule,
        support=box,
        breaks=(box.x1, box.x2),
        freq_hint=(abs(f1) + 1.0 / w1, abs(f2) + 1.0 / w2),
        label=label or f"bump{tuple(centre)}",
    )
