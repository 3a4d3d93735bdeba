"""
Coordinate charts that remove the dilation flow from the second coordinate.

    I    y1 = x1,  y2 = x1**(-beta) x2,            beta = (alpha + 1) / alpha
    II   y1 = x1,  y2 = (x2 - x1 log x1) / x1
    III  r' = r,   theta' = theta - alpha log r    (polar, theta mod 1)
    IV   r' = r,   theta' = theta - alpha log r    (hyperbolic polar)

Vectorized *_arrays methods do no domain checking; the point methods raise
DomainError.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from functions.atoms import FiberKind
from functions.evaluators import Domain
from groups.cases import CaseKind, CaseTag

from .exceptions import DomainError


class PolarKind(str, enum.Enum):
    STANDARD = "standard"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class PolarChart:
    """
    (r, theta) -> (r cos 2 pi theta, r sin 2 pi theta) with theta in [0, 1), or
    (r, theta) -> (r cosh theta, r sinh theta) onto the cone x1 > |x2|.
    """
    kind: PolarKind

    @property
    def area_factor(self) -> float:
        """dx1 dx2 = area_factor * r dr dtheta."""
        return 2.0 * math.pi if self.kind is PolarKind.STANDARD else 1.0

    @property
    def domain(self) -> Domain:
        return Domain.POLAR if self.kind is PolarKind.STANDARD else Domain.HYPERBOLIC

    def to_cartesian(self, r, theta):
        r, theta = np.asarray(r, dtype=float), np.asarray(theta, dtype=float)
        if self.kind is PolarKind.STANDARD:
            angle = 2.0 * np.pi * theta
            return r * np.cos(angle), r * np.sin(angle)
        return r * np.cosh(theta), r * np.sinh(theta)

    def from_cartesian(self, x1, x2):
        """Inverse of to_cartesian; nan outside the cone for the hyperbolic chart."""
        x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
        if self.kind is PolarKind.STANDARD:
            r = np.hypot(x1, x2)
            theta = np.mod(np.arctan2(x2, x1) / (2.0 * np.pi), 1.0)
            return r, theta
        inside = x1 > np.abs(x2)
        safe1 = np.where(inside, x1, 1.0)
        safe2 = np.where(inside, x2, 0.0)
        r = np.sqrt((safe1 - safe2) * (safe1 + safe2))
        theta = np.arctanh(safe2 / safe1)
        return np.where(inside, r, np.nan), np.where(inside, theta, np.nan)

    def from_point(self, point):
        x1, x2 = float(point[0]), float(point[1])
        if self.kind is PolarKind.STANDARD and x1 == 0.0 and x2 == 0.0:
            raise DomainError("the origin has no polar angle")
        if self.kind is PolarKind.HYPERBOLIC and not x1 > abs(x2):
            raise DomainError(f"({x1}, {x2}) lies outside the cone x1 > |x2|")
        r, theta = self.from_cartesian(x1, x2)
        return float(r), float(theta)


STANDARD_POLAR = PolarChart(PolarKind.STANDARD)
HYPERBOLIC_POLAR = PolarChart(PolarKind.HYPERBOLIC)


@dataclass(frozen=True)
class CoordChart:
    case: CaseTag

    def __post_init__(self):
        if self.case.kind not in (CaseKind.I, CaseKind.II, CaseKind.III, CaseKind.IV):
            raise ValueError(f"{self.case.label} has no coordinate chart")

    @property
    def kind(self) -> CaseKind:
        return self.case.kind

    @property
    def beta(self) -> float:
        return (self.case.alpha + 1.0) / self.case.alpha

    @property
    def weight_exponent(self) -> float:
        """Exponent e in U^J f = y1**e f_c; reciprocal weight on the way back."""
        if self.kind is CaseKind.I:
            return self.beta / 2.0
        return 0.5

    @property
    def polar(self) -> PolarChart | None:
        if self.kind is CaseKind.III:
            return STANDARD_POLAR
        if self.kind is CaseKind.IV:
            return HYPERBOLIC_POLAR
        return None

    @property
    def fiber(self) -> FiberKind:
        return FiberKind.CIRCLE if self.kind is CaseKind.III else FiberKind.LINE

    @property
    def source_domain(self) -> Domain:
        polar = self.polar
        return Domain.HALF_PLANE if polar is None else polar.domain

    def forward_arrays(self, p1, p2):
        p1, p2 = np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)
        if self.kind is CaseKind.I:
            return p1, p1 ** (-self.beta) * p2
        if self.kind is CaseKind.II:
            return p1, (p2 - p1 * np.log(p1)) / p1
        theta = p2 - self.case.alpha * np.log(p1)
        if self.kind is CaseKind.III:
            theta = np.mod(theta, 1.0)
        return p1, theta

    def backward_arrays(self, q1, q2, reduce=True):
        q1, q2 = np.asarray(q1, dtype=float), np.asarray(q2, dtype=float)
        if self.kind is CaseKind.I:
            return q1, q1 ** self.beta * q2
        if self.kind is CaseKind.II:
            return q1, q1 * q2 + q1 * np.log(q1)
        theta = q2 + self.case.alpha * np.log(q1)
        if self.kind is CaseKind.III and reduce:
            theta = np.mod(theta, 1.0)
        return q1, theta

    def jacobian_arrays(self, q1, q2):
        q1 = np.asarray(q1, dtype=float)
        if self.kind is CaseKind.I:
            return q1 ** self.beta + 0.0 * np.asarray(q2)
        if self.kind is CaseKind.II:
            return q1 + 0.0 * np.asarray(q2)
        return np.ones(np.broadcast(q1, np.asarray(q2)).shape)

    def _require(self, first: float):
        if not (math.isfinite(first) and first > 0.0):
            name = "x1" if self.polar is None else "r"
            raise DomainError(f"{self.case.label} chart needs {name} > 0, got {first}")

    def forward(self, point):
        p1, p2 = float(point[0]), float(point[1])
        self._require(p1)
        y1, y2 = self.forward_arrays(p1, p2)
        return float(y1), float(y2)

    def backward(self, point, reduce=True):
        q1, q2 = float(point[0]), float(point[1])
        self._require(q1)
        x1, x2 = self.backward_arrays(q1, q2, reduce=reduce)
        return float(x1), float(x2)

    def jacobian(self, point) -> float:
        """|det d(backward)/d(y)| at a point in the new coordinates."""
        q1 = float(point[0])
        self._require(q1)
        return float(self.jacobian_arrays(q1, float(point[1])))

    def flow(self, t: float, point):
        """Image of a source point under the dilation part of the case's action."""
        p1, p2 = float(point[0]), float(point[1])
        alpha = self.case.alpha
        if self.kind is CaseKind.I:
            return math.exp(-alpha * t) * p1, math.exp(-(alpha + 1.0) * t) * p2
        if self.kind is CaseKind.II:
            return math.exp(-t) * p1, math.exp(-t) * (p2 - t * p1)
        theta = p2 - alpha * t
        if self.kind is CaseKind.III:
            theta = theta % 1.0
        return math.exp(-t) * p1, theta


def chart_forward(case: CaseTag, point):
    return CoordChart(case).forward(point)


def chart_backward(case: CaseTag, point, reduce=True):
    return CoordChart(case).backward(point, reduce=reduce)


def jacobian(case: CaseTag, point) -> float:
    return CoordChart(case).jacobian(point)


def finite_difference_jacobian(chart: CoordChart, point, step=1e-6) -> float:
    """|det| of the backward map's derivative by central differences, without the mod-1 wrap."""
    q1, q2 = float(point[0]), float(point[1])

    def at(d1, d2):
        return chart.backward((q1 + d1, q2 + d2), reduce=False)

    a_p, a_m = at(step, 0.0), at(-step, 0.0)
    b_p, b_m = at(0.0, step), at(0.0, -step)
    j11 = (a_p[0] - a_m[0]) / (2 * step)
    j21 = (a_p[1] - a_m[1]) / (2 * step)
    j12 = (b_p[0] - b_m[0]) / (2 * step)
    j22 = (b_p[1] - b_m[1]) / (2 * step)
    return abs(j11 * j22 - j12 * j21)


def second_coordinate_drift(chart: CoordChart, t: float, point) -> float:
    """|forward(flow_t(p)).y2 - forward(p).y2|, reduced mod 1 on the circle."""
    before = chart.forward(point)[1]
    after = chart.forward(chart.flow(t, point))[1]
    drift = after - before
    if chart.kind is CaseKind.III:
        drift = (drift + 0.5) % 1.0 - 0.5
    return abs(drift)
