"""
The unitary maps between the representations.

U takes the L-side to the Q-side, Uf(r, y) = (2r)**(1/2) f(r**2, y), and
U^J takes case J to the Q-side through its chart,
    U^J f(y1, y2) = c * y1**e * f_c(y1, y2)
with e from CoordChart.weight_exponent and c = (2 pi)**(1/2) for case III
(the polar angle runs over [0, 1)), c = 1 otherwise.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from functions.atoms import (
    AtomSum,
    FiberKind,
    PowerMultiply,
    RootSubstitution,
    SquareSubstitution,
    transform_sum,
)
from functions.evaluators import Domain, PointEvaluator, SupportBox, demote
from functions.exceptions import UnsupportedAction
from groups.cases import CaseKind, CaseTag

from .charts import HYPERBOLIC_POLAR, STANDARD_POLAR, CoordChart
from .exceptions import DomainError

logger = logging.getLogger("quadrature")

SQRT2 = math.sqrt(2.0)


def _span(values):
    """(min, max) of finite corner values; unbounded if any corner is not finite."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        return (-math.inf, math.inf)
    return (float(values.min()), float(values.max()))


def _hint(f: PointEvaluator, scale: float) -> tuple:
    total = (f.freq_hint[0] + f.freq_hint[1]) * max(1.0, scale)
    return (total, total)


# ----------------------------------------------------------------------
# U : L-side -> Q-side
# ----------------------------------------------------------------------

def _square_root_evaluator(f: PointEvaluator) -> PointEvaluator:
    def rule(r, y):
        return SQRT2 * np.sqrt(np.maximum(r, 0.0)) * f(r * r, y)

    lo, hi = f.support.x1
    top = math.sqrt(hi) if math.isfinite(hi) else hi
    return f.with_rule(
        rule,
        support=SupportBox((math.sqrt(max(lo, 0.0)), top), f.support.x2),
        breaks=(tuple(math.sqrt(b) for b in f.breaks[0] if b >= 0), f.breaks[1]),
        freq_hint=(2.0 * f.freq_hint[0] * max(1.0, top if math.isfinite(top) else 1.0), f.freq_hint[1]),
        label=f"U({f.label})",
    )


def _square_evaluator(f: PointEvaluator) -> PointEvaluator:
    def rule(r, y):
        safe = np.where(r > 0, r, 1.0)
        value = f(np.sqrt(safe), y) / (SQRT2 * safe ** 0.25)
        return np.where(r > 0, value, 0.0)

    lo, hi = f.support.x1
    return f.with_rule(
        rule,
        support=SupportBox((max(lo, 0.0) ** 2, hi * hi), f.support.x2),
        breaks=(tuple(b * b for b in f.breaks[0] if b >= 0), f.breaks[1]),
        freq_hint=f.freq_hint,
        label=f"U^-1({f.label})",
    )


def apply_U(f):
    """
    Uf(r, y) = (2r)**(1/2) f(r**2, y). Atom sums stay atom sums (a linear
    phase u becomes the quadratic phase 2u); an atom with a quadratic phase
    would need a quartic one, so such sums are demoted to an exact evaluator.
    """
    if isinstance(f, AtomSum):
        try:
            return transform_sum(f, SquareSubstitution(), PowerMultiply(0.5, SQRT2))
        except UnsupportedAction as e:
            logger.info("U leaves the atom algebra (%s); demoting", e)
            f = demote(f)
    return _square_root_evaluator(f)


def apply_U_inv(f):
    """U^-1 f(r, y) = (2 r**(1/2))**(-1/2) f(r**(1/2), y); a quadratic phase v becomes the linear phase v/2."""
    if isinstance(f, AtomSum):
        try:
            return transform_sum(f, RootSubstitution(), PowerMultiply(-0.25, 1.0 / SQRT2))
        except UnsupportedAction as e:
            logger.info("U^-1 leaves the atom algebra (%s); demoting", e)
            f = demote(f)
    return _square_evaluator(f)


# ----------------------------------------------------------------------
# Polar transfers
# ----------------------------------------------------------------------

def _require_plane(f: PointEvaluator):
    if isinstance(f, AtomSum) or f.domain is not Domain.PLANE:
        raise ValueError("polar transfers need a Cartesian evaluator")


def to_polar(f: PointEvaluator) -> PointEvaluator:
    """f_p(r, theta) = f(r cos 2 pi theta, r sin 2 pi theta); dx = 2 pi r dr dtheta."""
    _require_plane(f)

    def rule(r, theta):
        x1, x2 = STANDARD_POLAR.to_cartesian(r, theta)
        return f(x1, x2)

    corners = [math.hypot(x, y) for x in f.support.x1 for y in f.support.x2]
    reach = max(corners) if all(math.isfinite(c) for c in corners) else math.inf
    return PointEvaluator(
        domain=Domain.POLAR,
        rule=rule,
        support=SupportBox((0.0, reach), (0.0, 1.0)),
        fiber=FiberKind.CIRCLE,
        freq_hint=_hint(f, reach if math.isfinite(reach) else 1.0),
        label=f"polar({f.label})",
    )


def _cone_box(box: SupportBox) -> SupportBox:
    """Bounding box in (r, theta) of the part of a Cartesian box inside the cone."""
    (a, b), (c, d) = box.x1, box.x2
    if not b > 0 or not box.bounded:
        return SupportBox((0.0, math.inf), (-math.inf, math.inf))
    top_x2 = max(abs(c), abs(d))
    low_x2 = 0.0 if c <= 0.0 <= d else min(abs(c), abs(d))
    r_hi = math.sqrt(max(b * b - low_x2 * low_x2, 0.0))
    if a > top_x2:
        r_lo = math.sqrt(a * a - top_x2 * top_x2)
        ratios = [y / x for x in (a, b) for y in (c, d)]
        return SupportBox((r_lo, r_hi), (math.atanh(min(ratios)), math.atanh(max(ratios))))
    return SupportBox((0.0, r_hi), (-math.inf, math.inf))


def to_hyperbolic(f: PointEvaluator) -> PointEvaluator:
    """f_h(r, theta) = f(r cosh theta, r sinh theta) on the cone; dx = r dr dtheta."""
    _require_plane(f)
    b, (c, d) = f.support.x1[1], f.support.x2
    nearest = 0.0 if c <= 0.0 <= d else min(abs(c), abs(d))
    if not b > nearest:
        raise DomainError(f"support of {f.label or 'f'} does not meet the cone x1 > |x2|")

    def rule(r, theta):
        x1, x2 = HYPERBOLIC_POLAR.to_cartesian(r, theta)
        return np.where(r > 0, f(x1, x2), 0.0)

    box = _cone_box(f.support)
    return PointEvaluator(
        domain=Domain.HYPERBOLIC,
        rule=rule,
        support=box,
        freq_hint=_hint(f, box.x1[1] if math.isfinite(box.x1[1]) else 1.0),
        label=f"hyperbolic({f.label})",
    )


# ----------------------------------------------------------------------
# U^J : case J -> Q-side
# ----------------------------------------------------------------------

def normalization(case: CaseTag) -> float:
    return math.sqrt(2.0 * math.pi) if case.kind is CaseKind.III else 1.0


def _image_box(chart: CoordChart, box: SupportBox) -> SupportBox:
    (a, b), (c, d) = box.x1, box.x2
    a = max(a, 0.0)
    with np.errstate(all="ignore"):
        if chart.kind is CaseKind.I:
            y2 = _span(np.outer(np.power([a, b], -chart.beta), [c, d]))
        elif chart.kind is CaseKind.II:
            if a == 0.0:
                y2 = (-math.inf, math.inf)
            else:
                ratios = [v / x for x in (a, b) for v in (c, d)]
                y2 = _span([min(ratios) - math.log(b), max(ratios) - math.log(a)])
        elif chart.kind is CaseKind.III:
            y2 = (0.0, 1.0)
        else:
            alpha = chart.case.alpha
            low = c - alpha * math.log(b) if b > 0 else -math.inf
            high = d - alpha * math.log(a) if a > 0 else (d if alpha == 0.0 else math.inf)
            y2 = _span([low, high])
    return SupportBox((a, b), y2)


def _preimage_box(chart: CoordChart, box: SupportBox) -> SupportBox:
    """Bounding box of the source-side support, Cartesian for III and IV."""
    (a, b), (c, d) = box.x1, box.x2
    a = max(a, 0.0)
    with np.errstate(all="ignore"):
        if chart.kind is CaseKind.I:
            return SupportBox((a, b), _span(np.outer(np.power([a, b], chart.beta), [c, d])))
        if chart.kind is CaseKind.II:
            products = [x * v for x in (a, b) for v in (c, d)]
            ends = [0.0 if x == 0.0 else x * math.log(x) for x in (a, b)]
            low = min(ends) if not a < 1.0 / math.e < b else -1.0 / math.e
            return SupportBox((a, b), _span([min(products) + low, max(products) + max(ends)]))
        if chart.kind is CaseKind.III:
            return SupportBox((-b, b), (-b, b))
        alpha = chart.case.alpha
        t_lo = c + alpha * math.log(a) if a > 0 else (c if alpha == 0.0 else -math.inf)
        t_hi = d + alpha * math.log(b)
        if not (math.isfinite(t_lo) and math.isfinite(t_hi) and math.isfinite(b)):
            return SupportBox((0.0, math.inf), (-math.inf, math.inf))
        low_abs = 0.0 if t_lo <= 0.0 <= t_hi else min(abs(t_lo), abs(t_hi))
        x1 = (a * math.cosh(low_abs), b * math.cosh(max(abs(t_lo), abs(t_hi))))
        x2 = _span([x * math.sinh(t) for x in (a, b) for t in (t_lo, t_hi)])
        return SupportBox(x1, x2)


def _source_evaluator(chart: CoordChart, f: PointEvaluator) -> PointEvaluator:
    if isinstance(f, AtomSum):
        f = demote(f)
    if chart.polar is None:
        if f.domain is not Domain.HALF_PLANE:
            raise DomainError(f"{chart.case.label} acts on the half-plane, got {f.domain.value}")
        return f
    if f.domain is Domain.PLANE:
        return to_polar(f) if chart.kind is CaseKind.III else to_hyperbolic(f)
    if f.domain is not chart.source_domain:
        raise DomainError(f"{chart.case.label} needs {chart.source_domain.value} coordinates, got {f.domain.value}")
    return f


def apply_U_J(case: CaseTag, f: PointEvaluator) -> PointEvaluator:
    """U^J f on the Q-side half-plane; Cartesian III/IV input goes through to_polar/to_hyperbolic first."""
    chart = CoordChart(case)
    source = _source_evaluator(chart, f)
    exponent = chart.weight_exponent
    scale = normalization(case)

    def rule(y1, y2):
        positive = y1 > 0
        safe = np.where(positive, y1, 1.0)
        p1, p2 = chart.backward_arrays(safe, y2)
        value = scale * safe ** exponent * source(p1, p2)
        return np.where(positive, value, 0.0)

    box = _image_box(chart, source.support)
    breaks = (source.breaks[0], ()) if chart.polar is None else ((), ())
    return PointEvaluator(
        domain=Domain.HALF_PLANE,
        rule=rule,
        support=box,
        fiber=chart.fiber,
        breaks=breaks,
        freq_hint=_hint(source, box.x1[1] if math.isfinite(box.x1[1]) else 1.0),
        label=f"U^{case.label}({f.label})",
    )


def apply_U_J_inv(case: CaseTag, h) -> PointEvaluator:
    """(U^J)^-1 h: half-plane output for I and II, Cartesian for III and IV (zero off the cone)."""
    chart = CoordChart(case)
    if isinstance(h, AtomSum):
        h = demote(h)
    if h.domain is not Domain.HALF_PLANE or h.fiber is not chart.fiber:
        raise DomainError(f"U^{case.label} inverse needs a half-plane {chart.fiber.value} evaluator")
    exponent = chart.weight_exponent
    scale = normalization(case)
    polar = chart.polar

    def rule(x1, x2):
        if polar is None:
            inside = x1 > 0
            p1 = np.where(inside, x1, 1.0)
            p2 = x2
        else:
            if chart.kind is CaseKind.III:
                p1, p2 = polar.from_cartesian(x1, x2)
                inside = p1 > 0
            else:
                inside = x1 > np.abs(x2)
                p1, p2 = polar.from_cartesian(x1, x2)
            p1 = np.where(inside, p1, 1.0)
            p2 = np.where(inside, p2, 0.0)
        q1, q2 = chart.forward_arrays(p1, p2)
        value = h(q1, q2) / (scale * q1 ** exponent)
        return np.where(inside, value, 0.0)

    box = _preimage_box(chart, h.support)
    return PointEvaluator(
        domain=Domain.HALF_PLANE if polar is None else Domain.PLANE,
        rule=rule,
        support=box,
        fiber=FiberKind.LINE,
        breaks=(h.breaks[0], ()) if polar is None else ((), ()),
        freq_hint=_hint(h, box.x1[1] if math.isfinite(box.x1[1]) else 1.0),
        label=f"(U^{case.label})^-1({h.label})",
    )
