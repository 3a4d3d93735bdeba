"""
The representations acting on functions.

L and Q act on atom sums inside the atom algebra and on evaluators
pointwise. Cases I-IV act on evaluators only: I and II on the half-plane,
III on the plane, IV on the cone x1 > |x2| (zero outside).
"""

from __future__ import annotations

import math

import numpy as np

from functions.atoms import AtomSum, Dilation, LinearPhase, QuadraticPhase, transform_sum
from functions.evaluators import Domain, PointEvaluator, SupportBox, demote

from .cases import CaseKind, CaseTag, GroupElement, _check


def rotation(turns: float) -> np.ndarray:
    """Counter-clockwise rotation by 2*pi*turns; shifts the polar angle theta in [0, 1) by turns."""
    c, s = math.cos(2.0 * math.pi * turns), math.sin(2.0 * math.pi * turns)
    return np.array([[c, -s], [s, c]])


def boost(rapidity: float) -> np.ndarray:
    """Hyperbolic rotation; shifts the hyperbolic angle by rapidity."""
    c, s = math.cosh(rapidity), math.sinh(rapidity)
    return np.array([[c, s], [s, c]])


def planar_matrix(case: CaseTag, t: float) -> np.ndarray:
    """M with (mu_(u,t) f)(x) proportional to f(M x)."""
    if case.kind is CaseKind.I:
        return np.diag([math.exp(-case.alpha * t), math.exp(-(case.alpha + 1.0) * t)])
    if case.kind is CaseKind.II:
        return math.exp(-t) * np.array([[1.0, 0.0], [-t, 1.0]])
    if case.kind is CaseKind.III:
        return math.exp(-t) * rotation(-case.alpha * t)
    if case.kind is CaseKind.IV:
        return math.exp(-t) * boost(-case.alpha * t)
    raise ValueError(f"{case.label} is not a planar case")


def planar_amplitude(case: CaseTag, t: float) -> float:
    if case.kind is CaseKind.I:
        return math.exp(-(2.0 * case.alpha + 1.0) * t / 2.0)
    return math.exp(-t)


def chirp(case: CaseTag, x1, x2):
    """The quadratic form in the phase exp(pi i u Q(x))."""
    if case.kind in (CaseKind.I, CaseKind.II):
        return x1 * x1
    if case.kind is CaseKind.III:
        return x1 * x1 + x2 * x2
    return x1 * x1 - x2 * x2


def in_cone(x1, x2):
    return x1 > np.abs(x2)


def _preimage_box(matrix: np.ndarray, box: SupportBox) -> SupportBox:
    if not box.bounded:
        return SupportBox((-math.inf, math.inf), (-math.inf, math.inf))
    inverse = np.linalg.inv(matrix)
    corners = np.array([[x, y] for x in box.x1 for y in box.x2]).T
    mapped = inverse @ corners
    return SupportBox(
        (float(mapped[0].min()), float(mapped[0].max())),
        (float(mapped[1].min()), float(mapped[1].max())),
    )


def _act_one_dimensional(case: CaseTag, g: GroupElement, f):
    if isinstance(f, AtomSum):
        if case.kind is CaseKind.L:
            return transform_sum(f, Dilation(g.t), LinearPhase(g.u))
        return transform_sum(f, Dilation(g.t), QuadraticPhase(g.u))

    s, u = g.t, g.u
    amplitude = math.sqrt(s)

    if case.kind is CaseKind.L:
        def rule(x1, x2):
            return amplitude * f(s * x1, x2) * np.exp(2j * math.pi * u * x1)
    else:
        def rule(x1, x2):
            return amplitude * f(s * x1, x2) * np.exp(1j * math.pi * u * x1 * x1)

    lo, hi = f.support.x1
    top = hi / s
    hint = f.freq_hint[0] * s + (abs(u) if case.kind is CaseKind.L else abs(u) * (top if math.isfinite(top) else 0.0))
    return f.with_rule(
        rule,
        support=SupportBox((lo / s, top), f.support.x2),
        breaks=(tuple(b / s for b in f.breaks[0]), f.breaks[1]),
        freq_hint=(hint, f.freq_hint[1]),
        label=f"{case.label}{g.as_list()}({f.label})",
    )


def _act_planar(case: CaseTag, g: GroupElement, f: PointEvaluator) -> PointEvaluator:
    u = g.u
    matrix = planar_matrix(case, g.t)
    amplitude = planar_amplitude(case, g.t)
    (m11, m12), (m21, m22) = matrix

    def rule(x1, x2):
        z1 = m11 * x1 + m12 * x2
        z2 = m21 * x1 + m22 * x2
        value = amplitude * np.exp(1j * math.pi * u * chirp(case, x1, x2)) * f(z1, z2)
        if case.kind is CaseKind.IV:
            value = np.where(in_cone(x1, x2), value, 0.0)
        return value

    support = _preimage_box(matrix, f.support)
    if case.kind is CaseKind.I:
        breaks = (
            tuple(b / m11 for b in f.breaks[0]),
            tuple(b / m22 for b in f.breaks[1]),
        )
    else:
        breaks = ((), ())
    reach = max((abs(v) for v in (*support.x1, *support.x2) if math.isfinite(v)), default=0.0)
    stretch = float(np.abs(matrix).max())
    spread = stretch * (f.freq_hint[0] + f.freq_hint[1])
    return f.with_rule(
        rule,
        support=support,
        breaks=breaks,
        freq_hint=(abs(u) * reach + spread, abs(u) * reach + spread),
        label=f"{case.label}{g.as_list()}({f.label})",
    )


def act(case: CaseTag, g: GroupElement, f):
    """mu^case_g f; atom sums stay atom sums for L and Q."""
    _check(case, g)
    if case.kind in (CaseKind.L, CaseKind.Q):
        return _act_one_dimensional(case, g, f)
    if isinstance(f, AtomSum):
        f = demote(f)
    if case.kind in (CaseKind.III, CaseKind.IV) and f.domain is not Domain.PLANE:
        raise ValueError(f"{case.label} acts on Cartesian evaluators, got {f.domain.value}")
    return _act_planar(case, g, f)
