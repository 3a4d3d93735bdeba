"""
The six parameter groups and their laws.

L and Q are the one-dimensional affine groups acting by
    L: f(xi, y) -> s^(1/2) f(s xi, y) exp(2 pi i u xi)
    Q: f(r, y)  -> t^(1/2) f(t r, y) exp(pi i v r^2)
and I-IV are the (u, t) groups of the two-dimensional cases, with t additive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .exceptions import CaseMismatch


class CaseKind(str, enum.Enum):
    L = "L"
    Q = "Q"
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


ONE_DIMENSIONAL = (CaseKind.L, CaseKind.Q)
PLANAR = (CaseKind.I, CaseKind.II, CaseKind.III, CaseKind.IV)


@dataclass(frozen=True)
class CaseTag:
    kind: CaseKind
    alpha: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CaseKind(self.kind))
        kind, alpha = self.kind, self.alpha
        if kind in (CaseKind.I, CaseKind.III, CaseKind.IV):
            if alpha is None:
                raise ValueError(f"case {kind.value} needs alpha")
            alpha = float(alpha)
            object.__setattr__(self, "alpha", alpha)
            if kind is CaseKind.I and alpha == 0.0:
                raise ValueError("alpha=0 invalid for case I")
            if kind is CaseKind.I and not -1.0 <= alpha < 0.0:
                raise ValueError(f"alpha={alpha} invalid for case I (needs -1 <= alpha < 0)")
            if kind in (CaseKind.III, CaseKind.IV) and not alpha >= 0.0:
                raise ValueError(f"alpha={alpha} invalid for case {kind.value} (needs alpha >= 0)")
        elif alpha is not None:
            raise ValueError(f"case {kind.value} takes no alpha")

    @property
    def label(self) -> str:
        if self.alpha is None:
            return self.kind.value
        return f"{self.kind.value}[alpha={self.alpha:g}]"

    def as_dict(self) -> dict:
        data = {"case": self.kind.value}
        if self.alpha is not None:
            data["alpha"] = self.alpha
        return data


@dataclass(frozen=True)
class GroupElement:
    u: float
    t: float
    case: CaseTag | None = None

    def as_list(self):
        return [self.u, self.t]


def _check(case: CaseTag, *elements: GroupElement):
    for g in elements:
        if g.case is not None and g.case != case:
            raise CaseMismatch(f"element of {g.case.label} used with {case.label}")
        if case.kind in ONE_DIMENSIONAL and not g.t > 0:
            raise CaseMismatch(f"{case.label} needs a positive dilation, got t={g.t}")


def identity(case: CaseTag) -> GroupElement:
    return GroupElement(0.0, 1.0 if case.kind in ONE_DIMENSIONAL else 0.0, case)


def _u_factor(case: CaseTag, t: float) -> float:
    """How the outer element rescales the inner u in the group law."""
    if case.kind is CaseKind.L:
        return t
    if case.kind is CaseKind.Q:
        return t * t
    if case.kind is CaseKind.I:
        return math.exp(-2.0 * case.alpha * t)
    return math.exp(-2.0 * t)


def compose(case: CaseTag, g2: GroupElement, g1: GroupElement) -> GroupElement:
    """g2 o g1, i.e. the element acting as act(g2) after act(g1)."""
    _check(case, g2, g1)
    u = g2.u + _u_factor(case, g2.t) * g1.u
    t = g2.t * g1.t if case.kind in ONE_DIMENSIONAL else g2.t + g1.t
    return GroupElement(u, t, case)


def inverse(case: CaseTag, g: GroupElement) -> GroupElement:
    _check(case, g)
    t = 1.0 / g.t if case.kind in ONE_DIMENSIONAL else -g.t
    return GroupElement(-_u_factor(case, t) * g.u, t, case)


def haar_density(case: CaseTag, g: GroupElement) -> float:
    """Density of the left Haar measure with respect to du dt."""
    _check(case, g)
    if case.kind is CaseKind.L:
        return 1.0 / g.t ** 2
    if case.kind is CaseKind.Q:
        return 1.0 / g.t ** 3
    if case.kind is CaseKind.I:
        return -case.alpha * math.exp(2.0 * case.alpha * g.t)
    return math.exp(2.0 * g.t)


def lattice_element(case: CaseTag, k: int, m: int) -> GroupElement:
    k, m = int(k), int(m)
    if case.kind is CaseKind.L:
        return GroupElement(2.0 ** k * m, 2.0 ** k, case)
    u = 2.0 ** (k + 1) * m
    if case.kind is CaseKind.Q:
        return GroupElement(u, 2.0 ** (k / 2.0), case)
    if case.kind is CaseKind.I:
        return GroupElement(u, -math.log(2.0) * k / (2.0 * case.alpha), case)
    return GroupElement(u, -math.log(2.0) * k / 2.0, case)


Q_CASE = CaseTag(CaseKind.Q)
L_CASE = CaseTag(CaseKind.L)


def to_q_parameters(case: CaseTag, g: GroupElement) -> GroupElement:
    """The Q-side element an intertwiner maps g to: (2u, s^(1/2)) for L, (u, e^(-alpha t)) for I, (u, e^(-t)) for II-IV."""
    _check(case, g)
    if case.kind is CaseKind.Q:
        return g
    if case.kind is CaseKind.L:
        return GroupElement(2.0 * g.u, math.sqrt(g.t), Q_CASE)
    if case.kind is CaseKind.I:
        return GroupElement(g.u, math.exp(-case.alpha * g.t), Q_CASE)
    return GroupElement(g.u, math.exp(-g.t), Q_CASE)


def left_translation_jacobian(case: CaseTag, g0: GroupElement, g: GroupElement, step=1e-6) -> float:
    """|det d(g0 o g)/d(u, t)| by central differences."""
    def at(du, dt):
        h = compose(case, g0, GroupElement(g.u + du, g.t + dt, case))
        return h.u, h.t

    up, um = at(step, 0.0), at(-step, 0.0)
    tp, tm = at(0.0, step), at(0.0, -step)
    a11 = (up[0] - um[0]) / (2 * step)
    a21 = (up[1] - um[1]) / (2 * step)
    a12 = (tp[0] - tm[0]) / (2 * step)
    a22 = (tp[1] - tm[1]) / (2 * step)
    return abs(a11 * a22 - a12 * a21)
