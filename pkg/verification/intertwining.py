"""Pointwise checks of the intertwining relations, the charts and the group laws."""

import logging

import numpy as np

from functions.atoms import AtomSum, line_atom
from functions.evaluators import Domain, bump
from functions.inner import inner_product
from groups.actions import act
from groups.cases import (
    L_CASE,
    Q_CASE,
    CaseKind,
    CaseTag,
    GroupElement,
    compose,
    haar_density,
    identity,
    inverse,
    lattice_element,
    left_translation_jacobian,
    to_q_parameters,
)
from intertwiners.charts import CoordChart, finite_difference_jacobian, second_coordinate_drift
from intertwiners.operators import apply_U, apply_U_inv, apply_U_J

from .reports import VerificationReport
from .utils import max_defect, ordered_map, rng_for

logger = logging.getLogger("verification")

CHART_PROPERTIES = ("roundtrip", "jacobian", "invariance")


def random_element(rng, case: CaseTag) -> GroupElement:
    if case.kind in (CaseKind.L, CaseKind.Q):
        return GroupElement(float(rng.uniform(-3.0, 3.0)), float(np.exp(rng.uniform(-1.4, 1.4))), case)
    return GroupElement(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(-0.5, 0.5)), case)


def random_source(rng, case: CaseTag):
    """A smooth compactly supported test function on the case's source domain."""
    freq = (float(rng.uniform(-1.0, 1.0)), float(rng.uniform(-1.0, 1.0)))
    if case.kind in (CaseKind.I, CaseKind.II):
        centre = (float(rng.uniform(0.8, 1.6)), float(rng.uniform(-0.5, 0.5)))
        return bump(Domain.HALF_PLANE, centre, (0.4, 0.5), freq=freq)
    if case.kind is CaseKind.III:
        centre = (float(rng.uniform(-0.8, 0.8)), float(rng.uniform(-0.8, 0.8)))
        return bump(Domain.PLANE, centre, (0.4, 0.4), freq=freq)
    x1 = float(rng.uniform(1.0, 1.6))
    return bump(Domain.PLANE, (x1, float(rng.uniform(-0.3, 0.3)) * x1), (0.3, 0.3), freq=freq)


def chart_points(rng, case: CaseTag, count: int):
    y1 = rng.uniform(0.3, 2.5, count)
    if case.kind is CaseKind.III:
        return y1, rng.uniform(0.0, 1.0, count)
    return y1, rng.uniform(-2.0, 2.0, count)


def source_points(rng, case: CaseTag, count: int):
    if case.kind is CaseKind.III:
        return rng.uniform(0.1, 3.0, count), rng.uniform(0.0, 1.0, count)
    return rng.uniform(0.1, 3.0, count), rng.uniform(-2.0, 2.0, count)


def random_atom_sum(rng, size: int = 3) -> AtomSum:
    atoms = []
    for _ in range(size):
        a = float(rng.uniform(0.1, 2.0))
        c = int(rng.integers(-2, 2))
        atoms.append(line_atom(
            complex(rng.normal(), rng.normal()),
            a,
            a + float(rng.uniform(0.2, 1.5)),
            c,
            c + 1,
            freq=int(rng.integers(-2, 3)),
            power=float(rng.integers(0, 3)),
            lin_phase=float(rng.uniform(-1.0, 1.0)),
        ))
    return AtomSum(tuple(atoms))


# ----------------------------------------------------------------------
# Intertwining
# ----------------------------------------------------------------------

def _lq_defect(rng, elements: int, points: int):
    f = random_atom_sum(rng)
    g_U = apply_U(f)
    unitarity = abs(inner_product(g_U, g_U).real - inner_product(f, f).real)
    draws = [
        (random_element(rng, L_CASE), rng.uniform(0.01, 4.0, points), rng.uniform(-2.5, 2.5, points))
        for _ in range(elements)
    ]

    def one(draw):
        g, xi, y = draw
        left = act(L_CASE, g, f)
        right = apply_U_inv(act(Q_CASE, to_q_parameters(L_CASE, g), g_U))
        return float(np.max(np.abs(left(xi, y) - right(xi, y))))

    return max(max_defect(ordered_map(one, draws)), unitarity), unitarity


def intertwine_defect(params: dict, seed: int) -> VerificationReport:
    """
    max |U^J mu^J_g f - mu^Q_g' U^J f| over random g and chart points, with
    g' the Q-side element; for LQ the same for U between L and Q, plus
    the unitarity defect of U on a random atom sum.
    """
    case = params["case"]
    elements, points = params["elements"], params["points"]
    rng = rng_for(seed, "intertwine", case.label)
    extra = {}

    if case.kind is CaseKind.L:
        defect, unitarity = _lq_defect(rng, elements, points)
        logger.info("intertwine LQ: unitarity defect of U %.3e", unitarity)
        extra["unitarity"] = unitarity
        label = "LQ"
    else:
        f = random_source(rng, case)
        transferred = apply_U_J(case, f)
        draws = [(random_element(rng, case), *chart_points(rng, case, points)) for _ in range(elements)]

        def one(draw):
            g, y1, y2 = draw
            left = apply_U_J(case, act(case, g, f))
            right = act(Q_CASE, to_q_parameters(case, g), transferred)
            return float(np.max(np.abs(left(y1, y2) - right(y1, y2))))

        defect = max_defect(ordered_map(one, draws))
        label = case.label

    return VerificationReport(
        check="intertwine",
        case=label,
        params={**case.as_dict(), "elements": elements, "points": points},
        maxDefect=defect,
        tolerance=params["tol"],
        samples=elements * points,
        notes="pointwise on (0.3, 2.5) x fiber chart points",
        extra=extra,
    )


# ----------------------------------------------------------------------
# Charts
# ----------------------------------------------------------------------

def _wrapped(value: float, case: CaseTag) -> float:
    if case.kind is CaseKind.III:
        return abs((value + 0.5) % 1.0 - 0.5)
    return abs(value)


def chart_defect(params: dict, seed: int) -> VerificationReport:
    """
    One chart property over random source points:
    roundtrip, backward(forward(p)) = p (relative);
    jacobian, closed form against central differences (relative);
    invariance, y2 unchanged along the dilation flow.
    """
    case, prop, count = params["case"], params["property"], params["points"]
    chart = CoordChart(case)
    rng = rng_for(seed, "charts", prop, case.label)
    p1, p2 = source_points(rng, case, count)
    ts = rng.uniform(-1.0, 1.0, count)

    def one(i):
        point = (float(p1[i]), float(p2[i]))
        if prop == "roundtrip":
            back = chart.backward(chart.forward(point))
            return max(
                abs(back[0] - point[0]) / max(1.0, point[0]),
                _wrapped(back[1] - point[1], case) / max(1.0, abs(point[1])),
            )
        if prop == "jacobian":
            exact = chart.jacobian(point)
            return abs(finite_difference_jacobian(chart, point, step=params["step"]) - exact) / exact
        return second_coordinate_drift(chart, float(ts[i]), point)

    defect = max_defect(ordered_map(one, range(count)))
    return VerificationReport(
        check="charts",
        case=case.label,
        params={**case.as_dict(), "property": prop, "points": count},
        maxDefect=defect,
        tolerance=params["tol"],
        samples=count,
        notes=f"chart {prop}",
    )


# ----------------------------------------------------------------------
# Group laws
# ----------------------------------------------------------------------

def _distance(g: GroupElement, h: GroupElement) -> float:
    return max(abs(g.u - h.u) / max(1.0, abs(h.u)), abs(g.t - h.t) / max(1.0, abs(h.t)))


def group_defect(params: dict, seed: int) -> VerificationReport:
    """Associativity, inverses, left invariance of the Haar density and the lattice map to Q."""
    case, count = params["case"], params["elements"]
    rng = rng_for(seed, "groups", case.label)
    triples = [tuple(random_element(rng, case) for _ in range(3)) for _ in range(count)]
    e = identity(case)

    def one(triple):
        a, b, c = triple
        assoc = _distance(compose(case, compose(case, a, b), c), compose(case, a, compose(case, b, c)))
        inv = max(_distance(compose(case, a, inverse(case, a)), e), _distance(compose(case, inverse(case, a), a), e))
        pushed = haar_density(case, compose(case, a, b)) * left_translation_jacobian(case, a, b)
        haar = abs(pushed / haar_density(case, b) - 1.0)
        return assoc, inv, haar

    laws = ordered_map(one, triples)
    defects = {
        "associativity": max_defect(v[0] for v in laws),
        "inverse": max_defect(v[1] for v in laws),
        "haar": max_defect(v[2] for v in laws),
    }
    if case.kind is not CaseKind.Q:
        lattice = []
        for k in range(-4, 5):
            for m in range(-4, 5):
                lattice.append(_distance(to_q_parameters(case, lattice_element(case, k, m)), lattice_element(Q_CASE, k, m)))
        defects["lattice"] = max_defect(lattice)

    return VerificationReport(
        check="groups",
        case=case.label,
        params={**case.as_dict(), "elements": count},
        maxDefect=max(defects.values()),
        tolerance=params["tol"],
        samples=count,
        notes="haar invariance through central differences of the group law",
        extra=defects,
    )
