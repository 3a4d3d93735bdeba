"""
Weighted inner products on R+ x Y.

The exact path sums closed-form radial x fiber integrals over atom pairs; the
quadrature path integrates two PointEvaluators over their intersected support
boxes. Both are conjugate-linear in the second argument.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .atoms import AtomSum, FiberKind, TensorAtom
from .evaluators import PointEvaluator, demote
from .exceptions import NonExactPair
from .quadrature import integrate_box

logger = logging.getLogger("quadrature")


@dataclass(frozen=True)
class RadialWeight:
    """The measure r**w dr on R+; w=0 is d(xi), w=-1 is ds/s, w=-2 is dr/r**2."""
    w: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.w == 0.0:
            return np.ones_like(r)
        return np.where(r > 0, np.abs(r) ** self.w, 0.0)


LEBESGUE = RadialWeight(0.0)
DS_OVER_S = RadialWeight(-1.0)
DR_OVER_R2 = RadialWeight(-2.0)


def _is_nonneg_integer(q: float) -> bool:
    return q >= 0 and float(q).is_integer()


def oscillatory_segment(freq: float, a: float, b: float) -> complex:
    """Integral of exp(2 pi i freq y) over (a, b], exactly 0 on whole periods."""
    length = b - a
    if freq == 0.0:
        return complex(length)
    cycles = freq * length
    if float(cycles).is_integer():
        return 0j
    centre = 0.5 * (a + b)
    return cmath.exp(2j * math.pi * freq * centre) * length * float(np.sinc(cycles))


def radial_integral(q: float, du: float, a: float, b: float) -> complex:
    """Integral of r**q exp(2 pi i du r) over (a, b]."""
    if du == 0.0:
        if math.isinf(b):
            if not q < -1.0:
                raise NonExactPair(f"r^{q} is not integrable at infinity")
            if a == 0.0:
                raise NonExactPair(f"r^{q} is not integrable at 0")
            return complex(-a ** (q + 1.0) / (q + 1.0))
        if q == -1.0:
            if a == 0.0:
                raise NonExactPair("1/r is not integrable at 0")
            return complex(math.log(b / a))
        if a == 0.0 and q < -1.0:
            raise NonExactPair(f"r^{q} is not integrable at 0")
        return complex((b ** (q + 1.0) - a ** (q + 1.0)) / (q + 1.0))
    if not _is_nonneg_integer(q) or math.isinf(b):
        raise NonExactPair(f"no closed form for r^{q} with a linear phase on ({a}, {b}]")
    n = int(q)
    total = oscillatory_segment(du, a, b)
    if n == 0:
        return total
    # integration by parts: I_n = [r^n e^{iwr}/(iw)] - n/(iw) I_{n-1}
    iw = 2j * math.pi * du
    ea, eb = cmath.exp(iw * a), cmath.exp(iw * b)
    for j in range(1, n + 1):
        total = (b ** j * eb - a ** j * ea) / iw - j / iw * total
    return total


def fiber_integral(f: TensorAtom, g: TensorAtom) -> complex:
    """Integral of fiber_f * conj(fiber_g) over Y with Lebesgue measure."""
    if f.domain is not g.domain:
        raise ValueError("atoms live on different fiber domains")
    dl = f.fiber.freq - g.fiber.freq
    if f.domain is FiberKind.CIRCLE:
        return 1.0 + 0j if dl == 0.0 else 0j
    lo, hi = max(f.fiber.c, g.fiber.c), min(f.fiber.d, g.fiber.d)
    if lo >= hi:
        return 0j
    return oscillatory_segment(dl, lo, hi)


def atom_pair_exact(f: TensorAtom, g: TensorAtom, weight: RadialWeight = LEBESGUE) -> complex:
    rf, rg = f.radial, g.radial
    lo, hi = max(rf.a, rg.a), min(rf.b, rg.b)
    if lo >= hi:
        return 0j
    fiber = fiber_integral(f, g)
    if fiber == 0:
        return 0j
    if rf.quad_phase != rg.quad_phase:
        raise NonExactPair("quadratic phases differ")
    q = rf.power + rg.power + weight.w
    du = rf.lin_phase - rg.lin_phase
    if du != 0.0 and not _is_nonneg_integer(q):
        raise NonExactPair(f"combined exponent {q} with a linear phase difference")
    radial = radial_integral(q, du, lo, hi)
    return f.coeff * g.coeff.conjugate() * radial * fiber


def inner_product_exact(f: AtomSum, g: AtomSum, weight: RadialWeight = LEBESGUE) -> complex:
    total = 0j
    for fa in f:
        for ga in g:
            total += atom_pair_exact(fa, ga, weight)
    return total


def inner_product_quadrature(f: PointEvaluator, g: PointEvaluator, weight: RadialWeight = LEBESGUE, tol=1e-10):
    """Returns (value, error_estimate) by nested adaptive quadrature."""
    if f.fiber is not g.fiber:
        raise ValueError("evaluators live on different fiber domains")
    box = f.support.intersect(g.support)
    if box is None:
        return 0j, 0.0
    breaks = (
        tuple(sorted(set(f.breaks[0]) | set(g.breaks[0]))),
        tuple(sorted(set(f.breaks[1]) | set(g.breaks[1]))),
    )
    hint = (f.freq_hint[0] + g.freq_hint[0], f.freq_hint[1] + g.freq_hint[1])

    def integrand(x1, x2):
        return f(x1, x2) * np.conj(g(x1, x2))

    value, err = integrate_box(
        integrand,
        box,
        tol=tol,
        breaks=breaks,
        freq_hint=hint,
        weight=None if weight.w == 0.0 else weight,
    )
    return complex(value), err


def inner_product(f, g, weight: RadialWeight = LEBESGUE, tol=1e-10) -> complex:
    """Exact when both sides are atom sums and every pair qualifies, quadrature otherwise."""
    if isinstance(f, AtomSum) and isinstance(g, AtomSum):
        try:
            return inner_product_exact(f, g, weight)
        except NonExactPair as e:
            logger.info("exact path unavailable (%s); using quadrature", e)
            f, g = demote(f), demote(g)
    elif isinstance(f, AtomSum):
        f = demote(f)
    elif isinstance(g, AtomSum):
        g = demote(g)
    value, _ = inner_product_quadrature(f, g, weight, tol)
    return value


def norm(f, weight: RadialWeight = LEBESGUE, tol=1e-10) -> float:
    value = inner_product(f, f, weight, tol)
    if abs(value.imag) > 1e-13:
        raise ArithmeticError(f"<f, f> has imaginary part {value.imag:.3e}")
    return math.sqrt(max(value.real, 0.0))
