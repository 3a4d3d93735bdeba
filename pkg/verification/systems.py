"""
Lattice systems mu_lambda psi and their exact bookkeeping.

Elements are built on finite truncations S_N of a Shannon lift. The full
lift's Gram matrix differs from the S_N one only on the dyadic bands S_N
leaves out; on a fixed scale those bands tile a finite union of gaps in
(0, 1], so the missing part has a closed form.

Coefficients of a function f against the full lift go through the scale
profile H_k(xi) = int f(xi, y) conj(psi(2^k xi, y)) dy, an atom sum in xi
supported in (0, 2^-k]: then <f, mu_(k,m) psi> = 2^(k/2) hat H_k(2^k m)
and sum_m |<f, mu_(k,m) psi>|^2 = ||H_k||^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from functions.atoms import AtomSum, FiberKind, RadialFactor, TensorAtom, circle_atom
from functions.inner import fiber_integral, inner_product, inner_product_exact, oscillatory_segment
from groups.actions import act
from groups.cases import L_CASE, Q_CASE, CaseKind, CaseTag, lattice_element
from intertwiners.operators import apply_U, apply_U_inv
from shannon.lifts import LazyShannonLift, band_edges, building_block, shannon_tensor_atom

from .exceptions import ConfigError, TruncationTooSmall

logger = logging.getLogger("verification")

# bands beyond this carry at most 2^-N_CAP of a unit-bounded function's energy
N_CAP = 64


@dataclass(frozen=True)
class LatticeBox:
    k: tuple
    m: tuple | None = None
    fiber_n: int = 2

    def scales(self):
        return list(range(self.k[0], self.k[1] + 1))

    def indices(self):
        if self.m is None:
            raise ConfigError("this computation needs an m range")
        return [(k, m) for k in self.scales() for m in range(self.m[0], self.m[1] + 1)]

    def contains(self, k, m) -> bool:
        inside = self.k[0] <= k <= self.k[1]
        if self.m is not None:
            inside = inside and self.m[0] <= m <= self.m[1]
        return inside

    def as_dict(self) -> dict:
        data = {"k": list(self.k), "N": self.fiber_n}
        if self.m is not None:
            data["m"] = list(self.m)
        return data


# ----------------------------------------------------------------------
# Elements and Gram entries
# ----------------------------------------------------------------------

def l_element(lift: LazyShannonLift, k: int, m: int, N: int) -> AtomSum:
    return act(L_CASE, lattice_element(L_CASE, k, m), lift.partial_sum(N))


def q_element(lift: LazyShannonLift, k: int, m: int, N: int) -> AtomSum:
    return act(Q_CASE, lattice_element(Q_CASE, k, m), apply_U(lift.partial_sum(N)))


def band_gaps(lift: LazyShannonLift, N: int):
    """Merged intervals of (0, 1] not covered by the bands of S_N."""
    included = set(lift.included_bands(N))
    top = max(included)
    gaps = [[0.0, band_edges(top)[0]]]
    for n in range(top - 1, 0, -1):
        if n in included:
            continue
        a, b = band_edges(n)
        if gaps and gaps[-1][1] == a:
            gaps[-1][1] = b
        else:
            gaps.append([a, b])
    return [tuple(g) for g in gaps]


def gram_tail(gaps, k: int, m: int, k2: int, m2: int) -> complex:
    """<mu psi, mu psi> minus the same for S_N; zero across scales."""
    if k != k2:
        return 0j
    return sum((oscillatory_segment(m - m2, a, b) for a, b in gaps), 0j)


def lattice_inner(k: int, m: int, k2: int, m2: int) -> complex:
    """<mu_(k,m) psi, mu_(k2,m2) psi> for the full lift."""
    if k != k2:
        return 0j
    return oscillatory_segment(m - m2, 0.0, 1.0)


def exact_gram(elements) -> np.ndarray:
    size = len(elements)
    gram = np.zeros((size, size), dtype=complex)
    for i in range(size):
        for j in range(i, size):
            value = inner_product_exact(elements[i], elements[j])
            gram[i, j] = value
            gram[j, i] = np.conj(value)
    return gram


def tail_matrix(lift: LazyShannonLift, indices, N: int) -> np.ndarray:
    gaps = band_gaps(lift, N)
    return np.array([[gram_tail(gaps, k, m, k2, m2) for (k2, m2) in indices] for (k, m) in indices])


# ----------------------------------------------------------------------
# Scale profiles and coefficients
# ----------------------------------------------------------------------

def _bands_meeting(k: int, a: float, b: float):
    """Band indices n >= 1 with (2^(-n-k), 2^(-n-k+1)] meeting (a, b]."""
    if math.isfinite(b):
        first = max(1, math.floor(-k - math.log2(b)))
    else:
        first = 1
    last = N_CAP if a == 0.0 else min(N_CAP, math.ceil(-k - math.log2(a)) + 1)
    for n in range(first, last + 1):
        lo, hi = 2.0 ** (-n - k), 2.0 ** (-n - k + 1)
        if lo < b and hi > a:
            yield n, lo, hi


def scale_profile(f: AtomSum, lift: LazyShannonLift, k: int) -> AtomSum:
    """H_k as radial atoms carried on the circle fiber with frequency 0."""
    if len(f) and f.domain is not lift.fiber:
        raise ConfigError(f"function lives on the {f.domain.value} fiber, the lift on the {lift.fiber.value}")
    atoms = []
    for atom in f:
        rad = atom.radial
        for n, lo, hi in _bands_meeting(k, rad.a, rad.b):
            overlap = fiber_integral(atom, building_block(n, lift.key(n), lift.fiber))
            if overlap == 0:
                continue
            radial = RadialFactor(
                power=rad.power,
                a=max(rad.a, lo),
                b=min(rad.b, hi),
                lin_phase=rad.lin_phase,
                quad_phase=rad.quad_phase,
            )
            atoms.append(TensorAtom(atom.coeff * overlap, radial, domain=FiberKind.CIRCLE))
    return AtomSum(tuple(atoms), FiberKind.CIRCLE)


def scale_energy(f: AtomSum, lift: LazyShannonLift, k: int, tol: float = 1e-12) -> float:
    """sum over m of |<f, mu_(k,m) psi>|^2, in closed form."""
    profile = scale_profile(f, lift, k)
    if not len(profile):
        return 0.0
    return float(inner_product(profile, profile, tol=tol).real)


def coefficient(f: AtomSum, lift: LazyShannonLift, k: int, m: int, profile: AtomSum | None = None) -> complex:
    profile = scale_profile(f, lift, k) if profile is None else profile
    if not len(profile):
        return 0j
    wave = AtomSum((circle_atom(2.0 ** (k / 2.0), 0.0, 2.0 ** (-k), lin_phase=2.0 ** k * m),), FiberKind.CIRCLE)
    return inner_product(profile, wave)


def separable_coefficient(f: AtomSum, k: int, m: int, l: int) -> complex:
    """<f, psi^S_(k,m) tensor e_(0,l)> for a circle-fiber f."""
    if len(f) and f.domain is not FiberKind.CIRCLE:
        raise ConfigError("the separable Shannon system lives on the circle fiber")
    return inner_product(f, AtomSum((shannon_tensor_atom(k, m, l),), FiberKind.CIRCLE))


# ----------------------------------------------------------------------
# Function inputs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ElementExpansion:
    """A finite combination sum coef * mu_(k,m) psi of full-lift lattice elements."""
    terms: tuple  # ((k, m, coef), ...)

    def norm2(self) -> float:
        total = 0j
        for k, m, c in self.terms:
            for k2, m2, c2 in self.terms:
                total += c * np.conj(c2) * lattice_inner(k, m, k2, m2)
        return float(total.real)

    def coefficient(self, k: int, m: int) -> complex:
        return sum((c * lattice_inner(k0, m0, k, m) for k0, m0, c in self.terms), 0j)

    def outside(self, box: LatticeBox):
        return [(k, m) for k, m, c in self.terms if c != 0 and not box.contains(k, m)]


def l_side_function(f, side: str) -> AtomSum:
    """Move a q-side atom sum to the l-side through U^-1."""
    if side == "l" or isinstance(f, ElementExpansion):
        return f
    moved = apply_U_inv(f)
    if not isinstance(moved, AtomSum):
        raise ConfigError("the q-side function leaves the atom algebra under U^-1")
    return moved


def parseval_sum(f, lift: LazyShannonLift, box: LatticeBox, tol: float, allow_partial: bool = False):
    """
    (||f||^2, sum of |coefficients|^2 over the box, per-scale energies).

    Without an m range the m-sum of each scale is taken in closed form.
    Raises TruncationTooSmall when a scale just outside the box carries more
    than tol, unless allow_partial.
    """
    if isinstance(f, ElementExpansion):
        outside = f.outside(box)
        if outside and not allow_partial:
            raise TruncationTooSmall(f"elements {outside[:3]} lie outside the box {box.as_dict()}")
        per_scale = {}
        for k in box.scales():
            if box.m is None:
                terms = ElementExpansion(tuple(t for t in f.terms if t[0] == k))
                per_scale[k] = terms.norm2()
            else:
                per_scale[k] = sum(abs(f.coefficient(k, m)) ** 2 for m in range(box.m[0], box.m[1] + 1))
        return f.norm2(), sum(per_scale.values()), per_scale

    norm2 = float(inner_product(f, f, tol=tol).real) if len(f) else 0.0
    for k in (box.k[0] - 1, box.k[1] + 1):
        spill = scale_energy(f, lift, k, tol)
        if spill > tol:
            if not allow_partial:
                raise TruncationTooSmall(f"scale k={k} outside the box carries energy {spill:.3e}")
            logger.info("parseval: partial box, scale k=%d outside carries %.3e", k, spill)
    per_scale = {}
    for k in box.scales():
        if box.m is None:
            per_scale[k] = scale_energy(f, lift, k, tol)
        else:
            profile = scale_profile(f, lift, k)
            per_scale[k] = sum(
                abs(coefficient(f, lift, k, m, profile)) ** 2 for m in range(box.m[0], box.m[1] + 1)
            )
    return norm2, sum(per_scale.values()), per_scale


def coefficient_table(f, system: str, lift: LazyShannonLift | None, box: LatticeBox, l_range=None):
    """Rows (k, m, [l,] coef) over the box, in index order."""
    rows = []
    if system == "S":
        if isinstance(f, ElementExpansion):
            raise ConfigError("element expansions are given against the lift systems")
        for k, m in box.indices():
            for l in range(l_range[0], l_range[1] + 1):
                rows.append((k, m, l, separable_coefficient(f, k, m, l)))
        return rows
    if isinstance(f, ElementExpansion):
        return [(k, m, f.coefficient(k, m)) for k, m in box.indices()]
    for k in box.scales():
        profile = scale_profile(f, lift, k)
        for m in range(box.m[0], box.m[1] + 1):
            rows.append((k, m, coefficient(f, lift, k, m, profile)))
    return rows


def chart_case_for(lift: LazyShannonLift, case: CaseTag):
    wanted = FiberKind.CIRCLE if case.kind is CaseKind.III else FiberKind.LINE
    if lift.fiber is not wanted:
        raise ConfigError(f"{case.label} needs the {'DT' if wanted is FiberKind.CIRCLE else 'DR'} generator")
    return case
