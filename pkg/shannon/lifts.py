"""
Shannon lifts: generating functions built band by band.

On the L-side, psi^D(xi, y) = sum_n f_n(xi) e_{D^-1(n)}(y) with
f_n = 1_(2^-n, 2^(-n+1)] and e_{k,l}(y) = 1_(k,k+1](y) exp(2 pi i l y)
(e_{0,l} on the circle). For xi in (0, 1] exactly one term is non-zero and
nothing is non-zero beyond 1, so lifts are evaluated lazily through the band
that covers a point and are only ever materialized as finite truncations.
The Q-side lift is U applied term by term; its bands are the square roots
of the L-side ones.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field, replace

import numpy as np

from functions.atoms import AtomSum, FiberKind, TensorAtom, circle_atom, eval_atom, line_atom
from functions.evaluators import Domain, PointEvaluator, SupportBox
from groups.cases import CaseKind, CaseTag
from groups.exceptions import CaseMismatch
from intertwiners.operators import apply_U, apply_U_J_inv

from .bijections import DR, DT, Bijection
from .exceptions import RangeError


class Side(str, enum.Enum):
    L = "l"
    Q = "q"


def band_index(xi: float):
    """The n with xi in (2^-n, 2^(-n+1)], or None outside (0, 1]."""
    if not 0.0 < xi <= 1.0:
        return None
    mantissa, exponent = math.frexp(xi)
    return 2 - exponent if mantissa == 0.5 else 1 - exponent


def band_indices(xi):
    """Vectorized band_index; 0 marks points outside (0, 1]."""
    xi = np.asarray(xi, dtype=float)
    valid = (xi > 0.0) & (xi <= 1.0)
    mantissa, exponent = np.frexp(np.where(valid, xi, 1.0))
    n = np.where(mantissa == 0.5, 2 - exponent, 1 - exponent)
    return np.where(valid, n, 0)


def band_edges(n: int):
    return 2.0 ** (-n), 2.0 ** (-n + 1)


def building_block(n: int, key: tuple, fiber: FiberKind) -> TensorAtom:
    """f_n tensor e_{k,l} on the line, f_n tensor e_{0,l} on the circle."""
    if n < 1:
        raise RangeError(f"band index must be >= 1, got {n}")
    a, b = band_edges(n)
    if fiber is FiberKind.LINE:
        k, l = key
        return line_atom(1.0, a, b, k, k + 1, freq=l)
    (l,) = key
    return circle_atom(1.0, a, b, freq=l)


def shannon_atom(k: int, m: int) -> TensorAtom:
    """
    psi^S_(k,m)(xi) = 2^(k/2) 1_(1,2](2^k xi) exp(2 pi i 2^k m xi); radial
    only, carried on the circle fiber with frequency 0.
    """
    return shannon_tensor_atom(k, m, 0)


def shannon_tensor_atom(k: int, m: int, l: int) -> TensorAtom:
    return circle_atom(
        2.0 ** (k / 2.0),
        2.0 ** (-k),
        2.0 ** (-k + 1),
        freq=l,
        lin_phase=2.0 ** k * m,
    )


@dataclass(frozen=True)
class LazyShannonLift:
    bijection: Bijection
    fiber: FiberKind = FiberKind.LINE
    side: Side = Side.L
    _atoms: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    def __post_init__(self):
        needed = 2 if self.fiber is FiberKind.LINE else 1
        if self.bijection.arity != needed:
            raise ValueError(f"a {self.fiber.value} lift needs a bijection on {needed}-tuples")

    @property
    def label(self) -> str:
        prefix = "Upsi" if self.side is Side.Q else "psi"
        return f"{prefix}^{self.bijection.name}"

    def key(self, n: int) -> tuple:
        return tuple(self.bijection.inverse(n))

    def band_atom(self, n: int) -> TensorAtom:
        """Band n's atom, built once; the cache is shared by worker threads."""
        with self._lock:
            atom = self._atoms.get(n)
            if atom is None:
                atom = building_block(n, self.key(n), self.fiber)
                if self.side is Side.Q:
                    atom = apply_U(AtomSum((atom,), self.fiber)).atoms[0]
                self._atoms[n] = atom
        return atom

    def band_of(self, x: float):
        x = float(x)
        if not x > 0.0:
            return None
        return band_index(x * x if self.side is Side.Q else x)

    def term_at(self, x: float):
        """The single atom covering x, or None (zero) beyond the support."""
        n = self.band_of(x)
        return None if n is None else self.band_atom(n)

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        xi = x * x if self.side is Side.Q else x
        n = band_indices(xi)
        out = np.zeros(x.shape, dtype=complex)
        for band in np.unique(n[n > 0]):
            mask = n == band
            out[mask] = eval_atom(self.band_atom(int(band)), x[mask], y[mask])
        return out

    def keys_in_box(self, N: int):
        N = int(N)
        if N < 0:
            raise ValueError("truncation size must be >= 0")
        if self.fiber is FiberKind.LINE:
            return [(k, l) for k in range(-N, N + 1) for l in range(-N, N + 1)]
        return [(l,) for l in range(-N, N + 1)]

    def partial_sum(self, N: int) -> AtomSum:
        """S_N: the terms with |k|, |l| <= N (|l| <= N on the circle)."""
        bands = [self.bijection.forward(key) for key in self.keys_in_box(N)]
        return AtomSum(tuple(self.band_atom(n) for n in bands), self.fiber)

    def included_bands(self, N: int):
        return sorted(self.bijection.forward(key) for key in self.keys_in_box(N))

    def band_truncation(self, n_max: int) -> AtomSum:
        """The first n_max bands; norm squared is 1 - 2^-n_max."""
        return AtomSum(tuple(self.band_atom(n) for n in range(1, int(n_max) + 1)), self.fiber)

    def radial_breaks(self, n_max: int):
        edges = sorted({e for n in range(1, n_max + 1) for e in band_edges(n)})
        if self.side is Side.Q:
            edges = [math.sqrt(e) for e in edges]
        return tuple(edges)

    def evaluator(self, y_box=None, n_max: int = 48) -> PointEvaluator:
        """Pointwise view for quadrature; radial breaks cover the first n_max bands."""
        if self.fiber is FiberKind.CIRCLE:
            y_box, y_breaks = (0.0, 1.0), ()
        else:
            y_box = tuple(y_box) if y_box is not None else (-math.inf, math.inf)
            y_breaks = ()
            if all(math.isfinite(v) for v in y_box):
                y_breaks = tuple(float(v) for v in range(math.ceil(y_box[0]), math.floor(y_box[1]) + 1))
        top_freq = max(abs(self.band_atom(n).fiber.freq) for n in range(1, n_max + 1))
        return PointEvaluator(
            domain=Domain.HALF_PLANE,
            rule=self,
            support=SupportBox((0.0, 1.0), y_box),
            fiber=self.fiber,
            breaks=(self.radial_breaks(n_max), y_breaks),
            freq_hint=(0.0, top_freq),
            label=self.label,
        )


def canonical_lift(fiber: FiberKind = FiberKind.LINE) -> LazyShannonLift:
    return LazyShannonLift(DR if fiber is FiberKind.LINE else DT, fiber)


def lifted_generator_q(lift: LazyShannonLift) -> LazyShannonLift:
    """U psi^D, evaluated term by term."""
    if lift.side is Side.Q:
        return lift
    return replace(lift, side=Side.Q, _atoms={}, _lock=threading.Lock())


def generator_J(case: CaseTag, lift: LazyShannonLift, y_box=None) -> PointEvaluator:
    """psi^{J,D} = (U^J)^-1 U psi^D; half-plane for I and II, Cartesian for III and IV."""
    if case.kind not in (CaseKind.I, CaseKind.II, CaseKind.III, CaseKind.IV):
        raise CaseMismatch(f"{case.label} has no chart generator")
    wanted = FiberKind.CIRCLE if case.kind is CaseKind.III else FiberKind.LINE
    if lift.fiber is not wanted:
        raise CaseMismatch(f"{case.label} needs a {wanted.value} lift, got {lift.fiber.value}")
    q_side = lifted_generator_q(lift).evaluator(y_box=y_box)
    generator = apply_U_J_inv(case, q_side)
    return generator.with_rule(generator.rule, label=f"psi^{case.label},{lift.bijection.name}")
