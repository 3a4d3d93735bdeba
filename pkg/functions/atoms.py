"""
Closed-form tensor atoms on R+ x Y and their finite sums.

An atom is

    coeff * r**p * 1_(a,b](r) * exp(2*pi*i*u*r + pi*i*v*r**2) * fiber(y)

where the fiber factor is 1_(c,d](y) * exp(2*pi*i*l*y) on the line and
exp(2*pi*i*l*y) on the circle [0, 1). Intervals are half-open: the left
endpoint is excluded and the right one included.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import UnsupportedAction


class FiberKind(str, enum.Enum):
    LINE = "line"
    CIRCLE = "circle"


@dataclass(frozen=True)
class RadialFactor:
    power: float = 0.0
    a: float = 0.0
    b: float = 1.0
    lin_phase: float = 0.0
    quad_phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0.0):
            raise ValueError(f"radial interval start must be finite and >= 0, got {self.a}")
        if not self.a < self.b:
            raise ValueError(f"empty radial interval ({self.a}, {self.b}]")
        if math.isinf(self.b) and not self.power < -0.5:
            raise ValueError("an unbounded radial interval needs power < -1/2")
        for name in ("power", "lin_phase", "quad_phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def max_frequency(self) -> float:
        """Largest local frequency (cycles per unit r) on the support."""
        top = self.b if math.isfinite(self.b) else max(self.a, 1.0)
        return abs(self.lin_phase) + abs(self.quad_phase) * top

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > self.a) & (r <= self.b)
        safe = np.where(inside, r, 1.0)
        phase = 2.0 * np.pi * self.lin_phase * safe + np.pi * self.quad_phase * safe ** 2
        values = safe ** self.power * np.exp(1j * phase)
        return np.where(inside, values, 0.0 + 0.0j)


@dataclass(frozen=True)
class FiberFactor:
    freq: float = 0.0
    c: float | None = None
    d: float | None = None

    @property
    def has_interval(self) -> bool:
        return self.c is not None

    def evaluate(self, y, kind: FiberKind):
        y = np.asarray(y, dtype=float)
        if kind is FiberKind.CIRCLE:
            return np.exp(2j * np.pi * self.freq * np.mod(y, 1.0))
        inside = (y > self.c) & (y <= self.d)
        return np.where(inside, np.exp(2j * np.pi * self.freq * y), 0.0 + 0.0j)


@dataclass(frozen=True)
class TensorAtom:
    coeff: complex
    radial: RadialFactor
    fiber: FiberFactor = field(default_factory=FiberFactor)
    domain: FiberKind = FiberKind.LINE

    def __post_init__(self):
        if self.domain is FiberKind.LINE:
            if not self.fiber.has_interval or self.fiber.d is None:
                raise ValueError("line fibers need an interval (c, d]")
            if not self.fiber.c < self.fiber.d:
                raise ValueError(f"empty fiber interval ({self.fiber.c}, {self.fiber.d}]")
        else:
            if self.fiber.has_interval:
                raise ValueError("circle fibers carry no interval")
            if not float(self.fiber.freq).is_integer():
                raise ValueError("circle fiber frequencies must be integers")

    def scaled(self, factor: complex) -> "TensorAtom":
        return replace(self, coeff=self.coeff * factor)


def eval_atom(atom: TensorAtom, r, y):
    """Pointwise value of one atom; exactly zero outside its supports."""
    return atom.coeff * atom.radial.evaluate(r) * atom.fiber.evaluate(y, atom.domain)


@dataclass(frozen=True)
class AtomSum:
    atoms: tuple = ()
    domain: FiberKind = FiberKind.LINE

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        for atom in self.atoms:
            if atom.domain is not self.domain:
                raise ValueError("all atoms of a sum must share the fiber domain")

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __add__(self, other: "AtomSum") -> "AtomSum":
        if self.domain is not other.domain:
            raise ValueError("cannot add sums over different fiber domains")
        return AtomSum(self.atoms + other.atoms, self.domain)

    def scaled(self, factor: complex) -> "AtomSum":
        return AtomSum(tuple(a.scaled(factor) for a in self.atoms), self.domain)

    def map(self, fn) -> "AtomSum":
        return AtomSum(tuple(fn(a) for a in self.atoms), self.domain)

    def __call__(self, r, y):
        r, y = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(y, dtype=float))
        total = np.zeros(r.shape, dtype=complex)
        for atom in self.atoms:
            total = total + eval_atom(atom, r, y)
        return total


# ----------------------------------------------------------------------
# Actions on atoms
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Dilation:
    """f -> s**(1/2) f(s r, y)."""
    s: float


@dataclass(frozen=True)
class LinearPhase:
    u: float


@dataclass(frozen=True)
class QuadraticPhase:
    v: float


@dataclass(frozen=True)
class PowerMultiply:
    """f -> scale * r**q * f."""
    q: float
    scale: float = 1.0


@dataclass(frozen=True)
class SquareSubstitution:
    """f -> f(r**2, y)."""


@dataclass(frozen=True)
class RootSubstitution:
    """f -> f(r**(1/2), y)."""


@dataclass(frozen=True)
class FiberShear:
    """(r, y) -> (r, y + slope * r); never representable by an atom."""
    slope: float


def transform_atom(atom: TensorAtom, action) -> TensorAtom:
    rad = atom.radial
    if isinstance(action, Identity):
        return atom
    if isinstance(action, Dilation):
        s = float(action.s)
        if not s > 0.0:
            raise ValueError(f"dilation needs s > 0, got {s}")
        radial = replace(
            rad,
            a=rad.a / s,
            b=rad.b / s,
            lin_phase=rad.lin_phase * s,
            quad_phase=rad.quad_phase * s * s,
        )
        return replace(atom, coeff=atom.coeff * s ** (0.5 + rad.power), radial=radial)
    if isinstance(action, LinearPhase):
        return replace(atom, radial=replace(rad, lin_phase=rad.lin_phase + action.u))
    if isinstance(action, QuadraticPhase):
        return replace(atom, radial=replace(rad, quad_phase=rad.quad_phase + action.v))
    if isinstance(action, PowerMultiply):
        return replace(
            atom,
            coeff=atom.coeff * action.scale,
            radial=replace(rad, power=rad.power + action.q),
        )
    if isinstance(action, SquareSubstitution):
        # exp(2 pi i u r^2) is the quadratic phase 2u; exp(pi i v r^4) has no atom form
        if rad.quad_phase != 0.0:
            raise UnsupportedAction("r -> r^2 turns a quadratic phase into a quartic one")
        radial = RadialFactor(
            power=2.0 * rad.power,
            a=math.sqrt(rad.a),
            b=math.sqrt(rad.b),
            lin_phase=0.0,
            quad_phase=2.0 * rad.lin_phase,
        )
        return replace(atom, radial=radial)
    if isinstance(action, RootSubstitution):
        if rad.lin_phase != 0.0:
            raise UnsupportedAction("r -> r^(1/2) turns a linear phase into exp(2 pi i u r^(1/2))")
        radial = RadialFactor(
            power=0.5 * rad.power,
            a=rad.a * rad.a,
            b=rad.b * rad.b,
            lin_phase=0.5 * rad.quad_phase,
            quad_phase=0.0,
        )
        return replace(atom, radial=radial)
    raise UnsupportedAction(f"{type(action).__name__} leaves the atom algebra")


def transform_sum(f: AtomSum, *actions) -> AtomSum:
    """Apply the actions left to right to every atom of f."""
    out = f
    for action in actions:
        out = out.map(lambda atom, act=action: transform_atom(atom, act))
    return out


def line_atom(coeff, a, b, c, d, freq=0.0, power=0.0, lin_phase=0.0, quad_phase=0.0) -> TensorAtom:
    return TensorAtom(
        coeff=complex(coeff),
        radial=RadialFactor(power=power, a=a, b=b, lin_phase=lin_phase, quad_phase=quad_phase),
        fiber=FiberFactor(freq=freq, c=c, d=d),
        domain=FiberKind.LINE,
    )


def circle_atom(coeff, a, b, freq=0, power=0.0, lin_phase=0.0, quad_phase=0.0) -> TensorAtom:
    return TensorAtom(
        coeff=complex(coeff),
        radial=RadialFactor(power=power, a=a, b=b, lin_phase=lin_phase, quad_phase=quad_phase),
        fiber=FiberFactor(freq=float(freq)),
        domain=FiberKind.CIRCLE,
    )
