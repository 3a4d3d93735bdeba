"""
Bijections Z x Z -> N and Z -> N labelling the dyadic bands of a Shannon lift.

The canonical choices are the zig-zag enumeration of Z followed, for pairs,
by Cantor pairing, shifted so the image starts at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exceptions import RangeError


def zig(k: int) -> int:
    """0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ..."""
    k = int(k)
    return 2 * k - 1 if k > 0 else -2 * k


def unzig(n: int) -> int:
    n = int(n)
    if n < 0:
        raise RangeError(f"zig-zag index must be >= 0, got {n}")
    return (n + 1) // 2 if n % 2 else -(n // 2)


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(z: int):
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def canonical_D_R(k: int, l: int) -> int:
    return cantor_pair(zig(k), zig(l)) + 1


def canonical_D_R_inv(n: int):
    n = int(n)
    if n < 1:
        raise RangeError(f"band index must be >= 1, got {n}")
    a, b = cantor_unpair(n - 1)
    return unzig(a), unzig(b)


def canonical_D_T(l: int) -> int:
    return zig(l) + 1


def canonical_D_T_inv(n: int) -> int:
    n = int(n)
    if n < 1:
        raise RangeError(f"band index must be >= 1, got {n}")
    return unzig(n - 1)


class Bijection:
    """Keys are (k, l) pairs for D_R and (l,) one-tuples for D_T."""
    arity = 2
    name = ""

    def forward(self, key) -> int:
        raise NotImplementedError

    def inverse(self, n: int) -> tuple:
        raise NotImplementedError


class CanonicalDR(Bijection):
    arity = 2
    name = "DR"

    def forward(self, key) -> int:
        k, l = key
        return canonical_D_R(k, l)

    def inverse(self, n: int) -> tuple:
        return canonical_D_R_inv(n)


class CanonicalDT(Bijection):
    arity = 1
    name = "DT"

    def forward(self, key) -> int:
        (l,) = key
        return canonical_D_T(l)

    def inverse(self, n: int) -> tuple:
        return (canonical_D_T_inv(n),)


@dataclass
class TableBijection(Bijection):
    """
    A user override: a permutation of the canonical values on a finite box
    of keys, canonical outside the box.
    """
    base: Bijection
    box: tuple
    table: dict = field(default_factory=dict)

    def __post_init__(self):
        self.arity = self.base.arity
        self.name = f"{self.base.name}+table"
        self.table = {tuple(int(v) for v in key): int(n) for key, n in self.table.items()}
        if len(self.box) != self.arity:
            raise RangeError(f"box needs {self.arity} ranges, got {len(self.box)}")
        keys = set(self.box_keys())
        if set(self.table) != keys:
            missing = sorted(keys - set(self.table))[:3]
            extra = sorted(set(self.table) - keys)[:3]
            raise RangeError(f"table must cover the box exactly (missing {missing}, outside {extra})")
        values = list(self.table.values())
        if len(set(values)) != len(values):
            raise RangeError("table is not injective")
        canonical = {self.base.forward(key) for key in keys}
        if set(values) != canonical:
            raise RangeError("table values must be a permutation of the box's canonical values")
        self._back = {n: key for key, n in self.table.items()}

    def box_keys(self):
        ranges = [range(int(lo), int(hi) + 1) for lo, hi in self.box]
        if self.arity == 1:
            return [(v,) for v in ranges[0]]
        return [(k, l) for k in ranges[0] for l in ranges[1]]

    def forward(self, key) -> int:
        key = tuple(int(v) for v in key)
        if key in self.table:
            return self.table[key]
        return self.base.forward(key)

    def inverse(self, n: int) -> tuple:
        if int(n) < 1:
            raise RangeError(f"band index must be >= 1, got {n}")
        if int(n) in self._back:
            return self._back[int(n)]
        return tuple(self.base.inverse(n))


DR = CanonicalDR()
DT = CanonicalDT()
