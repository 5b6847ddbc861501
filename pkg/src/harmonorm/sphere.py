"""Metrics on the Riemann sphere and the unit disk.

The chordal distance uses the normalization in which antipodal points are at
distance 1 (not the chord length 2 of the unit sphere).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# |z| must stay below this for hyperbolic quantities to remain finite.
DISK_GUARD = 1.0 - 1e-15


class ExtendedComplex:
    """A point of the Riemann sphere: a finite complex number or infinity.

    Use :meth:`of` to build one from a number; ``ExtendedComplex.INF`` is the
    only representation of the point at infinity.
    """

    __slots__ = ("_value",)
    INF: "ExtendedComplex"

    def __init__(self, value=None):
        if value is not None:
            value = complex(value)
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DomainError("finite ExtendedComplex needs a finite value")
        object.__setattr__(self, "_value", value)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedComplex is immutable")

    @classmethod
    def of(cls, x) -> "ExtendedComplex":
        """Coerce a number, ``"inf"`` or an ExtendedComplex; non-finite numbers map to infinity."""
        if isinstance(x, ExtendedComplex):
            return x
        if isinstance(x, str):
            if x.strip().lower() in ("inf", "infinity", "∞"):
                return cls.INF
            x = complex(x.replace(" ", ""))
        x = complex(x)
        if math.isfinite(x.real) and math.isfinite(x.imag):
            return cls(x)
        return cls.INF

    @property
    def is_infinite(self) -> bool:
        return self._value is None

    @property
    def kind(self) -> str:
        return "infinity" if self._value is None else "finite"

    @property
    def value(self) -> complex:
        if self._value is None:
            raise DomainError("the point at infinity has no complex value")
        return self._value

    def __eq__(self, other):
        if not isinstance(other, ExtendedComplex):
            try:
                other = ExtendedComplex.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._value == other._value

    def __hash__(self):
        return hash(("ExtendedComplex", self._value))

    def __repr__(self):
        return "ExtendedComplex(inf)" if self._value is None else f"ExtendedComplex({self._value!r})"

    def to_json(self):
        if self._value is None:
            return "inf"
        return [self._value.real, self._value.imag]


ExtendedComplex.INF = ExtendedComplex()


@dataclass(frozen=True)
class DiskPoint:
    """A point strictly inside the unit disk."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < DISK_GUARD:
            raise DomainError(f"|z| = {abs(z)!r} is not inside the unit disk")
        object.__setattr__(self, "z", z)

    def __complex__(self):
        return self.z

    @classmethod
    def of(cls, x) -> "DiskPoint":
        return x if isinstance(x, DiskPoint) else cls(complex(x))


@dataclass(frozen=True)
class StolzAngle:
    """Symmetric sector at the boundary point ``xi`` with half-angle ``opening``."""

    xi: complex
    opening: float

    def __post_init__(self):
        xi = complex(self.xi)
        if abs(abs(xi) - 1.0) > 1e-12:
            raise DomainError("Stolz angle vertex must lie on the unit circle")
        if not 0.0 < self.opening < math.pi / 2:
            raise DomainError("opening must lie in (0, pi/2)")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "opening", float(self.opening))


def _as_complex(p) -> complex:
    return p.z if isinstance(p, DiskPoint) else complex(p)


def chordal_distance(a, b) -> float:
    """Chordal distance between two points of the Riemann sphere (maximum 1)."""
    a = ExtendedComplex.of(a)
    b = ExtendedComplex.of(b)
    if a == b:
        return 0.0
    if a.is_infinite:
        a, b = b, a
    if b.is_infinite:
        return 1.0 / math.hypot(1.0, abs(a.value))
    x, y = a.value, b.value
    if abs(y) > abs(x):
        x, y = y, x
    if abs(x) <= 1.0:
        return abs(x - y) / (math.hypot(1.0, abs(x)) * math.hypot(1.0, abs(y)))
    # divide through by |x| so huge finite values do not overflow
    return abs(1.0 - y / x) / (math.hypot(1.0, 1.0 / abs(x)) * math.hypot(1.0, abs(y)))


def chordal_array(a, b) -> np.ndarray:
    """Vectorized chordal distance; non-finite entries stand for infinity."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    a_inf = ~np.isfinite(a)
    b_inf = ~np.isfinite(b)
    out = np.empty(a.shape, dtype=float)
    both = ~a_inf & ~b_inf
    x, y = a[both], b[both]
    swap = np.abs(y) > np.abs(x)
    x, y = np.where(swap, y, x), np.where(swap, x, y)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.abs(x - y) / (np.hypot(1.0, ax) * np.hypot(1.0, np.abs(y)))
        large = np.abs(1.0 - y / x) / (np.hypot(1.0, 1.0 / ax) * np.hypot(1.0, np.abs(y)))
    out[both] = np.where(ax <= 1.0, small, large)
    one = a_inf ^ b_inf
    fin = np.where(a_inf, b, a)[one]
    out[one] = 1.0 / np.hypot(1.0, np.abs(fin))
    out[a_inf & b_inf] = 0.0
    return out


def pseudo_hyperbolic(z1, z2) -> float:
    """|z1 - z2| / |1 - conj(z1) z2| for two disk points."""
    z1 = DiskPoint.of(z1).z
    z2 = DiskPoint.of(z2).z
    return abs(z1 - z2) / abs(1.0 - z1.conjugate() * z2)


def hyperbolic_distance(z1, z2) -> float:
    """Half-log hyperbolic distance 0.5 * log((1 + r) / (1 - r))."""
    r = pseudo_hyperbolic(z1, z2)
    return 0.5 * (math.log1p(r) - math.log1p(-r))


def pseudo_hyperbolic_array(z1, z2) -> np.ndarray:
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return np.abs(z1 - z2) / np.abs(1.0 - np.conj(z1) * z2)


def stolz_contains(angle: StolzAngle, z) -> bool:
    """True when ``z`` lies in the open Stolz angle."""
    z = _as_complex(z)
    if not abs(z) < 1.0:
        return False
    return abs(cmath.phase(1.0 - angle.xi.conjugate() * z)) < angle.opening
