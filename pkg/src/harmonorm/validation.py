"""Input checks and parsers shared by the estimators and the command line."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .sphere import ExtendedComplex


def parse_complex(text: str) -> complex:
    """``"re,im"``, ``"re"`` or a Python complex literal such as ``"0.25j"``."""
    s = text.strip()
    if "," in s:
        parts = s.split(",")
        if len(parts) != 2:
            raise DomainError(f"cannot parse complex value {text!r}")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise DomainError(f"cannot parse complex value {text!r}") from None
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise DomainError(f"cannot parse complex value {text!r}") from None


def parse_extended(text: str) -> ExtendedComplex:
    if text.strip().lower() in ("inf", "infinity"):
        return ExtendedComplex.INF
    return ExtendedComplex.of(parse_complex(text))


def parse_value_list(text: str) -> list[ExtendedComplex]:
    """Semicolon-separated values, e.g. ``"0,0;0.25,0;inf"``."""
    items = [t for t in text.split(";") if t.strip()]
    return [parse_extended(t) for t in items]


def check_disk_points(z, name: str = "z") -> np.ndarray:
    """Complex array with every entry strictly inside the unit disk."""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    if arr.size and not np.all(np.abs(arr) < 1.0):
        raise DomainError(f"{name} must lie inside the unit disk")
    return arr


def check_unit(xi, name: str = "xi") -> complex:
    xi = complex(xi)
    if abs(abs(xi) - 1.0) > 1e-12:
        raise DomainError(f"{name} must have modulus 1")
    return xi


def check_positive(x, name: str) -> float:
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"{name} must be a positive real")
    return x


def check_positive_int(n, name: str) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"{name} must be a positive integer")
    return int(n)
