"""Harmonic maps f = h + conj(g) on the unit disk.

Point functions accept a complex scalar, a :class:`DiskPoint` or a numpy
array of points and return a matching scalar or array.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import expr as ex
from .errors import DomainError, DomainViolation, GeometryError, NotAZero, OrderExceeded
from .sphere import DISK_GUARD, DiskPoint

NORMALIZATION_TOL = 1e-10


def _points(z) -> np.ndarray:
    if isinstance(z, DiskPoint):
        z = z.z
    arr = np.asarray(z, dtype=complex)
    if arr.size and not np.all(np.abs(arr) < 1.0):
        raise DomainError("evaluation points must lie inside the unit disk")
    return arr


def _out(arr: np.ndarray, like: np.ndarray):
    if like.ndim == 0:
        return arr.item()
    return arr


@dataclass(frozen=True, eq=False)
class HarmonicMap:
    """``f = h + conj(g)`` with ``g(z0) = 0`` at the normalization point ``z0``.

    ``z0=None`` marks a map that carries no normalization claim (for example
    ``f∘phi`` for a non-invertible phi); no check is made then.
    """

    h: ex.Expr
    g: ex.Expr = ex.ZERO
    z0: complex | None = 0j

    def __post_init__(self):
        object.__setattr__(self, "h", ex.as_expr(self.h))
        object.__setattr__(self, "g", ex.as_expr(self.g))
        if self.z0 is not None:
            z0 = DiskPoint.of(self.z0).z
            object.__setattr__(self, "z0", z0)
            gz0 = ex.evaluate(self.g, z0)
            if abs(gz0) > NORMALIZATION_TOL:
                raise DomainError(
                    f"g(z0) = {gz0!r} violates the normalization g(z0) = 0 at z0 = {z0!r}"
                )

    @cached_property
    def dh(self) -> ex.Expr:
        return ex.derivative(self.h)

    @cached_property
    def dg(self) -> ex.Expr:
        return ex.derivative(self.g)

    def __call__(self, z):
        return eval_f(self, z)

    def to_dict(self) -> dict:
        d = {"h": self.h.to_dict(), "g": self.g.to_dict()}
        if self.z0 is not None and self.z0 != 0:
            d["z0"] = [self.z0.real, self.z0.imag]
        return d

    def __repr__(self):
        return f"HarmonicMap(h={self.h!r}, g={self.g!r})"


def map_from_dict(d: dict) -> HarmonicMap:
    """Build a map from the map JSON object ``{"h": ..., "g": ...}``."""
    if not isinstance(d, dict) or "h" not in d:
        raise DomainError("map JSON needs an 'h' field")
    g = ex.from_dict(d["g"]) if "g" in d else ex.ZERO
    z0 = ex._num(d["z0"]) if "z0" in d else 0j
    return HarmonicMap(ex.from_dict(d["h"]), g, z0)


def load_map(path) -> HarmonicMap:
    with open(Path(path), encoding="utf-8") as fh:
        return map_from_dict(json.load(fh))


def eval_f(f: HarmonicMap, z):
    """``h(z) + conj(g(z))``."""
    arr = _points(z)
    out = ex.evaluate(f.h, arr) + np.conj(ex.evaluate(f.g, arr))
    return _out(np.asarray(out), arr)


def _derivative_moduli(f: HarmonicMap, arr: np.ndarray):
    return np.abs(ex.evaluate(f.dh, arr)), np.abs(ex.evaluate(f.dg, arr))


def spherical_quotient(num: np.ndarray, fval: np.ndarray) -> np.ndarray:
    """``num / (1 + |f|^2)``, stable when |f| overflows."""
    s = np.abs(fval)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        big = s > 1.0
        out = np.where(big, (num / s) / (s + 1.0 / s), num / (1.0 + s * s))
    # inf / inf: the map has escaped to infinity faster than its derivative
    return np.where(np.isnan(out), 0.0, out)


def spherical_derivative(f: HarmonicMap, z):
    """``(|h'| + |g'|) / (1 + |f|^2)``."""
    arr = _points(z)
    a, b = _derivative_moduli(f, arr)
    with np.errstate(over="ignore", invalid="ignore"):
        fval = ex.evaluate(f.h, arr) + np.conj(ex.evaluate(f.g, arr))
    return _out(spherical_quotient(a + b, np.asarray(fval)), arr)


def jacobian(f: HarmonicMap, z):
    """``|h'|^2 - |g'|^2``."""
    arr = _points(z)
    a, b = _derivative_moduli(f, arr)
    return _out(a * a - b * b, arr)


class SenseCheck(NamedTuple):
    ok: bool
    witness: complex | None


def sense_preserving_sample(f: HarmonicMap, grid) -> SenseCheck:
    """Check ``J_f > 0`` and ``h' != 0`` on the level-0 grid of ``grid``.

    This is a sampled check, never a certificate. On failure the witness is
    the failing sample closest to the origin.
    """
    from .search import polar_grid

    pts = polar_grid(grid)
    a, b = _derivative_moduli(f, pts)
    bad = ~((a * a - b * b > 0) & (a > 0))
    if not bad.any():
        return SenseCheck(True, None)
    cand = pts[bad]
    order = np.lexsort((np.mod(np.angle(cand), 2 * np.pi), np.abs(cand)))
    return SenseCheck(False, complex(cand[order[0]]))


def _disk_sample(n: int = 400) -> np.ndarray:
    r = np.sqrt(np.linspace(0.0, 0.999, 20))
    th = np.linspace(0, 2 * np.pi, n // 20, endpoint=False)
    return (r[:, None] * np.exp(1j * th[None, :])).ravel()


def precompose(f: HarmonicMap, phi: ex.Expr, renormalize: bool = False, check_domain: bool = False) -> HarmonicMap:
    """``f∘phi = h∘phi + conj(g∘phi)`` for analytic ``phi`` mapping the disk into itself.

    With ``renormalize=True`` the constant ``g(phi(z0))`` is subtracted from
    ``G`` so that ``G(z0) = 0``; this shifts the map by a constant. By
    default ``G = g∘phi`` exactly and the normalization point is pulled back
    through phi when phi is a Mobius map (otherwise the result carries none).
    """
    if check_domain:
        vals = ex.evaluate(phi, _disk_sample())
        if not np.all(np.abs(vals) < 1.0):
            raise DomainViolation(f"{phi!r} leaves the unit disk on the debug sample")
    H = ex.compose(f.h, phi)
    G = ex.compose(f.g, phi)
    if renormalize:
        z0 = 0j if f.z0 is None else f.z0
        shift = ex.evaluate(f.g, ex.evaluate(phi, z0))
        return HarmonicMap(H, ex.add(G, ex.Const(-shift)), z0)
    if f.z0 is None:
        return HarmonicMap(H, G, None)
    if isinstance(phi, ex.Mobius):
        back = ex.evaluate(phi.inverse(), f.z0)
        if abs(back) < DISK_GUARD:
            return HarmonicMap(H, G, back)
    if isinstance(phi, ex.Identity):
        return HarmonicMap(H, G, f.z0)
    if abs(ex.evaluate(G, f.z0)) <= NORMALIZATION_TOL:
        return HarmonicMap(H, G, f.z0)
    return HarmonicMap(H, G, None)


@dataclass(frozen=True)
class PathPolyline:
    """Polyline in the disk; only the last vertex may touch the unit circle."""

    vertices: tuple

    def __post_init__(self):
        v = tuple(complex(p) for p in self.vertices)
        if len(v) < 2:
            raise GeometryError("a path needs at least two vertices")
        for p, q in zip(v, v[1:]):
            if p == q:
                raise GeometryError("consecutive path vertices must differ")
        if any(not abs(p) < 1.0 for p in v[:-1]):
            raise GeometryError("all vertices but the last must lie inside the disk")
        if abs(v[-1]) > 1.0 + 1e-12:
            raise GeometryError("the last vertex must lie in the closed disk")
        object.__setattr__(self, "vertices", v)

    @property
    def ends_on_circle(self) -> bool:
        return abs(abs(self.vertices[-1]) - 1.0) <= 1e-12

    @property
    def length(self) -> float:
        v = np.asarray(self.vertices)
        return float(np.sum(np.abs(np.diff(v))))

    @property
    def diameter(self) -> float:
        v = np.asarray(self.vertices)
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    def point_at(self, s) -> np.ndarray:
        """Points at arclength positions ``s`` (clipped to the path)."""
        v = np.asarray(self.vertices)
        seg = np.abs(np.diff(v))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = np.clip(np.asarray(s, dtype=float), 0.0, cum[-1])
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
        frac = (s - cum[k]) / seg[k]
        return v[k] + frac * (v[k + 1] - v[k])


def spherical_arc_length(f: HarmonicMap, path: PathPolyline, quad_points: int = 200) -> float:
    """Composite-midpoint quadrature of the integral of ``f^#`` along the path.

    This is the upper bound for the spherical length of ``f(path)``.
    """
    if quad_points < 1:
        raise DomainError("quad_points must be positive")
    v = np.asarray(path.vertices)
    if not np.all(np.abs(v) < 1.0):
        raise GeometryError("arc length needs a path interior to the disk")
    total = 0.0
    u = (np.arange(quad_points) + 0.5) / quad_points
    for p, q in zip(v, v[1:]):
        mids = p + u * (q - p)
        total += float(np.sum(spherical_derivative(f, mids))) * abs(q - p) / quad_points
    return total


@dataclass(frozen=True)
class ZeroOrder:
    order: int | None
    h_order: int | None
    g_order: int | None
    degenerate: bool


def taylor_coefficients(e: ex.Expr, z0: complex, max_order: int) -> list[complex]:
    """``[c_1, ..., c_max_order]`` with ``c_k = e^(k)(z0) / k!``."""
    out, d, fact = [], e, 1.0
    for k in range(1, max_order + 1):
        d = ex.derivative(d)
        fact *= k
        out.append(complex(ex.evaluate(d, z0)) / fact)
    return out


def zero_order(f: HarmonicMap, z0, max_order: int = 8, threshold: float = 1e-9) -> ZeroOrder:
    """Order ``min(m, n)`` of the zero of ``f`` at ``z0``.

    ``m`` and ``n`` index the first Taylor coefficients of ``h`` and ``g`` at
    ``z0`` larger than ``threshold``. When ``m == n`` and the two
    coefficients have equal modulus the order is undefined and the result is
    flagged ``degenerate``. Fragile close to that case.
    """
    z0 = DiskPoint.of(z0).z
    if abs(eval_f(f, z0)) > 1e-10:
        raise NotAZero(f"|f(z0)| = {abs(eval_f(f, z0)):.3g} > 1e-10")
    a = taylor_coefficients(f.h, z0, max_order)
    b = taylor_coefficients(f.g, z0, max_order)
    m = next((k + 1 for k, c in enumerate(a) if abs(c) > threshold), None)
    n = next((k + 1 for k, c in enumerate(b) if abs(c) > threshold), None)
    if m is None and n is None:
        raise OrderExceeded(f"no Taylor coefficient above {threshold} up to order {max_order}")
    if m is None or n is None:
        return ZeroOrder(m if n is None else n, m, n, False)
    if m != n:
        return ZeroOrder(min(m, n), m, n, False)
    am, bn = abs(a[m - 1]), abs(b[n - 1])
    if abs(am - bn) <= threshold * max(am, bn):
        return ZeroOrder(None, m, n, True)
    return ZeroOrder(m, m, n, False)


def lambda_star(lam: complex, alpha: complex, h0: complex) -> complex:
    """Value ``h`` must take for the constant-dilatation map to equal ``lam``.

    For ``f = h + conj(alpha h - alpha h0)``, ``f(z) = lam`` iff
    ``h(z) = lambda_star(lam, alpha, h0)``.
    """
    lam, alpha, h0 = complex(lam), complex(alpha), complex(h0)
    if not abs(alpha) < 1.0:
        raise DomainError("|alpha| must be < 1")
    num = lam - (alpha * lam).conjugate() + (alpha * h0).conjugate() - abs(alpha) ** 2 * h0
    return num / (1.0 - abs(alpha) ** 2)


def constant_dilatation(h: ex.Expr, alpha: complex) -> HarmonicMap:
    """``h + conj(alpha h - alpha h(0))``: dilatation identically ``alpha``."""
    alpha = complex(alpha)
    h0 = complex(ex.evaluate(h, 0))
    g = ex.add(ex.mul(ex.Const(alpha), h), ex.Const(-alpha * h0))
    return HarmonicMap(h, g, 0j)


def warn_if_not_sense_preserving(f: HarmonicMap, grid) -> SenseCheck:
    check = sense_preserving_sample(f, grid)
    if not check.ok:
        warnings.warn(
            f"map is not sense-preserving on the sample grid (witness {check.witness})",
            NotSensePreservingWarning,
            stacklevel=3,
        )
    return check


class NotSensePreservingWarning(UserWarning):
    pass
