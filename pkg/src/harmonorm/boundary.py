"""Boundary limits: asymptotic values along paths, radial and angular limits.

A probe samples f at arclength positions ``L (1 - 2^-k)`` along a path ending
on the unit circle and looks at the chordal diameter of the last quarter of
the samples. Limits found this way are estimates, not certificates.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError
from .harmonic import HarmonicMap, PathPolyline
from .normality import _f_values, tail_slice
from .sphere import ExtendedComplex, chordal_array, chordal_distance

RADIUS_CAP = 1.0 - 1e-12


@dataclass
class LimitProbe:
    value: ExtendedComplex | None  # None means divergent
    tail_spread: float
    samples_used: int
    tail: list = field(default_factory=list, repr=False)

    @property
    def divergent(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {
            "value": None if self.value is None else self.value.to_json(),
            "divergent": self.divergent,
            "tail_spread": self.tail_spread,
            "samples_used": self.samples_used,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_tail_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["z_re", "z_im", "f_re", "f_im"])
            for z, v in self.tail:
                w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(v.real)), repr(float(v.imag))])


def _unit(xi) -> complex:
    xi = complex(xi)
    if abs(abs(xi) - 1.0) > 1e-12:
        raise GeometryError("xi must lie on the unit circle")
    return xi


def path_samples(path: PathPolyline, n_samples: int) -> np.ndarray:
    """Points at ``L (1 - 2^-k)``, k = 1..n_samples, keeping those with ``|z| <= 1 - 1e-12``."""
    s = path.length * (1.0 - 2.0 ** -np.arange(1, n_samples + 1))
    pts = path.point_at(s)
    pts = pts[np.abs(pts) <= RADIUS_CAP]
    # near the end the arclength steps fall below rounding; drop repeats
    keep = np.concatenate([[True], np.diff(pts) != 0])
    return pts[keep]


def asymptotic_value(f: HarmonicMap, path: PathPolyline, n_samples: int = 40, tol: float = 1e-6) -> LimitProbe:
    """Limit of f along a path that ends on the unit circle."""
    if not path.ends_on_circle:
        raise GeometryError("the path must end on the unit circle")
    if n_samples < 4:
        raise DomainError("n_samples must be at least 4")
    pts = path_samples(path, n_samples)
    if pts.size < 4:
        raise GeometryError("too few samples inside the radius cap")
    vals = _f_values(f, pts)
    tail = tail_slice(pts.size)
    tv = vals[tail]
    spread = float(np.max(chordal_array(tv[:, None], tv[None, :])))
    tail_rows = list(zip(pts[tail], tv))
    if not spread < tol:
        return LimitProbe(None, spread, int(pts.size), tail_rows)
    to_inf = chordal_array(tv, np.inf)
    if np.all(to_inf < tol):
        return LimitProbe(ExtendedComplex.INF, spread, int(pts.size), tail_rows)
    return LimitProbe(ExtendedComplex.of(tv[-1]), spread, int(pts.size), tail_rows)


def radial_limit(f: HarmonicMap, xi, n_samples: int = 40, tol: float = 1e-6) -> LimitProbe:
    xi = _unit(xi)
    return asymptotic_value(f, PathPolyline((0j, xi)), n_samples, tol)


def stolz_rays(xi: complex, opening: float) -> list[PathPolyline]:
    """Rays ``xi (1 - s e^{i psi})`` for ``psi`` in ``{-opening/2, 0, opening/2}``."""
    out = []
    for psi in (-opening / 2, 0.0, opening / 2):
        start = xi * (1.0 - math.cos(psi) * np.exp(1j * psi))
        out.append(PathPolyline((complex(start), xi)))
    return out


def angular_limit(f: HarmonicMap, xi, openings, n_samples: int = 40, tol: float = 1e-6) -> LimitProbe:
    """Common limit along rays inside Stolz angles of each opening."""
    xi = _unit(xi)
    openings = list(openings)
    if not openings:
        raise DomainError("need at least one opening")
    for o in openings:
        if not 0.0 < o < math.pi / 2:
            raise GeometryError("Stolz openings must lie in (0, pi/2)")
    probes = [asymptotic_value(f, ray, n_samples, tol) for o in openings for ray in stolz_rays(xi, o)]
    used = sum(p.samples_used for p in probes)
    spread = max(p.tail_spread for p in probes)
    tail = [row for p in probes for row in p.tail]
    if any(p.divergent for p in probes):
        return LimitProbe(None, spread, used, tail)
    ref = probes[0].value
    gap = max(chordal_distance(ref, p.value) for p in probes)
    spread = max(spread, gap)
    if not gap < tol:
        return LimitProbe(None, spread, used, tail)
    return LimitProbe(ref, spread, used, tail)


@dataclass
class AgreementResult:
    agrees: bool
    asymptotic: LimitProbe
    angular: LimitProbe
    normal_evidence: str

    def to_dict(self) -> dict:
        return {
            "agrees": self.agrees,
            "asymptotic": self.asymptotic.to_dict(),
            "angular": self.angular.to_dict(),
            "normal_evidence": self.normal_evidence,
        }


def asymptotic_equals_angular(f: HarmonicMap, xi, path: PathPolyline, openings, tol: float = 1e-6,
                              n_samples: int = 40, normal_evidence: str = "unknown") -> AgreementResult:
    """Compare the asymptotic value along ``path`` with the angular limit at ``xi``.

    ``normal_evidence`` is recorded as given by the caller; the agreement
    is only expected when f is normal.
    """
    xi = _unit(xi)
    if abs(path.vertices[-1] - xi) > 1e-12:
        raise GeometryError("the path must end at xi")
    asym = asymptotic_value(f, path, n_samples, tol)
    ang = angular_limit(f, xi, openings, n_samples, tol)
    agrees = not asym.divergent and not ang.divergent and chordal_distance(asym.value, ang.value) < tol
    return AgreementResult(bool(agrees), asym, ang, normal_evidence)
