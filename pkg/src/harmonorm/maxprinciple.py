"""Quantitative maximum principle on lens-shaped domains and the collapse test.

With ``kappa = alpha beta / sin(beta)`` and
``b(t) = t exp(-kappa/2 (t + 1/t))``, the bound ``eta`` solves
``b(eta) = delta`` on the increasing branch ``(0, t0)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DeltaTooLarge, DomainError, GeometryError
from .harmonic import HarmonicMap, PathPolyline
from .normality import _f_values, normality_constant, tail_slice, warn_if_exceeds
from .search import GridConfig


@dataclass(frozen=True)
class LensConfig:
    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not 0.0 < self.beta < math.pi:
            raise DomainError("beta must lie in (0, pi)")
        if not self.delta >= 0:
            raise DomainError("delta must be nonnegative")

    @property
    def kappa(self) -> float:
        return kappa(self.alpha, self.beta)


def kappa(alpha: float, beta: float) -> float:
    if not alpha > 0 or not 0.0 < beta < math.pi:
        raise DomainError("need alpha > 0 and 0 < beta < pi")
    return alpha * beta / math.sin(beta)


def b_function(t, k: float):
    """``t exp(-k/2 (t + 1/t))``; accepts scalars or arrays."""
    if not k > 0:
        raise DomainError("kappa must be positive")
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("b is defined for t > 0")
    out = arr * np.exp(-0.5 * k * (arr + 1.0 / arr))
    return float(out) if out.ndim == 0 else out


def t0(k: float) -> float:
    """Maximizer of b: ``(1 + sqrt(1 + k^2)) / k``."""
    if not k > 0:
        raise DomainError("kappa must be positive")
    return (1.0 + math.sqrt(1.0 + k * k)) / k


def delta0(k: float) -> float:
    """``b(t0)``."""
    return b_function(t0(k), k)


def delta0_closed(k: float) -> float:
    """``(1 + sqrt(1 + k^2)) exp(-sqrt(1 + k^2)) / k``, using ``t0 + 1/t0 = 2 sqrt(1 + k^2) / k``."""
    if not k > 0:
        raise DomainError("kappa must be positive")
    s = math.sqrt(1.0 + k * k)
    return (1.0 + s) * math.exp(-s) / k


def solve_eta(delta: float, k: float) -> float:
    """Root of ``b(eta) = delta`` in ``[0, t0)``; ``eta = 0`` at ``delta = 0``."""
    if not delta >= 0:
        raise DomainError("delta must be nonnegative")
    d0 = delta0(k)
    if delta >= d0:
        raise DeltaTooLarge(delta, d0)
    if delta == 0:
        return 0.0
    top = t0(k)
    # b underflows to 0 well before t = 1e-300, so the bracket is valid
    lo = 1e-300
    eta = brentq(lambda t: b_function(t, k) - delta, lo, top, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(eta)


# -- geometry --

def point_in_polygon(points, vertices) -> np.ndarray:
    """Even-odd rule; ``vertices`` is a closed ring given without repeating the first point."""
    p = np.asarray(points, dtype=complex).ravel()
    v = np.asarray(vertices, dtype=complex)
    x, y = p.real[:, None], p.imag[:, None]
    x1, y1 = v.real[None, :], v.imag[None, :]
    v2 = np.roll(v, -1)
    x2, y2 = v2.real[None, :], v2.imag[None, :]
    crosses = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hit = crosses & (x < xint)
    return (np.count_nonzero(hit, axis=1) % 2) == 1


def _sagitta(chord, radius) -> float:
    if not math.isfinite(radius):
        return 0.0
    half = np.minimum(np.asarray(chord) / 2.0, radius)
    return float(np.max(radius - np.sqrt(radius**2 - half**2)))


@dataclass
class LensRegion:
    free: PathPolyline  # boundary part where |f| <= delta is assumed
    arc: PathPolyline  # the part on the circular arc
    chord_error: float  # max distance from a polygon edge to the true boundary

    @property
    def ring(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.free.vertices), np.asarray(self.arc.vertices)[1:-1]])

    def to_csv_rows(self) -> list:
        return [(float(z.real), float(z.imag)) for z in self.ring]


def lens_region(beta: float, cap: float = 0.95, n: int = 64) -> LensRegion:
    """Polygon for the lens of angle ``beta`` intersected with ``|z| <= cap``.

    The lens is the part of the disk where ``arg((1+z)/(1-z)) < beta - pi/2``,
    bounded by the lower half of the unit circle and the circular arc through
    ``-1, i tan(beta/2 - pi/4), 1``. The arc part lies on that circle; the free
    part is the arc of ``|z| = cap`` closing it off below.
    """
    if not 0.0 < beta < math.pi:
        raise DomainError("beta must lie in (0, pi)")
    if not 0.0 < cap < 1.0:
        raise DomainError("cap must lie in (0, 1)")
    theta = beta - math.pi / 2
    ch = math.cos(theta) * (1 + cap * cap) / (1 - cap * cap)
    if ch <= 1.0:
        raise GeometryError("cap is too small to meet the lens arc")
    S = math.acosh(ch)
    s = np.linspace(S, -S, n + 1)
    wv = np.exp(s + 1j * theta)
    arc = (wv - 1.0) / (wv + 1.0)
    # the arc runs left to right so that it continues the free part
    if arc[0].real > arc[-1].real:
        arc = arc[::-1]
    left, right = arc[0], arc[-1]
    a0 = np.angle(right)
    a1 = np.angle(left)
    # free part goes clockwise from right to left through -i*cap
    if a1 > a0:
        a1 -= 2 * np.pi
    phi = np.linspace(a0, a1, n + 1)
    free = cap * np.exp(1j * phi)
    free[0], free[-1] = right, left
    arc_radius = math.inf if abs(math.cos(beta)) < 1e-15 else 1.0 / abs(math.cos(beta))
    err = max(_sagitta(np.abs(np.diff(free)), cap), _sagitta(np.abs(np.diff(arc)), arc_radius))
    return LensRegion(PathPolyline(tuple(free)), PathPolyline(tuple(arc)), err)


def sample_path(path: PathPolyline, per_segment: int = 64) -> np.ndarray:
    v = np.asarray(path.vertices)
    u = np.linspace(0.0, 1.0, per_segment, endpoint=False)
    pts = (v[:-1, None] + u[None, :] * (v[1:, None] - v[:-1, None])).ravel()
    return np.concatenate([pts, v[-1:]])


def sample_polygon(ring: np.ndarray, cfg: GridConfig, sub: int | None = None) -> np.ndarray:
    """Fixed sub-grid of the bounding box plus seeded rejection samples, kept inside the polygon."""
    sub = sub or 4 * cfg.initial_mesh
    xr = (ring.real.min(), ring.real.max())
    yr = (ring.imag.min(), ring.imag.max())
    gx = np.linspace(*xr, sub)
    gy = np.linspace(*yr, sub)
    grid = (gx[None, :] + 1j * gy[:, None]).ravel()
    rng = cfg.rng()
    m = sub * sub
    rnd = rng.uniform(*xr, m) + 1j * rng.uniform(*yr, m)
    pts = np.concatenate([grid, rnd])
    return pts[point_in_polygon(pts, ring)]


@dataclass
class MaxPrincipleReport:
    kappa: float
    t0: float
    delta0: float
    eta: float
    hypothesis_ok: bool
    conclusion_ok: bool
    worst_boundary: tuple
    worst_interior: tuple
    normality_bound: float
    interior_samples: int

    def to_dict(self) -> dict:
        def pt(p):
            z, v = p
            return {"point": [float(z.real), float(z.imag)], "abs_f": float(v)}

        return {
            "kappa": self.kappa,
            "t0": self.t0,
            "delta0": self.delta0,
            "eta": self.eta,
            "hypothesis_ok": self.hypothesis_ok,
            "conclusion_ok": self.conclusion_ok,
            "worst_boundary": pt(self.worst_boundary),
            "worst_interior": pt(self.worst_interior),
            "normality_bound": self.normality_bound,
            "interior_samples": self.interior_samples,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _worst(f: HarmonicMap, pts: np.ndarray) -> tuple:
    v = np.abs(_f_values(f, pts))
    i = int(np.argmax(v))
    return complex(pts[i]), float(v[i])


def verify_max_principle(f: HarmonicMap, free: PathPolyline, arc: PathPolyline, lens: LensConfig,
                         cfg: GridConfig | None = None) -> MaxPrincipleReport:
    """Sampled check of the hypothesis and conclusion on a polygonal region.

    The region is the polygon ``free`` followed by ``arc`` (the caller splits
    its boundary). Sampled maxima are lower bounds of true maxima, so a
    failed conclusion is a real violation while a pass is only evidence.
    """
    cfg = cfg or GridConfig()
    k = lens.kappa
    d0 = delta0(k)
    eta = solve_eta(lens.delta, k)
    ring = np.concatenate([np.asarray(free.vertices), np.asarray(arc.vertices)])
    if not np.all(np.abs(ring) < 1.0):
        raise GeometryError("the closure of the region must lie inside the unit disk")
    if abs(free.vertices[-1] - arc.vertices[0]) > 1e-12 or abs(arc.vertices[-1] - free.vertices[0]) > 1e-12:
        raise GeometryError("free boundary and arc must join into a closed curve")
    ring = np.concatenate([np.asarray(free.vertices), np.asarray(arc.vertices)[1:-1]])
    bpts = sample_path(free)
    ipts = sample_polygon(ring, cfg)
    if ipts.size == 0:
        raise GeometryError("no interior samples; the region is degenerate")
    wb = _worst(f, bpts)
    wi = _worst(f, ipts)
    nb = normality_constant(f, cfg).lower_bound
    hyp = wb[1] <= lens.delta and nb <= lens.alpha
    concl = wi[1] <= eta + 1e-9
    return MaxPrincipleReport(k, t0(k), d0, eta, bool(hyp), bool(concl), wb, wi, nb, int(ipts.size))


# -- sequence collapse --

@dataclass
class CollapseVerdict:
    verdict: str  # consistent | violation
    antecedent: bool
    consequent: bool
    arc_max: list
    disk_max: list

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "antecedent": self.antecedent,
            "consequent": self.consequent,
            "arc_max": self.arc_max,
            "disk_max": self.disk_max,
        }


def collapses(seq, tail_fraction: float = 0.25, ratio: float = 0.1, floor: float = 1e-12) -> bool:
    """Tail maximum at most ``ratio`` times the head value (or below ``floor``)."""
    s = np.asarray(seq, dtype=float)
    tail = s[tail_slice(len(s), tail_fraction)].max()
    return bool(tail <= floor or tail <= ratio * s[0])


def sequence_collapse_test(fs, arcs, gamma: float, test_disks, cfg: GridConfig | None = None,
                           alpha: float | None = None, tail_fraction: float = 0.25, ratio: float = 0.1) -> CollapseVerdict:
    """Finite check of: max of |f_n| on the arcs -> 0 implies |f_n| -> 0 on compact sets.

    ``m_n`` is the sampled max of |f_n| on arc n and ``M_n`` the sampled max
    over all test disks. A sequence "tends to 0" when its tail maximum drops
    below ``ratio`` times its first value. When ``alpha`` is given each f_n is
    screened against the uniform normality bound on the level-0 grid.
    """
    cfg = cfg or GridConfig()
    fs = list(fs)
    arcs = list(arcs)
    if len(fs) != len(arcs) or len(fs) < 2:
        raise DomainError("need matching lists of at least two maps and arcs")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    for i, a in enumerate(arcs):
        if a.diameter < gamma:
            raise GeometryError(f"arc {i} has diameter {a.diameter:.6g} < gamma = {gamma:g}")
        if not np.all(np.abs(np.asarray(a.vertices)) < 1.0):
            raise GeometryError(f"arc {i} leaves the open disk")
    disks = []
    for c, r in test_disks:
        c = complex(c)
        if not (r > 0 and abs(c) + r < 1.0):
            raise GeometryError("test disks must be closed disks inside the unit disk")
        disks.append((c, float(r)))
    if not disks:
        raise DomainError("need at least one test disk")
    if alpha is not None:
        for i, f in enumerate(fs):
            warn_if_exceeds(f, alpha, cfg, label=f"f_{i}: ")
    n = cfg.initial_mesh
    rr = np.linspace(0, 1, n + 1)[1:]
    th = np.linspace(0, 2 * np.pi, 2 * n, endpoint=False)
    unit = np.concatenate([[0j], (rr[:, None] * np.exp(1j * th[None, :])).ravel()])
    dpts = np.concatenate([c + r * unit for c, r in disks])
    m = [float(np.max(np.abs(_f_values(f, sample_path(a))))) for f, a in zip(fs, arcs)]
    M = [float(np.max(np.abs(_f_values(f, dpts)))) for f in fs]
    ante = collapses(m, tail_fraction, ratio)
    cons = collapses(M, tail_fraction, ratio)
    verdict = "violation" if ante and not cons else "consistent"
    return CollapseVerdict(verdict, ante, cons, m, M)
