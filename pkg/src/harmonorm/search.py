"""Grid configuration and the adaptive supremum search shared by the estimators.

The search samples a polar grid out to ``max_radius`` and then runs a
pattern search in hyperbolic coordinates: each refinement round lays a square
grid of side ``2 * half_width + 1`` over the pseudo-hyperbolic window of
radius ``t`` around the running argmax (pulled over by a disk automorphism).
After a successful round a narrow fan of points continuing the last step is
added (a pattern move). A round that finds no better point shrinks the
window by ``refine_factor``; a successful one keeps it, so each round either
walks up to a fixed hyperbolic distance or sharpens the local maximum.

All reported values are lower bounds of the supremum over the disk.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BudgetExceeded, DomainError


@dataclass(frozen=True)
class GridConfig:
    max_radius: float = 0.999
    initial_mesh: int = 24
    refine_depth: int = 6
    refine_factor: int = 2
    tol: float = 1e-3
    max_evals: int = 2_000_000
    rng_seed: int = 0
    # pseudo-hyperbolic radius of the first refinement window
    window: float = 0.3
    half_width: int = 6

    def __post_init__(self):
        if not 0.0 < self.max_radius < 1.0:
            raise DomainError("max_radius must lie in (0, 1)")
        if self.initial_mesh < 8:
            raise DomainError("initial_mesh must be at least 8")
        if self.refine_depth < 0:
            raise DomainError("refine_depth must be nonnegative")
        if self.refine_factor < 2:
            raise DomainError("refine_factor must be at least 2")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_evals < 1:
            raise DomainError("max_evals must be positive")
        if not 0.0 < self.window < 0.7:
            raise DomainError("window must lie in (0, 0.7)")
        if self.half_width < 1:
            raise DomainError("half_width must be at least 1")

    def replace(self, **changes) -> "GridConfig":
        d = asdict(self)
        d.update(changes)
        return GridConfig(**d)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


@dataclass
class SearchResult:
    value: float
    witness: complex
    evals: int
    depth_used: int
    diverging: bool
    trace: list = field(default_factory=list)
    radii: list = field(default_factory=list)


def polar_grid(cfg: GridConfig, radius: float | None = None) -> np.ndarray:
    """Center plus ``initial_mesh`` rings out to ``radius`` (default max_radius).

    Angles are staggered by half a step so no ray lies on the real axis.
    """
    radius = cfg.max_radius if radius is None else radius
    n_r = cfg.initial_mesh
    n_t = 2 * cfg.initial_mesh
    r = radius * np.arange(1, n_r + 1) / n_r
    theta = (np.arange(n_t) + 0.5) * (2 * np.pi / n_t)
    ring = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    return np.concatenate([[0j], ring])


def hyperbolic_window(center: complex, t: float, half_width: int) -> tuple[np.ndarray, np.ndarray]:
    """Square grid of half-side ``t`` in local coordinates, moved to ``center``.

    Returns the disk points and a boolean mask of the grid's edge cells.
    """
    k = np.arange(-half_width, half_width + 1)
    u = t * k / half_width
    zeta = (u[None, :] + 1j * u[:, None]).ravel()
    edge = (np.abs(k)[None, :] == half_width) | (np.abs(k)[:, None] == half_width)
    pts = (center + zeta) / (1.0 + np.conj(center) * zeta)
    return pts, edge.ravel()


def continuation_fan(center: complex, previous: complex, t: float) -> np.ndarray:
    """Points continuing the geodesic step ``previous -> center`` by up to ``t``.

    A narrow fan of directions around the continuation keeps the search on
    ridges that are too thin for the square stencil to resolve.
    """
    back = (previous - center) / (1.0 - np.conj(center) * previous)
    if back == 0:
        return np.empty(0, dtype=complex)
    u = -back / abs(back)
    alpha = np.linspace(-0.3, 0.3, 25)
    s = t * np.array([0.25, 0.5, 0.75, 1.0])
    zeta = (s[:, None] * u * np.exp(1j * alpha[None, :])).ravel()
    return (center + zeta) / (1.0 + np.conj(center) * zeta)


def lex_argmax(values: np.ndarray, points: np.ndarray) -> int:
    """Index of the maximum; ties broken by smallest radius, then angle."""
    vmax = values.max()
    idx = np.flatnonzero(values == vmax)
    if idx.size == 1:
        return int(idx[0])
    p = points[idx]
    order = np.lexsort((np.mod(np.angle(p), 2 * np.pi), np.abs(p)))
    return int(idx[order[0]])


def _clean(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.where(np.isnan(v), -np.inf, v)


def is_pinned(radius: float, max_radius: float) -> bool:
    """Witness has reached the radius guard."""
    return 1.0 - radius <= 2.0 * (1.0 - max_radius)


def diverging_flag(trace, radii, max_radius: float, tol: float) -> bool:
    """Every round either grew by more than ``tol`` (relative) while moving the
    witness outward, or the witness already sits at the radius guard."""
    if len(trace) < 2:
        return False
    for k in range(1, len(trace)):
        prev, cur = trace[k - 1], trace[k]
        if is_pinned(radii[k], max_radius):
            continue
        if not (prev > 0 and (cur - prev) / prev > tol and radii[k] > radii[k - 1]):
            return False
    return True


def maximize_on_disk(objective, cfg: GridConfig, seeds=()) -> SearchResult:
    """Adaptive lower-bound search for ``sup objective`` over ``|z| <= max_radius``.

    ``objective`` maps a complex array to a float array; NaN counts as -inf.
    ``seeds`` are extra level-0 points (warm starts).
    """
    pts = polar_grid(cfg)
    if len(seeds):
        seeds = np.asarray(seeds, dtype=complex).ravel()
        pts = np.concatenate([pts, seeds[np.abs(seeds) <= cfg.max_radius]])
    if pts.size > cfg.max_evals:
        raise BudgetExceeded(f"initial grid needs {pts.size} evaluations > max_evals={cfg.max_evals}")
    vals = _clean(objective(pts))
    evals = pts.size
    i = lex_argmax(vals, pts)
    best_val, best_pt = float(vals[i]), complex(pts[i])
    trace, radii = [best_val], [abs(best_pt)]
    t = cfg.window
    previous = None
    per_round = (2 * cfg.half_width + 1) ** 2 + 100
    for _level in range(cfg.refine_depth):
        if evals + per_round > cfg.max_evals:
            raise BudgetExceeded(
                f"max_evals={cfg.max_evals} reached after {len(trace) - 1} refinement rounds"
            )
        pts, _ = hyperbolic_window(best_pt, t, cfg.half_width)
        if previous is not None:
            pts = np.concatenate([pts, continuation_fan(best_pt, previous, t)])
        pts = pts[np.abs(pts) <= cfg.max_radius]
        vals = _clean(objective(pts))
        evals += pts.size
        j = lex_argmax(vals, pts)
        if vals[j] > best_val:
            previous = best_pt
            best_val, best_pt = float(vals[j]), complex(pts[j])
        else:
            t /= cfg.refine_factor
        trace.append(best_val)
        radii.append(abs(best_pt))
    return SearchResult(
        value=best_val,
        witness=best_pt,
        evals=evals,
        depth_used=len(trace) - 1,
        diverging=diverging_flag(trace, radii, cfg.max_radius, cfg.tol),
        trace=trace,
        radii=radii,
    )


def window_radius_for(t: float) -> float:
    """Hyperbolic (half-log) radius of a pseudo-hyperbolic window ``t``."""
    return 0.5 * math.log((1 + t) / (1 - t))


class SampleRecorder:
    """Wraps an objective and keeps every ``(z, value)`` it was asked for."""

    def __init__(self, objective):
        self.objective = objective
        self.points: list[np.ndarray] = []
        self.values: list[np.ndarray] = []

    def __call__(self, z):
        v = self.objective(z)
        self.points.append(np.asarray(z, dtype=complex).ravel())
        self.values.append(np.asarray(v, dtype=float).ravel())
        return v

    def rows(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.points:
            return np.empty(0, dtype=complex), np.empty(0)
        return np.concatenate(self.points), np.concatenate(self.values)
