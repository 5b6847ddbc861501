"""Normality estimators for harmonic maps.

Every supremum here is estimated from samples, so the reported numbers are
lower bounds together with a heuristic ``diverging`` flag; nothing in this
module proves that a map is (or is not) normal.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import expr as ex
from .errors import DomainError
from .harmonic import HarmonicMap, spherical_quotient, warn_if_not_sense_preserving
from .search import GridConfig, SampleRecorder, lex_argmax, maximize_on_disk, polar_grid
from .sphere import DiskPoint, ExtendedComplex, chordal_array, hyperbolic_distance


@dataclass
class NormalityEstimate:
    objective: str
    lower_bound: float
    witness: complex
    evals: int
    depth_used: int
    diverging: bool
    trace: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    samples: tuple | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {
            "objective": self.objective,
            "lower_bound": self.lower_bound,
            "witness": [float(self.witness.real), float(self.witness.imag)],
            "evals": self.evals,
            "depth_used": self.depth_used,
            "diverging": self.diverging,
            "trace": [float(t) for t in self.trace],
        }
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def write_samples_csv(path, points, values) -> None:
    """One ``z_re,z_im,value`` row per sampled point."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["z_re", "z_im", "value"])
        for z, v in zip(points, values):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(v))])


# -- raw evaluation helpers (no domain checks; callers stay inside the disk) --

def _f_values(f: HarmonicMap, z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        return ex.evaluate(f.h, z) + np.conj(ex.evaluate(f.g, z))


def _sharp(f: HarmonicMap, z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        num = np.abs(ex.evaluate(f.dh, z)) + np.abs(ex.evaluate(f.dg, z))
    return spherical_quotient(num, _f_values(f, z))


def normality_objective(f: HarmonicMap):
    """``z -> (1 - |z|^2) f^#(z)`` on arrays."""

    def obj(z):
        z = np.asarray(z, dtype=complex)
        return (1.0 - np.abs(z) ** 2) * _sharp(f, z)

    return obj


def _estimate(name, objective, cfg, seeds=(), record=False, extra=None) -> NormalityEstimate:
    rec = SampleRecorder(objective) if record else objective
    res = maximize_on_disk(rec, cfg, seeds)
    return NormalityEstimate(
        objective=name,
        lower_bound=res.value,
        witness=res.witness,
        evals=res.evals,
        depth_used=res.depth_used,
        diverging=res.diverging,
        trace=res.trace,
        extra=extra or {},
        samples=rec.rows() if record else None,
    )


def normality_constant(f: HarmonicMap, cfg: GridConfig | None = None, record: bool = False) -> NormalityEstimate:
    """Lower bound for ``sup (1 - |z|^2) f^#(z)`` over the disk."""
    cfg = cfg or GridConfig()
    return _estimate("normality", normality_objective(f), cfg, record=record)


# -- two-point criterion --

P_TAUS = (1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.6)
P_DIRECTIONS = 8


def _pair_offsets() -> np.ndarray:
    psi = np.arange(P_DIRECTIONS) * (np.pi / P_DIRECTIONS)
    return (np.asarray(P_TAUS)[:, None] * np.exp(1j * psi)[None, :]).ravel()


def two_point_functional(f: HarmonicMap, z, w, p: float) -> np.ndarray:
    """``chi(f(z), f(w)) / |z - w| * |1 - conj(w) z|^(1 - 2/p) * ((1-|z|^2)(1-|w|^2))^(1/p)``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    chi = chordal_array(_f_values(f, z), _f_values(f, w))
    weight = np.abs(1.0 - np.conj(w) * z) ** (1.0 - 2.0 / p)
    weight *= ((1.0 - np.abs(z) ** 2) * (1.0 - np.abs(w) ** 2)) ** (1.0 / p)
    return chi / np.abs(z - w) * weight


def _pairs_around(c: np.ndarray, zeta: np.ndarray):
    c = c[:, None]
    zeta = zeta[None, :]
    z = (c - zeta) / (1.0 - np.conj(c) * zeta)
    w = (c + zeta) / (1.0 + np.conj(c) * zeta)
    return z, w


def p_criterion(f: HarmonicMap, p: float, cfg: GridConfig | None = None, record: bool = False) -> NormalityEstimate:
    """Lower bound for the sup of the two-point functional over pairs ``z != w``.

    Pairs are placed symmetrically around a center ``c`` at pseudo-hyperbolic
    offsets ``tau`` in several directions; the small offsets keep the sweep
    close to the diagonal, where the functional tends to the normality
    objective. The center is searched with the same adaptive refinement as
    :func:`normality_constant`; the witness is the center and the best pair is
    reported under ``pair``.
    """
    if not (p > 0 and math.isfinite(p)):
        raise DomainError("p must be a positive real")
    cfg = cfg or GridConfig()
    zeta = _pair_offsets()
    npairs = zeta.size

    def obj(c):
        c = np.asarray(c, dtype=complex).ravel()
        z, w = _pairs_around(c, zeta)
        vals = two_point_functional(f, z, w, p)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        return vals.max(axis=1)

    inner = cfg.replace(max_evals=max(1, cfg.max_evals // npairs))
    est = _estimate(f"p_criterion(p={p:g})", obj, inner, record=record)
    z, w = _pairs_around(np.array([est.witness]), zeta)
    vals = two_point_functional(f, z, w, p)[0]
    k = int(np.nanargmax(vals)) if np.isfinite(vals).any() else 0
    est.evals *= npairs
    est.extra = {
        "p": p,
        "pair": [[float(z[0, k].real), float(z[0, k].imag)], [float(w[0, k].real), float(w[0, k].imag)]],
    }
    return est


# -- five-point test --

@dataclass(frozen=True)
class SolveConfig:
    """Damped Newton settings for the preimage search."""

    max_iter: int = 50
    tol: float = 1e-12
    dedup_radius: float = 1e-6
    max_halvings: int = 30
    # a start whose residual dropped below this (relative) without meeting
    # tol counts as a stall rather than evidence of an empty preimage
    stall_residual: float = 1e-3

    def __post_init__(self):
        if self.max_iter < 1 or self.tol <= 0 or self.dedup_radius <= 0:
            raise DomainError("invalid SolveConfig")


@dataclass
class PreimageResult:
    value: ExtendedComplex
    status: str  # ok | empty | stall | degenerate
    preimages: list
    sup_estimate: float
    witness: complex | None

    def to_dict(self) -> dict:
        return {
            "value": self.value.to_json(),
            "status": self.status,
            "preimages": [[z.real, z.imag] for z in self.preimages],
            "sup_estimate": self.sup_estimate,
            "witness": None if self.witness is None else [self.witness.real, self.witness.imag],
        }


def _residual(f: HarmonicMap, z: np.ndarray, w: complex) -> np.ndarray:
    out = np.full(z.shape, np.inf)
    inside = np.abs(z) < 1.0
    if inside.any():
        r = np.abs(_f_values(f, z[inside]) - w)
        out[inside] = np.where(np.isfinite(r), r, np.inf)
    return out


def newton_preimages(f: HarmonicMap, w: complex, starts: np.ndarray, solver: SolveConfig):
    """Multi-start damped Newton for ``h(z) + conj(g(z)) = w``.

    The real 2x2 system is solved in complex form: with ``a = h'`` and
    ``b = conj(g')`` the step ``d`` satisfies ``a d + b conj(d) = -r``.
    Returns ``(roots, best_residual)``.
    """
    z = np.asarray(starts, dtype=complex).copy()
    res = _residual(f, z, w)
    goal = solver.tol * (1.0 + abs(w))
    active = np.isfinite(res) & (res > goal)
    best = float(res.min()) if res.size else math.inf
    for _ in range(solver.max_iter):
        if not active.any():
            break
        za = z[active]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            r = _f_values(f, za) - w
            a = ex.evaluate(f.dh, za)
            b = np.conj(ex.evaluate(f.dg, za))
            den = np.abs(a) ** 2 - np.abs(b) ** 2
            step = (np.conj(a) * (-r) - b * np.conj(-r)) / den
        ok = np.isfinite(step) & (den != 0)
        s = np.ones(za.size)
        old = res[active]
        new_z = za.copy()
        new_res = old.copy()
        pending = ok.copy()
        for _h in range(solver.max_halvings):
            if not pending.any():
                break
            trial = za[pending] + s[pending] * step[pending]
            tr = _residual(f, trial, w)
            better = tr < old[pending]
            idx = np.flatnonzero(pending)
            new_z[idx[better]] = trial[better]
            new_res[idx[better]] = tr[better]
            pending[idx[better]] = False
            s[pending] *= 0.5
        moved = new_res < old
        idx = np.flatnonzero(active)
        z[idx] = new_z
        res[idx] = new_res
        # no descent from this start: give up on it
        active[idx[~moved]] = False
        active &= res > goal
        best = min(best, float(res.min()))
    roots = z[res <= goal]
    return roots, best


def dedup_points(points: np.ndarray, radius: float) -> list:
    """Greedy deduplication in lexicographic (radius, angle) order."""
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        return []
    order = np.lexsort((np.mod(np.angle(pts), 2 * np.pi), np.abs(pts)))
    kept: list[complex] = []
    for p in pts[order]:
        if all(abs(p - q) > radius for q in kept):
            kept.append(complex(p))
    return kept


def five_point_test(f: HarmonicMap, values, cfg: GridConfig | None = None, solver: SolveConfig | None = None) -> list[PreimageResult]:
    """Sup of ``(1 - |z|^2) f^#(z)`` over the computed preimages of each value.

    An empty preimage set reports 0 with status ``empty``; a value whose
    starts all stalled near a solution reports ``stall``; roots with a
    vanishing Jacobian (non-isolated preimages) report ``degenerate``.
    """
    cfg = cfg or GridConfig()
    solver = solver or SolveConfig()
    E = [ExtendedComplex.of(v) for v in values]
    if len(E) != 5:
        raise DomainError(f"the five-point test needs exactly 5 values, got {len(E)}")
    if len(set(E)) != 5:
        raise DomainError("the five values must be distinct")
    warn_if_not_sense_preserving(f, cfg)
    starts = polar_grid(cfg)
    obj = normality_objective(f)
    out = []
    for v in E:
        if v.is_infinite:
            out.append(PreimageResult(v, "empty", [], 0.0, None))
            continue
        w = v.value
        roots, best = newton_preimages(f, w, starts, solver)
        roots = dedup_points(roots, solver.dedup_radius)
        if not roots:
            status = "stall" if best <= solver.stall_residual * (1.0 + abs(w)) else "empty"
            out.append(PreimageResult(v, status, [], 0.0, None))
            continue
        r = np.asarray(roots)
        vals = obj(r)
        i = lex_argmax(vals, r)
        with np.errstate(over="ignore", invalid="ignore"):
            jac = np.abs(ex.evaluate(f.dh, r)) ** 2 - np.abs(ex.evaluate(f.dg, r)) ** 2
        status = "degenerate" if np.any(np.abs(jac) < 1e-14) else "ok"
        out.append(PreimageResult(v, status, roots, float(vals[i]), complex(r[i])))
    return out


# -- derivative growth --

def derivative_growth(f: HarmonicMap, n: int, K: float, cfg: GridConfig | None = None, record: bool = False) -> NormalityEstimate:
    """Lower bound for ``sup (1-|z|^2)^n (|h^(n)| + |g^(n)|)`` over ``|f(z)| <= K``."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not K > 0:
        raise DomainError("K must be positive")
    cfg = cfg or GridConfig()
    hn = ex.nth_derivative(f.h, n)
    gn = ex.nth_derivative(f.g, n)

    def obj(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            v = (1.0 - np.abs(z) ** 2) ** n * (np.abs(ex.evaluate(hn, z)) + np.abs(ex.evaluate(gn, z)))
            fz = np.abs(_f_values(f, z))
        return np.where(fz <= K, v, -np.inf)

    est = _estimate(f"derivative_growth(n={n}, K={K:g})", obj, cfg, record=record)
    if not math.isfinite(est.lower_bound):
        raise DomainError(f"no sampled point satisfies |f(z)| <= {K:g}")
    est.extra = {"n": n, "K": K}
    return est


# -- B_k(n) --

@lru_cache(maxsize=None)
def _bk(k: int, n: int) -> int:
    if k == 1:
        return 1
    return sum(_bk(k - 1, j) for j in range(k - 1, n))


def bk(k: int, n: int) -> int:
    """``B_1(n) = 1``, ``B_k(n) = B_{k-1}(k-1) + ... + B_{k-1}(n-1)``."""
    if int(k) != k or int(n) != n:
        raise DomainError("k and n must be integers")
    if k < 1 or k > n:
        raise DomainError(f"bk needs 1 <= k <= n, got k={k}, n={n}")
    return _bk(int(k), int(n))


def bk_bound(k: int, n: int) -> int:
    return (n - k + 2) ** (k - 1)


# -- pair sequences --

@dataclass
class PairVerdict:
    verdict: str  # consistent | violation
    index: int | None
    chi: np.ndarray
    rho: np.ndarray
    tol: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "index": self.index,
            "tol": self.tol,
            "chi": [float(c) for c in self.chi],
            "rho": [float(r) for r in self.rho],
        }


def tail_slice(n: int, fraction: float = 0.25) -> slice:
    """Indices of the last ``fraction`` of a length-n sequence (at least one)."""
    k = max(1, math.ceil(n * fraction))
    return slice(n - k, n)


def lappan_pair_test(f: HarmonicMap, pairs, tail_fraction: float = 0.25, tol_scale: float = 1e-3,
                     final_rho: float = 1e-3) -> PairVerdict:
    """Finite check that ``chi(f(z_n), f(w_n)) -> 0`` along pairs with ``rho(z_n, w_n) -> 0``.

    The verdict is ``consistent`` when the tail maximum of the chordal gaps is
    below ``tol_scale * (chi_0 + 1)``, else ``violation`` at the worst tail index.
    """
    pairs = [(DiskPoint.of(z).z, DiskPoint.of(w).z) for z, w in pairs]
    if len(pairs) < 2:
        raise DomainError("need at least two pairs")
    rho = np.array([hyperbolic_distance(z, w) for z, w in pairs])
    if np.any(np.diff(rho) > 1e-12 * rho[:-1]):
        raise DomainError("pairs must have nonincreasing hyperbolic distance")
    if not rho[-1] < final_rho:
        raise DomainError(f"final hyperbolic distance {rho[-1]:.3g} is not below {final_rho:g}")
    z = np.array([p[0] for p in pairs])
    w = np.array([p[1] for p in pairs])
    chi = chordal_array(_f_values(f, z), _f_values(f, w))
    tol = tol_scale * (float(chi[0]) + 1.0)
    tail = tail_slice(len(pairs), tail_fraction)
    t = chi[tail]
    if t.max() < tol:
        return PairVerdict("consistent", None, chi, rho, tol)
    return PairVerdict("violation", tail.start + int(np.argmax(t)), chi, rho, tol)


def sampled_normality_bound(f: HarmonicMap, cfg: GridConfig) -> float:
    """Max of the normality objective on the level-0 grid only (cheap screen)."""
    pts = polar_grid(cfg)
    v = normality_objective(f)(pts)
    return float(np.nanmax(v))


def warn_if_exceeds(f: HarmonicMap, alpha: float, cfg: GridConfig, label: str = "") -> bool:
    val = sampled_normality_bound(f, cfg)
    if val > alpha:
        warnings.warn(f"{label}sampled normality bound {val:.6g} exceeds alpha={alpha:g}", stacklevel=3)
        return False
    return True
