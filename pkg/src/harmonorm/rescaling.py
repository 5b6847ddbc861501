"""Blow-up rescaling ``F_n(zeta) = f(z_n + rho_n zeta)``.

The extraction follows the classical construction: for radii ``r_n`` increasing
to 1 pick ``z_n`` maximizing ``(1 - |z|^2 / r_n^2) f^#(z)`` on ``|z| < r_n``
and set ``rho_n = 1 / f^#(z_n)``, so every frame has ``F_n^#(0) = 1``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FrameEscapesDisk, MeshMismatch
from .harmonic import HarmonicMap
from .normality import _f_values, _sharp
from .search import GridConfig, maximize_on_disk
from .sphere import DISK_GUARD, DiskPoint, chordal_array


@dataclass
class ZoomFrame:
    center: complex
    scale: float
    R: float
    frame_radius: float
    mesh: int
    zeta: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    sharp: np.ndarray = field(repr=False)
    sharp0: float = 0.0

    def manifest(self) -> dict:
        return {
            "center": [float(self.center.real), float(self.center.imag)],
            "scale": float(self.scale),
            "R": float(self.R),
            "frame_radius": float(self.frame_radius),
            "mesh": self.mesh,
            "sharp0": float(self.sharp0),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["zeta_re", "zeta_im", "F_re", "F_im"])
            for s, v in zip(self.zeta, self.values):
                w.writerow([repr(float(s.real)), repr(float(s.imag)), repr(float(v.real)), repr(float(v.imag))])


def frame_mesh(frame_radius: float, mesh: int) -> np.ndarray:
    """Square mesh with odd side ``mesh`` restricted to ``|zeta| <= frame_radius``."""
    if mesh < 3 or mesh % 2 == 0:
        raise DomainError("mesh must be an odd integer >= 3 so that zeta = 0 is sampled")
    u = np.linspace(-frame_radius, frame_radius, mesh)
    zeta = (u[None, :] + 1j * u[:, None]).ravel()
    return zeta[np.abs(zeta) <= frame_radius * (1 + 1e-12)]


def zoom(f: HarmonicMap, zc, rho: float, frame_radius: float, mesh: int = 21) -> ZoomFrame:
    """Sample ``F(zeta) = f(zc + rho zeta)`` on ``|zeta| <= frame_radius``."""
    zc = DiskPoint.of(zc).z
    if not rho > 0:
        raise DomainError("rho must be positive")
    if not frame_radius > 0:
        raise DomainError("frame_radius must be positive")
    R = (1.0 - abs(zc)) / rho
    if frame_radius > R:
        raise FrameEscapesDisk(f"frame_radius {frame_radius:.6g} exceeds R = {R:.6g}")
    zeta = frame_mesh(frame_radius, mesh)
    pts = zc + rho * zeta
    if np.any(np.abs(pts) >= DISK_GUARD):
        raise FrameEscapesDisk("frame touches the unit circle")
    sharp = rho * _sharp(f, pts)
    i0 = int(np.argmin(np.abs(zeta)))
    return ZoomFrame(
        center=zc,
        scale=float(rho),
        R=float(R),
        frame_radius=float(frame_radius),
        mesh=mesh,
        zeta=zeta,
        values=_f_values(f, pts),
        sharp=sharp,
        sharp0=float(rho * _sharp(f, np.array([zc]))[0]),
    )


@dataclass
class BlowupEntry:
    r: float
    z: complex
    M: float
    rho: float

    def to_dict(self) -> dict:
        return {"r": self.r, "z": [self.z.real, self.z.imag], "M": self.M, "rho": self.rho}


@dataclass
class BlowupSequence:
    entries: list

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def M(self) -> np.ndarray:
        return np.array([e.M for e in self.entries])

    @property
    def rho(self) -> np.ndarray:
        return np.array([e.rho for e in self.entries])


def default_schedule(n_max: int = 12) -> list[float]:
    return [1.0 - 2.0 ** -n for n in range(1, n_max + 1)]


def extract_blowup(f: HarmonicMap, r_schedule=None, cfg: GridConfig | None = None) -> BlowupSequence:
    """Run the selection sweep over ``r_schedule`` (default ``1 - 2^-n``, n = 1..12).

    Each maximization runs in the scaled variable ``u = z / r_n`` on the
    usual grid and is warm-started from the previous ``z_{n-1}``, so ``M_n``
    cannot drop below the value at the previous witness.
    """
    cfg = cfg or GridConfig()
    r_schedule = default_schedule() if r_schedule is None else [float(r) for r in r_schedule]
    if not r_schedule:
        raise DomainError("empty r_schedule")
    if any(not 0.0 < r < 1.0 for r in r_schedule):
        raise DomainError("schedule radii must lie in (0, 1)")
    if any(b <= a for a, b in zip(r_schedule, r_schedule[1:])):
        raise DomainError("r_schedule must be strictly increasing")
    entries = []
    prev = None
    for r in r_schedule:

        def obj(u, r=r):
            u = np.asarray(u, dtype=complex)
            return (1.0 - np.abs(u) ** 2) * _sharp(f, r * u)

        seeds = () if prev is None else (prev / r,)
        res = maximize_on_disk(obj, cfg, seeds)
        z = r * res.witness
        sharp = float(_sharp(f, np.array([z]))[0])
        if not sharp > 0:
            raise DomainError("f^# vanishes at the selected point; the map may be constant")
        M = (1.0 - abs(z) ** 2 / r**2) * sharp
        entries.append(BlowupEntry(r=r, z=z, M=M, rho=1.0 / sharp))
        prev = z
    return BlowupSequence(entries)


def frames_from_blowup(f: HarmonicMap, seq: BlowupSequence, frame_radius: float = 1.0, mesh: int = 21) -> list[ZoomFrame]:
    """Zoom frames at the selected points; ``frame_radius`` is capped per frame by ``R_n``."""
    frames = []
    for e in seq.entries:
        R = (1.0 - abs(e.z)) / e.rho
        if frame_radius > R:
            raise FrameEscapesDisk(f"frame_radius {frame_radius:g} exceeds R = {R:.6g} at r = {e.r:g}")
        frames.append(zoom(f, e.z, e.rho, frame_radius, mesh))
    return frames


@dataclass
class ProbeResult:
    verdict: str  # converging | not-converging
    nonconstant: bool
    sup_distances: list
    final_sharp0: float
    rescaling_admissible: bool

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "nonconstant": self.nonconstant,
            "sup_distances": self.sup_distances,
            "final_sharp0": self.final_sharp0,
            "rescaling_admissible": self.rescaling_admissible,
        }


def convergence_probe(frames: list[ZoomFrame], tol: float = 1e-2) -> ProbeResult:
    """Cauchy check in sup-chi over the last three frames.

    ``rescaling_admissible`` records whether ``R_n`` grows and
    ``rho_n / (1 - |z_n|)`` shrinks across the frames, i.e. whether the
    frames are a genuine blow-up. ``nonconstant`` needs both the pinned
    ``F^#(0) >= 0.5`` on the final frame and an admissible rescaling; with a
    stagnant scale the frames are just copies of ``f`` at a fixed size.
    """
    if not frames:
        raise DomainError("no frames")
    ref = frames[0]
    for fr in frames[1:]:
        if fr.mesh != ref.mesh or fr.frame_radius != ref.frame_radius or fr.zeta.shape != ref.zeta.shape:
            raise MeshMismatch("frames do not share mesh and frame_radius")
    last = frames[-3:]
    dists = []
    for i in range(len(last)):
        for j in range(i + 1, len(last)):
            dists.append(float(np.max(chordal_array(last[i].values, last[j].values))))
    converging = len(last) >= 2 and max(dists) < tol
    R = np.array([fr.R for fr in frames])
    ratio = np.array([fr.scale / (1.0 - abs(fr.center)) for fr in frames])
    admissible = len(frames) >= 2 and bool(np.all(np.diff(R) > 0) and np.all(np.diff(ratio) < 0))
    final = frames[-1].sharp0
    return ProbeResult(
        verdict="converging" if converging else "not-converging",
        nonconstant=bool(final >= 0.5 and admissible),
        sup_distances=dists,
        final_sharp0=final,
        rescaling_admissible=admissible,
    )
