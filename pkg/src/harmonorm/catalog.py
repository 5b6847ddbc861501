"""Registry of example maps with declared attributes.

``normal_evidence`` is declared (yes / no / unknown), never inferred; the
test suite re-checks each declaration against the sampled estimators.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from . import expr as ex
from .errors import UnknownEntry
from .harmonic import HarmonicMap, load_map


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    map: HarmonicMap
    normal_evidence: str
    h_bounded: bool
    g_bounded: bool
    sense_preserving: bool
    note: str = ""

    def __post_init__(self):
        if self.normal_evidence not in ("yes", "no", "unknown"):
            raise ValueError("normal_evidence must be yes, no or unknown")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "map": self.map.to_dict(),
            "normal_evidence": self.normal_evidence,
            "h_bounded": self.h_bounded,
            "g_bounded": self.g_bounded,
            "sense_preserving": self.sense_preserving,
            "note": self.note,
        }


# Cayley transform of the disk onto the right half-plane
CAYLEY = ex.Mobius(1, 1, -1, 1)


def const_dilatation_entry(alpha: complex) -> CatalogEntry:
    alpha = complex(alpha)
    label = f"{alpha.real:g}" if alpha.imag == 0 else f"{alpha.real:g}{alpha.imag:+g}j"
    return CatalogEntry(
        name=f"const-dilatation-{label}",
        map=HarmonicMap(ex.Z, ex.mul(ex.Const(alpha), ex.Z)),
        normal_evidence="yes",
        h_bounded=True,
        g_bounded=True,
        sense_preserving=abs(alpha) < 1,
        note="h = z, g = alpha z; dilatation identically alpha",
    )


_ENTRIES = [
    CatalogEntry("identity", HarmonicMap(ex.Z), "yes", True, True, True, "h = z, g = 0"),
    const_dilatation_entry(0.5),
    CatalogEntry(
        "bounded-normal", HarmonicMap(ex.poly([0.5, -0.5])), "yes", True, True, True,
        "h = (1 - z)/2, g = 0; maps the disk into itself",
    ),
    CatalogEntry(
        "exp-blowup", HarmonicMap(ex.exp(ex.mul(ex.Const(1j), CAYLEY))), "no", False, True, True,
        "h = exp(i (1+z)/(1-z)), g = 0; on the real axis |h| = 1 while the argument spins, "
        "so (1-|z|^2) f^# grows like 2/(1-|z|)",
    ),
    CatalogEntry(
        "exp-halfplane", HarmonicMap(ex.exp(CAYLEY)), "yes", False, True, True,
        "h = exp((1+z)/(1-z)), g = 0; unbounded but normal, sup = max u/cosh(u) ~ 0.66274",
    ),
    CatalogEntry(
        "exp-decay", HarmonicMap(ex.exp(ex.mul(ex.Const(-1), CAYLEY))), "yes", True, True, True,
        "h = exp(-(1+z)/(1-z)), g = 0; bounded by 1, tends to 0 in every Stolz angle at 1",
    ),
    CatalogEntry(
        "poly-harmonic", HarmonicMap(ex.Z, ex.poly([0, 0, 0.5])), "yes", True, True, True,
        "h = z, g = z^2/2; |g'| = |z| < 1 = |h'|",
    ),
]

REGISTRY = {e.name: e for e in _ENTRIES}

_CD = re.compile(r"^const-dilatation-(.+)$")


def get(name: str) -> CatalogEntry:
    """Look up an entry; ``const-dilatation-<alpha>`` works for any real or complex alpha."""
    if name in REGISTRY:
        return REGISTRY[name]
    m = _CD.match(name)
    if m:
        try:
            alpha = complex(m.group(1))
        except ValueError:
            raise UnknownEntry(f"bad dilatation in {name!r}") from None
        return const_dilatation_entry(alpha)
    raise UnknownEntry(f"no catalog entry named {name!r}; known: {', '.join(sorted(REGISTRY))}")


def names() -> list[str]:
    return list(REGISTRY)


def list_json() -> str:
    return json.dumps([e.to_dict() for e in _ENTRIES], indent=2, sort_keys=True)


def resolve_map(name: str) -> HarmonicMap:
    """A catalog name or the path of a map JSON file."""
    try:
        return get(name).map
    except UnknownEntry:
        if Path(name).is_file():
            return load_map(name)
        raise
