"""Numerical toolkit for normal harmonic maps of the unit disk."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetExceeded,
    DeltaTooLarge,
    DomainError,
    DomainViolation,
    FrameEscapesDisk,
    GeometryError,
    MeshMismatch,
    NotAZero,
    OrderExceeded,
    SingularPoint,
    ToolkitError,
    UnknownEntry,
)
from .harmonic import HarmonicMap, PathPolyline  # noqa: E402
from .search import GridConfig  # noqa: E402
from .sphere import DiskPoint, ExtendedComplex, StolzAngle  # noqa: E402

__all__ = [
    "__version__",
    "BudgetExceeded",
    "DeltaTooLarge",
    "DiskPoint",
    "DomainError",
    "DomainViolation",
    "ExtendedComplex",
    "FrameEscapesDisk",
    "GeometryError",
    "GridConfig",
    "HarmonicMap",
    "MeshMismatch",
    "NotAZero",
    "OrderExceeded",
    "PathPolyline",
    "SingularPoint",
    "StolzAngle",
    "ToolkitError",
    "UnknownEntry",
]
