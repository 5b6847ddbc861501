"""Exception types raised by the toolkit.

Everything derives from :class:`ToolkitError` so callers (and the CLI) can
separate domain failures from programming errors.
"""


class ToolkitError(Exception):
    """Base class for domain errors."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularPoint(ToolkitError, ArithmeticError):
    """Evaluation hit a pole or branch cut of an expression."""

    def __init__(self, subexpr, detail=""):
        self.subexpr = subexpr
        msg = f"singular point in {subexpr!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DomainViolation(ToolkitError):
    """A map that should send the disk into itself left the disk."""


class GeometryError(ToolkitError):
    """A path or region does not satisfy its geometric preconditions."""


class BudgetExceeded(ToolkitError):
    """The evaluation budget ran out before the requested refinement depth."""


class NotAZero(ToolkitError):
    """zero_order was asked about a point where f does not vanish."""


class OrderExceeded(ToolkitError):
    """No nonvanishing Taylor coefficient was found up to the requested order."""


class DeltaTooLarge(ToolkitError):
    """The boundary bound delta is not below the critical value delta_0."""

    def __init__(self, delta, delta0):
        self.delta = delta
        self.delta0 = delta0
        super().__init__(
            f"delta={delta:.10g} must be < delta_0={delta0:.10g}"
        )


class FrameEscapesDisk(ToolkitError):
    """A zoom frame would sample points outside the unit disk."""


class MeshMismatch(ToolkitError):
    """Zoom frames being compared do not share a sampling mesh."""


class UnknownEntry(ToolkitError, KeyError):
    """No catalog entry is registered under the requested name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
