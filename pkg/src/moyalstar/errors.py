"""Exception hierarchy.

Everything a numerical guard can trip derives from :class:`GuardError`; the
CLI maps those to exit code 3.
"""


class MoyalError(Exception):
    """Base class for all package errors."""


class GridMismatchError(MoyalError, ValueError):
    """Two symbols that must share a grid do not."""


class GuardError(MoyalError, ArithmeticError):
    """A numerical guard was tripped. ``guard`` names which one."""

    guard = "numerical"

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class BoundaryDecayError(GuardError):
    guard = "boundary-decay"


class StencilError(GuardError):
    guard = "stencil"


class PoleError(GuardError):
    guard = "pole"


class BranchError(GuardError):
    guard = "branch"


class CoverageError(GuardError):
    guard = "coverage"


class SolverError(GuardError):
    guard = "solver"


class ResourceError(GuardError):
    guard = "resource"
