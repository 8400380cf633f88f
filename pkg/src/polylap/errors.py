"""Exception types raised by the polylap library.

All validation and contract failures raise a subclass of ``PolylapError``,
so callers can catch one base class at API boundaries (the CLI maps them
to exit code 2).
"""


class PolylapError(Exception):
    """Base class for all polylap errors."""


class TooFewArcs(PolylapError):
    """An arc profile needs at least three arcs."""


class NonPositiveAngle(PolylapError):
    """An arc half-angle is outside the open interval (0, pi)."""


class SumMismatch(PolylapError):
    """Arc half-angles do not sum to pi within tolerance."""


class IndexOutOfRange(PolylapError):
    """An index or order parameter is outside its valid range."""


class IdentityViolation(PolylapError):
    """A cotangent identity required by a closed form does not hold."""


class NegativeDiscriminant(PolylapError):
    """Closed-form discriminant is negative: an invariant was breached."""


class DegenerateFace(PolylapError):
    """A triangle has (numerically) zero area."""


class EdgeNotFound(PolylapError):
    """The requested edge does not exist in the mesh."""


class LengthMismatch(PolylapError):
    """A per-vertex value vector does not match the vertex count."""


class NotSymmetric(PolylapError):
    """The eigensolver was handed a non-symmetric matrix."""


class NoConvergence(PolylapError):
    """The eigensolver failed to converge within the sweep budget."""


class ArityMismatch(PolylapError):
    """An objective was evaluated on a profile of the wrong arity."""


class Unsupported(PolylapError):
    """The requested operation is not defined for this objective."""


class StartNotInterior(PolylapError):
    """An optimization start point is not strictly interior to the domain."""


class InvalidTarget(PolylapError):
    """A boundary-probe target does not describe a valid boundary point."""


class UnknownTheorem(PolylapError):
    """No sampling check is registered under the given theorem id."""
