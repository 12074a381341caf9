"""Shared error taxonomy for the analysis pipeline.

Every failure mode that callers are expected to branch on gets its own
exception class so that the service layer can map them to stable error
payloads and the CLI to exit codes. Errors that mean "partial results are
still meaningful" (SolverIncomplete, NonHyperbolicDivisor) are marked by
the ``partial_result`` attribute.
"""

from __future__ import annotations


class DarbouxCubicError(Exception):
    """Base class for all library errors."""

    partial_result: bool = False


class ParseError(DarbouxCubicError):
    """Expression text could not be parsed.

    Attributes:
        position: 0-based offset into the source text where parsing failed.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundParameter(DarbouxCubicError):
    """An expression used a parameter name with no bound value."""


class NonRationalLiteral(DarbouxCubicError):
    """A literal or parameter value is not an exact rational.

    Decimal literals are rejected on purpose: write 3/2, not 1.5, so that
    every coefficient stays exact by construction.
    """


class NotDivisible(DarbouxCubicError):
    """Exact polynomial division left a remainder.

    Signals that a time rescale or blow-down step is invalid for the
    field at hand.
    """


class HalfPowerResidue(DarbouxCubicError):
    """Odd powers of the square root survive the blow-up substitution.

    The half-power weight does not resolve this singular point.
    """


class ShapeError(DarbouxCubicError):
    """System is not of the supported shape (linear star part plus a
    homogeneous cubic part)."""


class NotInvariant(DarbouxCubicError):
    """The given curve is not invariant for the system."""


class PositiveDimensional(DarbouxCubicError):
    """The equilibrium set contains a whole curve; isolated-point
    machinery does not apply."""


class SolverIncomplete(DarbouxCubicError):
    """The exact case-split solver hit a branch outside its implemented
    repertoire. The unresolved branch is reported in the message."""

    partial_result = True


class NonHyperbolicDivisor(DarbouxCubicError):
    """A divisor equilibrium is not hyperbolic and coexists with saddle
    structure; a further blow-up would be needed.

    Attributes:
        point: (u, w) float approximation of the offending point.
    """

    def __init__(self, message: str, point: tuple[float, float]) -> None:
        super().__init__(message)
        self.point = point

    partial_result = True


class UndeterminedAtOrder(DarbouxCubicError):
    """Center-manifold reduction did not resolve the leading coefficient
    within the requested truncation order; raise the order."""


class UnsupportedPoint(DarbouxCubicError):
    """The operation needs a rational equilibrium but got algebraic
    coordinates."""


class RelationFails(DarbouxCubicError):
    """The supplied exponent vector does not annihilate the cofactors."""


class PoleOrBranch(DarbouxCubicError):
    """Numeric evaluation hit a pole locus or a branch-ambiguous power
    (negative base with non-integer exponent)."""


class StepUnderflow(DarbouxCubicError):
    """The adaptive integrator's step size underflowed (stiffness or a
    singularity).

    Attributes:
        location: (t, x, y) where the integration stalled.
    """

    def __init__(self, message: str, location: tuple[float, float, float]) -> None:
        super().__init__(f"{message} at t={location[0]:.6g}, point=({location[1]:.6g}, {location[2]:.6g})")
        self.location = location


class NotASaddle(DarbouxCubicError):
    """Separatrix tracing was asked to start from a non-saddle point."""


class IllConditioned(DarbouxCubicError):
    """Point spread is insufficient for the requested fit degree; widen
    the sample range or add points."""
