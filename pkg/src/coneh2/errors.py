"""Exception hierarchy shared across the package."""


class ConeH2Error(Exception):
    """Base class for all package errors."""


class InvalidInputError(ConeH2Error):
    """Malformed or inconsistent user input (problem files, bad parameters)."""


class ProblemValidationError(InvalidInputError):
    """A synthesis problem violates a structural invariant (cone, stability)."""


class IndexOutOfBox(ConeH2Error, IndexError):
    """Requested coefficient index lies outside the stored support box."""


class NonScalarLeadingTerm(ConeH2Error):
    """Causal inversion requires a z-independent leading temporal slice."""


class SingularLeadingTerm(ConeH2Error):
    """Leading temporal coefficient is numerically zero; not causally invertible."""


class UnsupportedInnerStructure(ConeH2Error):
    """The inner factor is not a pure temporal delay; out of the supported class."""


class IllPosedFeedback(ConeH2Error):
    """The feedthrough loop 1 - Gyu*Q is singular at lambda = 0."""


class SingularD(ConeH2Error):
    """State-space inversion needs an invertible direct-feedthrough matrix."""


class AlgebraicLoop(ConeH2Error):
    """Feedback interconnection with singular (I - D3*D); no well-posed loop."""


class DimensionMismatch(ConeH2Error, ValueError):
    """Incompatible input/output dimensions in a block operation."""


class NotCone(ConeH2Error):
    """A polynomial expected to be cone causal has support below the cone."""


class NotRealizableAsLCausal(ConeH2Error):
    """Rational transfer cannot be realized with degree-1 z-Laurent entries."""


class WraparoundRisk(ConeH2Error):
    """Lattice too small: the response would wrap around the ring within the horizon."""


class DegenerateAtTheta(UserWarning):
    """Leading lambda-coefficient vanished at some spatial frequency; roots at infinity."""


class TailBoundLoose(UserWarning):
    """Reported truncation tail bound exceeds the requested tolerance."""
