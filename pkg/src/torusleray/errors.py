"""Exception hierarchy shared by all modules."""


class TorusLerayError(Exception):
    """Base class for all package errors."""


class CapacityError(TorusLerayError):
    """Input exceeds the supported integer/factorization range."""


class DomainError(TorusLerayError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class EmptyEnsembleError(TorusLerayError):
    """The frequency set is empty (multiplicity zero)."""


class ResolutionError(TorusLerayError):
    """Grid too coarse for the requested frequency content."""


class HypothesisError(TorusLerayError):
    """A bound's hypothesis could not be verified on the test grid."""


class GeometryError(TorusLerayError):
    """Excision radius incompatible with the singular-point geometry."""


class PreconditionError(TorusLerayError):
    """A documented precondition of the operation fails."""
