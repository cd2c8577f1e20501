"""Exception hierarchy shared by every module."""


class ConvAlgError(ValueError):
    """Base class for all errors raised by convalg."""


class DimensionError(ConvAlgError):
    pass


class NonFiniteError(ConvAlgError):
    pass


class SingularMatrixError(ConvAlgError):
    pass


class NotSymmetricError(ConvAlgError):
    pass


class ConvergenceError(ConvAlgError):
    pass


class DecompositionError(ConvAlgError):
    """A supplied or computed eigendecomposition fails reconstruction."""


class RepeatedEigenvalueError(ConvAlgError):
    pass


class IllConditionedError(ConvAlgError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class GroupMismatchError(ConvAlgError):
    pass


class LatticeError(ConvAlgError):
    """Order-axiom or meet violation; ``witness`` holds the offending indices."""

    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class OracleError(ConvAlgError):
    pass


class DegenerateProbeError(ConvAlgError):
    pass
