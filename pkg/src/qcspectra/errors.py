"""Exception types raised across the package."""


class QCSpectraError(Exception):
    """Base class for all errors raised by qcspectra."""


class InvalidSizeError(QCSpectraError, ValueError):
    pass


class WrapAmbiguityError(QCSpectraError, ValueError):
    """A Laurent stencil is too wide to be realized on the periodic chain."""


class InexactDivisionError(QCSpectraError, ArithmeticError):
    def __init__(self, message, remainder_norm):
        super().__init__(message)
        self.remainder_norm = remainder_norm


class FactorizationError(QCSpectraError, ArithmeticError):
    pass


class FactorizationDegeneracyError(FactorizationError):
    """A root of the symbol lies on the unit circle."""


class MixedSignError(FactorizationError):
    """The symbol changes sign on the unit circle."""


class PreconditionError(QCSpectraError, ValueError):
    pass


class UnsupportedRangeError(QCSpectraError, ValueError):
    """Operation only defined for second-neighbour interactions."""


class AsymmetricInputError(QCSpectraError, ValueError):
    pass


class EigensolverError(QCSpectraError, RuntimeError):
    pass


class ProjectionViolationError(QCSpectraError, ValueError):
    """Right-hand side is not in the mean-zero subspace."""


class InstabilityError(QCSpectraError, ArithmeticError):
    pass


class ConfigError(QCSpectraError, ValueError):
    pass
