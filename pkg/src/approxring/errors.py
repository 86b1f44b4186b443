"""Exception hierarchy shared by all modules."""


class ApproxRingError(Exception):
    """Base class for every error raised by this package."""


class RingSpecError(ApproxRingError):
    """Malformed ring description, or a table that fails the ring axioms."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ElementError(ApproxRingError, ValueError):
    """A value is not (the encoding of) an element of the ring at hand."""


class RingMismatchError(ApproxRingError):
    """Operands live in different rings."""


class InfiniteRingError(ApproxRingError):
    """An operation needs a finite ambient ring (or a truncation) but got none."""


class NotSymmetricError(ApproxRingError):
    """A set was required to contain 0 and be closed under negation."""


class SubstructureError(ApproxRingError):
    """A set fails to be a subring/ideal; ``witness`` names the violation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAFieldError(ApproxRingError):
    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class BudgetExceeded(ApproxRingError):
    """A search or enumeration ran past its budget.

    ``reached`` records how far the computation got (a level ``n``, a node
    count, a point count) and ``partial`` carries any partial result.
    """

    def __init__(self, message, reached=None, partial=None):
        super().__init__(message)
        self.reached = reached
        self.partial = partial


class InvalidCertificate(ApproxRingError):
    pass


class CloudError(ApproxRingError):
    """Cut-and-project failures: unbounded window, projection collision, empty cloud."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigError(ApproxRingError):
    """Experiment config could not be parsed; ``position`` locates the problem."""

    def __init__(self, message, position=None):
        super().__init__(f"{position}: {message}" if position else message)
        self.position = position


class NoCoverError(ApproxRingError):
    """The candidate pool cannot cover the target set."""
