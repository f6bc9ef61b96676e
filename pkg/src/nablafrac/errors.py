"""Exception hierarchy shared by all modules."""


class NablaError(Exception):
    """Base class for every error raised by :mod:`nablafrac`."""


class DomainError(NablaError, ValueError):
    """A point or function lies outside the lattice an operation needs."""


class PoleError(NablaError, ArithmeticError):
    """A gamma-function pole with no finite value or convention."""


class ValidationError(NablaError, ValueError):
    """A problem description violates one of its invariants."""


class HypothesisError(ValidationError):
    """An operation was called outside the hypothesis it relies on."""


class SingularError(NablaError, ArithmeticError):
    """The boundary value problem has no unique solution."""


class SingularSystemError(SingularError):
    """Elimination in the dense oracle met a pivot below tolerance."""
