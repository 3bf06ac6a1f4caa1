"""Exception hierarchy shared by all modules."""


class ElError(Exception):
    """Base class for errors raised by elnum."""


class GuardError(ElError):
    """A division or logarithm guard could not be passed."""


class DivisionByZero(GuardError):
    """The divisor is certified to be exactly zero."""


class LogOfZero(GuardError):
    """The logarithm argument is certified to be exactly zero."""


class GuardUndecided(GuardError):
    """A guard ball straddles zero and the zero test returned Unknown."""


class BranchUndecided(GuardError):
    """A log argument touches the branch cut and its side cannot be decided."""


class BudgetExhausted(ElError):
    """Precision or time budget ran out before the requested accuracy."""


class RelationVerificationError(ElError):
    """A numeric integer relation could not be confirmed exactly."""


class DeadlineExceeded(Exception):
    """The wall-clock budget fired.

    Deliberately not an :class:`ElError`: code that skips candidates on
    ordinary evaluation errors must not swallow the deadline.
    """
