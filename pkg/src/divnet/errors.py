"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class DivnetError(Exception):
    exit_code = 1


class UsageError(DivnetError, ValueError):
    exit_code = 2


class RangeError(UsageError, IndexError):
    """A label or integer lies outside the valid range."""


class RemovedNodeError(UsageError):
    """A query addressed a node that was removed from the network."""


class DomainError(UsageError):
    """A formula was evaluated outside the set where it holds."""


class CapacityError(DivnetError):
    exit_code = 3


class DataError(DivnetError, ValueError):
    exit_code = 4


class InsufficientDataError(DataError):
    pass


class UndefinedValueError(DataError, ArithmeticError):
    """The requested quantity is undefined for this input (e.g. 0/0)."""
