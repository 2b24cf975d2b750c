"""Divisibility network of the natural numbers 1..N, analysed without storing adjacency."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    DataError,
    DivnetError,
    DomainError,
    InsufficientDataError,
    RangeError,
    RemovedNodeError,
    UndefinedValueError,
    UsageError,
)
from .graph import NetworkSpec, adjacent, degree, degree_sequence, edge_count, neighbors  # noqa: E402
from .sieve import build_tables, divisors, factorize, get_tables  # noqa: E402
