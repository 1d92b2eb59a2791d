class SpniError(Exception):
    """Base class for solver errors."""


class InputError(SpniError, ValueError):
    """Invalid arguments or instance data."""


class ParseError(InputError):
    """Malformed instance, solution or QUBO file."""


class UnreachableError(SpniError):
    """The sink cannot be reached from the source."""


class CapacityError(SpniError):
    """A size limit (enumeration cap, QUBO bit budget) was exceeded."""
