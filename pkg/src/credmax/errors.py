"""Exception types shared across the package."""


class CredmaxError(Exception):
    """Base class for all credmax errors."""


class ParseError(CredmaxError):
    """An input file line could not be parsed; message names file and line."""


class ValidationError(CredmaxError):
    """Input data violates a structural invariant (self-loop, duplicate, ...)."""


class NotFoundError(CredmaxError):
    """A referenced entity (action, user, path) does not exist."""


class PreconditionError(CredmaxError):
    """An operation was called with arguments outside its contract."""
