"""Exception types shared across the engine."""


class FairageError(Exception):
    """Base class for all engine errors."""


class ValidationError(FairageError):
    """Malformed or inconsistent input: bad schema, bad value, broken invariant."""


class MissingInputError(FairageError):
    """A required input file or directory does not exist."""


class SingleClassError(FairageError):
    """Metric undefined because only one label class is present."""
