class BridgeError(Exception):
    """Base for all bridge failures."""


class UsageError(BridgeError):
    pass


class MissingInputError(BridgeError):
    pass


class InvalidDataError(BridgeError):
    pass


class ModelUnavailableError(BridgeError):
    """A real-model backend was requested but its model is not installed."""
