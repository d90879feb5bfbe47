"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Raised for invalid scenario or sweep configuration."""

    def __init__(self, message, key=None, accepted=None):
        self.key = key
        self.accepted = accepted
        if key is not None:
            message = f"{key}: {message}"
        if accepted is not None:
            message = f"{message} (accepted: {accepted})"
        super().__init__(message)
