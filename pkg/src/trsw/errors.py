"""Exception types shared across the solver."""


class InvalidStateError(RuntimeError):
    """State violates a physical validity requirement (h > 0, hb > 0)."""


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time integration."""

    def __init__(self, message: str, step: int | None = None, stage: int | None = None):
        super().__init__(message)
        self.step = step
        self.stage = stage


class ConfigError(ValueError):
    """Run configuration failed validation."""
