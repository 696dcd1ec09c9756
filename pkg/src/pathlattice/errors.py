"""Exception types shared across the package."""


class GuardViolation(ValueError):
    """A numerical precondition (stability or resolution guard) was violated.

    ``guard`` names the violated bound so callers (the CLI in particular) can
    report it verbatim.
    """

    def __init__(self, guard: str, message: str):
        super().__init__(f"{guard}: {message}")
        self.guard = guard


class ConfigError(ValueError):
    """An experiment configuration failed schema or value validation."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field
