"""Error types shared across the package."""


class InvalidInputError(ValueError):
    """Input tensor violates a precondition (shape, finiteness, range)."""


class InvalidParameterError(ValueError):
    """A scalar/config parameter is outside its valid range."""


class ContractViolationError(RuntimeError):
    """An internal invariant that callers must uphold was broken."""


class TrainingDivergedError(RuntimeError):
    """Total loss exploded past the divergence guard."""


class ConfigError(ValueError):
    """Run configuration is malformed (unknown keys, bad values)."""
