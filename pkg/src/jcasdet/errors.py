class ConfigError(ValueError):
    """Invalid experiment or model configuration (CLI exit code 2)."""


class NumericalContractError(ArithmeticError):
    """A numerical post-condition was violated (CLI exit code 3)."""


class AssumptionWarning(UserWarning):
    """The configuration leaves the large-system regime the detector is built for."""
