class ConfigurationError(ValueError):
    """Invalid parameters, specs or configuration files."""


class InputError(ValueError):
    """Degenerate data passed to an analysis or statistics routine."""
