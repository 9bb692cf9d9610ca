"""Exception hierarchy shared across the package."""


class FolksimError(Exception):
    pass


class ConfigError(FolksimError, ValueError):
    """A parameter is outside its valid range."""


class DataError(FolksimError, ValueError):
    """Input data is malformed, empty or inconsistent."""
