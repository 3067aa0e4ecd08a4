"""Exception hierarchy. Each class maps onto one CLI exit code."""


class SwbAssortError(Exception):
    exit_code = 1


class ConfigError(SwbAssortError, ValueError):
    exit_code = 2


class IngestionError(SwbAssortError):
    exit_code = 3

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{':'.join(where)}: {message}"
        super().__init__(message)


class LexiconError(IngestionError):
    pass


class ComputationError(SwbAssortError):
    exit_code = 4


class DegenerateInputError(ComputationError, ValueError):
    """Correlation input with zero variance or too few samples."""
