from typing import Optional


class MatroidCutError(Exception):
    """Base class for every error raised by the library. `exit_code` is what the CLI returns."""
    exit_code = 1


class InvalidSubsetError(MatroidCutError, ValueError):
    pass


class InvalidPartitionError(MatroidCutError, ValueError):
    pass


class InvalidArgumentError(MatroidCutError, ValueError):
    pass


class InfeasibleError(MatroidCutError):
    pass


class PropertyViolationError(MatroidCutError):
    pass


class ResourceLimitError(MatroidCutError):
    pass


class InstanceValidationError(MatroidCutError, ValueError):
    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        context = []
        if field:
            context.append(f"field '{field}'")
        if line is not None:
            context.append(f"line {line}")
        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__(prefix + message)


class InternalInvariantError(MatroidCutError):
    exit_code = 2


class BoundViolationError(InternalInvariantError):
    pass
