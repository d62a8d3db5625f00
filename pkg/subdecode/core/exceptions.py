"""Exception classes for subdecode."""


class SubdecodeError(Exception):
    """Base exception for all subdecode errors."""

    pass


class ConfigurationError(SubdecodeError):
    """Configuration error."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnknownSchemeError(ConfigurationError):
    """A scheme, split or check name is not recognised."""

    def __init__(self, name: str, kind: str = "scheme", choices: list[str] | None = None):
        message = f"Unknown {kind}: {name}"
        if choices:
            message += f" (expected one of: {', '.join(choices)})"
        super().__init__(message, field=kind)
        self.name = name


class DimensionError(SubdecodeError):
    """Operand shapes do not agree."""

    pass


class NumericalError(SubdecodeError):
    """Input is not finite or violates a numeric precondition."""

    pass


class DegenerateBasisError(NumericalError):
    """A factorization met a rank-deficient input."""

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


class PatternError(SubdecodeError):
    """Invalid code parameters or sparsity pattern."""

    pass


class ProblemError(SubdecodeError):
    """Invalid problem input."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class CombinatorialLimitError(SubdecodeError):
    """An exhaustive enumeration would be too large."""

    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count
