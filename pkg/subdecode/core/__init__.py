"""Core components of subdecode."""

from subdecode.core.exceptions import (
    CombinatorialLimitError,
    ConfigurationError,
    DegenerateBasisError,
    DimensionError,
    NumericalError,
    PatternError,
    ProblemError,
    SubdecodeError,
    UnknownSchemeError,
)
from subdecode.core.interfaces import (
    ErasureKind,
    MetricsRecord,
    MetricsTrace,
    ProblemKind,
    Scheme,
    SchemeLabel,
    SplitScheme,
)

__all__ = [
    "CombinatorialLimitError",
    "ConfigurationError",
    "DegenerateBasisError",
    "DimensionError",
    "ErasureKind",
    "MetricsRecord",
    "MetricsTrace",
    "NumericalError",
    "PatternError",
    "ProblemError",
    "ProblemKind",
    "Scheme",
    "SchemeLabel",
    "SplitScheme",
    "SubdecodeError",
    "UnknownSchemeError",
]
