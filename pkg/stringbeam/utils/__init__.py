"""Shared validators, error types and constants."""

from .errors import (  # noqa: F401
    NumericalError,
    SingularMatrix,
    SingularStep,
    NoConvergence,
    NearSingularShift,
    DegenerateData,
    WindowTooSmall,
    EnergyUnderflow,
    DegenerateDiscriminant,
    NearSingularModeSystem,
    QuadratureFailure,
    UnderResolved,
)
from .validators import (  # noqa: F401
    ValidationError,
    NonPositiveParameter,
    GridTooCoarse,
    DimensionMismatch,
    AssemblyError,
    BadRecipe,
    PreconditionViolation,
    ConfigError,
)
