"""
Input validation utilities for the thermoelastic string/beam laboratory.

Provides validation functions for integers, reals, ranges and enums.
Raises ValidationError (or one of its subclasses) for validation failures.
"""

from __future__ import annotations
import math
from typing import Any


class ValidationError(Exception):
    """Raised when input validation fails."""
    pass


class NonPositiveParameter(ValidationError):
    """Raised when a material constant or length is not strictly positive."""

    def __init__(self, name: str, value: Any = None):
        super().__init__(f"Parameter '{name}' must be strictly positive (got {value!r})")
        self.name = name


class GridTooCoarse(ValidationError):
    """Raised when a grid has fewer cells than the minimum."""
    pass


class DimensionMismatch(ValidationError):
    """Raised when a vector does not match the operator it is applied to."""
    pass


class AssemblyError(ValidationError):
    """Raised when generator blocks have inconsistent dimensions."""
    pass


class BadRecipe(ValidationError):
    """Raised for an unknown or unusable initial-data recipe."""
    pass


class PreconditionViolation(ValidationError):
    """Raised when an operation's documented precondition does not hold."""
    pass


class ConfigError(ValidationError):
    """Raised for malformed experiment configuration files."""
    pass


def validate_int(
    value: Any,
    min_val: int | None = None,
    max_val: int | None = None,
    default: int | None = None,
    name: str = "value",
) -> int | None:
    """
    Safely convert a value to an integer with optional bounds checking.

    Args:
        value: Value to convert (int, integral float or numeric string)
        min_val: Minimum allowed value (inclusive)
        max_val: Maximum allowed value (inclusive)
        default: Default value to return if value is None/empty
        name: Field name used in error messages

    Returns:
        Parsed integer, default value, or None

    Raises:
        ValidationError: If value is not a valid integer or is out of bounds
    """
    if value is None or value == "":
        return default

    if isinstance(value, bool):
        raise ValidationError(f"Invalid integer for '{name}': {value!r}")

    try:
        if isinstance(value, float):
            if not value.is_integer():
                raise ValueError
            int_value = int(value)
        else:
            int_value = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"Invalid integer for '{name}': {value!r}")

    if min_val is not None and int_value < min_val:
        raise ValidationError(f"'{name}' = {int_value} is below minimum {min_val}")

    if max_val is not None and int_value > max_val:
        raise ValidationError(f"'{name}' = {int_value} exceeds maximum {max_val}")

    return int_value


def validate_float(
    value: Any,
    min_val: float | None = None,
    max_val: float | None = None,
    default: float | None = None,
    name: str = "value",
    strict_min: bool = False,
) -> float | None:
    """
    Convert a value to a finite float with optional bounds checking.

    Args:
        value: Value to convert
        min_val: Minimum allowed value
        max_val: Maximum allowed value (inclusive)
        default: Default value to return if value is None/empty
        name: Field name used in error messages
        strict_min: Treat min_val as an exclusive bound

    Returns:
        Parsed float, default value, or None

    Raises:
        ValidationError: If value is not a finite number or is out of bounds
    """
    if value is None or value == "":
        return default

    if isinstance(value, bool):
        raise ValidationError(f"Invalid number for '{name}': {value!r}")

    try:
        float_value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"Invalid number for '{name}': {value!r}")

    if not math.isfinite(float_value):
        raise ValidationError(f"'{name}' must be finite (got {float_value})")

    if min_val is not None:
        if strict_min and float_value <= min_val:
            raise ValidationError(f"'{name}' = {float_value} must exceed {min_val}")
        if not strict_min and float_value < min_val:
            raise ValidationError(f"'{name}' = {float_value} is below minimum {min_val}")

    if max_val is not None and float_value > max_val:
        raise ValidationError(f"'{name}' = {float_value} exceeds maximum {max_val}")

    return float_value


def validate_positive(value: Any, name: str) -> float:
    """Validate a strictly positive finite real; raises NonPositiveParameter."""
    try:
        float_value = validate_float(value, name=name)
    except ValidationError:
        raise NonPositiveParameter(name, value)
    if float_value is None or float_value <= 0.0:
        raise NonPositiveParameter(name, value)
    return float_value


def validate_range(
    low: Any,
    high: Any,
    name: str = "range",
    positive: bool = False,
) -> tuple[float, float]:
    """
    Validate an ordered, nonempty real interval.

    Args:
        low: Lower end
        high: Upper end
        name: Field name used in error messages
        positive: Require low > 0

    Returns:
        (low, high) as floats

    Raises:
        ValidationError: If the interval is empty or not finite
    """
    low_value = validate_float(low, name=f"{name}[0]")
    high_value = validate_float(high, name=f"{name}[1]")
    if low_value is None or high_value is None:
        raise ValidationError(f"'{name}' needs both ends")
    if positive and low_value <= 0.0:
        raise ValidationError(f"'{name}' must start above 0 (got {low_value})")
    if not low_value < high_value:
        raise ValidationError(f"'{name}' is empty: [{low_value}, {high_value}]")
    return low_value, high_value


def validate_enum(
    value: str | None,
    allowed_values: list[str],
    default: str,
    case_sensitive: bool = False,
) -> str:
    """
    Validate that a value is in the list of allowed values.

    Args:
        value: Value to check
        allowed_values: List of valid values
        default: Default value to return if value is None/empty
        case_sensitive: Whether comparison should be case-sensitive

    Returns:
        Valid value from allowed_values or default

    Raises:
        ValidationError: If value is not in allowed_values
    """
    if value is None or value == "":
        return default

    if not isinstance(value, str):
        raise ValidationError(
            f"Invalid value {value!r}. Must be one of: {', '.join(allowed_values)}"
        )

    value = value.strip()

    if case_sensitive:
        if value not in allowed_values:
            raise ValidationError(
                f"Invalid value '{value}'. Must be one of: {', '.join(allowed_values)}"
            )
        return value

    # Return the original case from allowed_values
    for allowed in allowed_values:
        if allowed.lower() == value.lower():
            return allowed
    raise ValidationError(
        f"Invalid value '{value}'. Must be one of: {', '.join(allowed_values)}"
    )


def validate_increasing(values: Any, name: str = "values", min_len: int = 1) -> list[float]:
    """
    Validate a strictly increasing list of finite reals.

    Raises:
        ValidationError: If the list is too short or not strictly increasing
    """
    if values is None or isinstance(values, (str, bytes)):
        raise ValidationError(f"'{name}' must be a list of numbers")
    try:
        items = [validate_float(v, name=name) for v in values]
    except TypeError:
        raise ValidationError(f"'{name}' must be a list of numbers")
    if len(items) < min_len:
        raise ValidationError(f"'{name}' needs at least {min_len} entries (got {len(items)})")
    for previous, current in zip(items, items[1:]):
        if not current > previous:
            raise ValidationError(f"'{name}' must be strictly increasing")
    return items
