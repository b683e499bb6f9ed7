"""
Model module - physical parameters, system selection and energy weights.
"""

from .params import (  # noqa: F401
    SystemKind,
    S1,
    S2,
    MaterialParams,
    ValidatedParams,
    WeightSet,
    validate_params,
    energy_weights,
    interface_coefficient,
    heat_constants,
)
