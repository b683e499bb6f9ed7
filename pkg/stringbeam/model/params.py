"""
Material parameters, system selection and energy weights.

The two transmission systems share the same twelve constants and two
lengths; which component carries the Cattaneo heat pair is decided by
SystemKind. Every constant that appears in the PDEs or the energies is read
from here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields, asdict
from enum import Enum
from typing import Any

from stringbeam.utils.constants import DEFAULT_LENGTH, DEFAULT_PARAM_VALUE, PARAM_NAMES
from stringbeam.utils.validators import ValidationError, validate_positive

logger = logging.getLogger(__name__)


class SystemKind(Enum):
    """Which component is thermoelastic."""

    S1_THERMO_STRING_ELASTIC_BEAM = "S1"
    S2_ELASTIC_STRING_THERMO_BEAM = "S2"

    @classmethod
    def parse(cls, value: str | SystemKind) -> SystemKind:
        if isinstance(value, cls):
            return value
        for kind in cls:
            if str(value).strip().upper() in (kind.value, kind.name):
                return kind
        raise ValidationError(f"Unknown system '{value}'. Must be one of: S1, S2")

    @property
    def heated_string(self) -> bool:
        return self is SystemKind.S1_THERMO_STRING_ELASTIC_BEAM


S1 = SystemKind.S1_THERMO_STRING_ELASTIC_BEAM
S2 = SystemKind.S2_ELASTIC_STRING_THERMO_BEAM


@dataclass(frozen=True)
class MaterialParams:
    """Positive constants of both components plus the two lengths."""

    alpha1: float = DEFAULT_PARAM_VALUE
    beta1: float = DEFAULT_PARAM_VALUE
    gamma1: float = DEFAULT_PARAM_VALUE
    delta1: float = DEFAULT_PARAM_VALUE
    tau1: float = DEFAULT_PARAM_VALUE
    kappa1: float = DEFAULT_PARAM_VALUE
    alpha2: float = DEFAULT_PARAM_VALUE
    beta2: float = DEFAULT_PARAM_VALUE
    gamma2: float = DEFAULT_PARAM_VALUE
    delta2: float = DEFAULT_PARAM_VALUE
    tau2: float = DEFAULT_PARAM_VALUE
    kappa2: float = DEFAULT_PARAM_VALUE
    ell1: float = DEFAULT_LENGTH
    ell2: float = DEFAULT_LENGTH

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MaterialParams:
        unknown = sorted(set(data) - set(PARAM_NAMES))
        if unknown:
            raise ValidationError(f"Unknown parameter(s): {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def replace(self, **changes: float) -> MaterialParams:
        values = self.to_dict()
        values.update(changes)
        return MaterialParams(**values)


@dataclass(frozen=True)
class ValidatedParams(MaterialParams):
    """
    MaterialParams whose fields have all been checked to be positive.

    Fields are checked on construction and stored as floats.
    """

    def __post_init__(self):
        for field in fields(self):
            object.__setattr__(self, field.name, validate_positive(getattr(self, field.name), field.name))


@dataclass(frozen=True)
class WeightSet:
    """Scalar weights of the energy quadratic form, one per energy block."""

    string_velocity: float
    string_strain: float
    beam_velocity: float
    beam_curvature: float
    temperature: float
    heat_flux: float


def validate_params(p: MaterialParams) -> ValidatedParams:
    """
    Check every material constant and length for strict positivity.

    Args:
        p: Parameters to check

    Returns:
        The same values as ValidatedParams (converted to float, nothing else
        is normalized)

    Raises:
        NonPositiveParameter: Naming the first offending field
    """
    if isinstance(p, ValidatedParams):
        return p
    return ValidatedParams(**p.to_dict())


def energy_weights(p: ValidatedParams, kind: SystemKind) -> WeightSet:
    """
    Per-block weights of the energy of the selected system.

    The thermoelastic component carries the delta/beta scaling on its
    mechanical blocks; the heat flux carries gamma*tau/kappa.
    """
    if kind is S1:
        return WeightSet(
            string_velocity=p.delta1 / p.beta1,
            string_strain=p.delta1 * p.alpha1 / p.beta1,
            beam_velocity=1.0,
            beam_curvature=p.alpha2,
            temperature=1.0,
            heat_flux=p.gamma1 * p.tau1 / p.kappa1,
        )
    return WeightSet(
        string_velocity=1.0,
        string_strain=p.alpha1,
        beam_velocity=p.delta2 / p.beta2,
        beam_curvature=p.delta2 * p.alpha2 / p.beta2,
        temperature=1.0,
        heat_flux=p.gamma2 * p.tau2 / p.kappa2,
    )


def interface_coefficient(p: ValidatedParams, kind: SystemKind) -> float:
    """
    Coefficient multiplying u1_x(0) in the beam-side shear balance.

    S1: alpha2*u2_xxx(0) = (delta1/beta1)*alpha1*u1_x(0).
    S2: (alpha2*u2_xxx - beta2*theta2_x)(0) = (beta2/delta2)*alpha1*u1_x(0).
    """
    if kind is S1:
        return p.delta1 * p.alpha1 / p.beta1
    return p.beta2 * p.alpha1 / p.delta2


def heat_constants(p: ValidatedParams, kind: SystemKind) -> tuple[float, float, float, float]:
    """(gamma, delta, tau, kappa) of the heated component."""
    if kind is S1:
        return p.gamma1, p.delta1, p.tau1, p.kappa1
    return p.gamma2, p.delta2, p.tau2, p.kappa2
