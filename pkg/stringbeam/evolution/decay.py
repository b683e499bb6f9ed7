"""Decay-law fitting on energy traces: exponential against power law."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from stringbeam.evolution.integrator import EnergyTrace
from stringbeam.linalg import LineFit, fit_line
from stringbeam.utils.constants import ENERGY_UNDERFLOW, MIN_FIT_SAMPLES
from stringbeam.utils.errors import EnergyUnderflow, WindowTooSmall
from stringbeam.utils.validators import validate_range

logger = logging.getLogger(__name__)


class DecayModel(Enum):
    EXPONENTIAL = "Exponential"
    POLYNOMIAL = "Polynomial"


@dataclass(frozen=True)
class DecayFit:
    """
    Winning decay model with both candidate fits.

    For EXPONENTIAL, `rate` is lambda in E ~ exp(-lambda t); for POLYNOMIAL
    it is p in E ~ t^(-p).
    """

    model: DecayModel
    rate: float
    r_squared: float
    window: tuple[float, float]
    samples: int
    exponential: LineFit
    polynomial: LineFit

    def summary(self) -> str:
        name = "rate" if self.model is DecayModel.EXPONENTIAL else "exponent"
        return (
            f"model: {self.model.value}\n"
            f"{name}: {self.rate:.10g}\n"
            f"r_squared: {self.r_squared:.10g}\n"
            f"window: [{self.window[0]:.10g}, {self.window[1]:.10g}] ({self.samples} samples)\n"
            f"exponential_rate: {-self.exponential.slope:.10g} "
            f"(r_squared {self.exponential.r_squared:.10g})\n"
            f"polynomial_exponent: {-self.polynomial.slope:.10g} "
            f"(r_squared {self.polynomial.r_squared:.10g})\n"
        )


def fit_decay(trace: EnergyTrace, window: tuple[float, float] | None = None) -> DecayFit:
    """
    Fit log E against t and against log t on a window of the trace.

    Samples at t <= 0 never enter the fit, so a window starting at 0 fits
    from the first recorded step on.

    Args:
        trace: Energy trace
        window: (t_start, t_stop); defaults to [t_end/10, t_end]

    Returns:
        DecayFit for the model with the larger R^2 (ties go to EXPONENTIAL)

    Raises:
        WindowTooSmall: Fewer than 10 samples in the window
        EnergyUnderflow: Some energy in the window is below 1e-300
    """
    t_end = trace.t_end
    if window is None:
        window = (t_end / 10.0, t_end)
    start, stop = validate_range(window[0], window[1], name="window")

    times = np.asarray(trace.times, dtype=float)
    energies = np.asarray(trace.energies, dtype=float)
    inside = (times >= start) & (times <= stop) & (times > 0.0)
    count = int(inside.sum())
    if count < MIN_FIT_SAMPLES:
        raise WindowTooSmall(
            f"Window [{start:g}, {stop:g}] holds {count} samples, need {MIN_FIT_SAMPLES}"
        )
    t, e = times[inside], energies[inside]
    if np.any(e < ENERGY_UNDERFLOW):
        raise EnergyUnderflow(f"Energy below {ENERGY_UNDERFLOW:g} inside [{start:g}, {stop:g}]")

    log_e = np.log(e)
    exponential = fit_line(t, log_e)
    polynomial = fit_line(np.log(t), log_e)

    if exponential.r_squared >= polynomial.r_squared:
        model, chosen = DecayModel.EXPONENTIAL, exponential
    else:
        model, chosen = DecayModel.POLYNOMIAL, polynomial
    fit = DecayFit(
        model=model,
        rate=-chosen.slope,
        r_squared=chosen.r_squared,
        window=(start, stop),
        samples=count,
        exponential=exponential,
        polynomial=polynomial,
    )
    logger.info(f"Decay fit: {model.value}, rate {fit.rate:.6g}, R^2 {fit.r_squared:.6f}")
    return fit
