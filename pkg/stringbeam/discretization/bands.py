"""
Frequency bands of a discretization.

A grid resolves a time frequency w when a wave of that frequency gets
POINTS_PER_FREQUENCY points per half wavelength on both components:

    string: k = w / sqrt(alpha1),        n1 >= POINTS * k * ell1 / pi
    beam:   k = (w / sqrt(alpha2))^(1/2), n2 >= POINTS * k * ell2 / pi

With unit speeds this reduces to n >= 20 * w * ell / pi.

The string operator has a finite cutoff 2*sqrt(alpha1)/h1; beam modes above
it cannot leak energy into the (heated, for S1) string and are damped only
through their evanescent tail. A grid is balanced when the top beam
frequency 4*sqrt(alpha2)/h2^2 stays below half that cutoff.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from stringbeam.model import S1, MaterialParams, SystemKind
from stringbeam.utils.constants import POINTS_PER_FREQUENCY

logger = logging.getLogger(__name__)


def resolved_frequency(p: MaterialParams, n1: int, n2: int) -> float:
    """Largest frequency resolved by n1 string cells and n2 beam cells."""
    string = math.sqrt(p.alpha1) * math.pi * n1 / (POINTS_PER_FREQUENCY * p.ell1)
    beam = math.sqrt(p.alpha2) * (math.pi * n2 / (POINTS_PER_FREQUENCY * p.ell2)) ** 2
    return min(string, beam)


def string_cutoff(p: MaterialParams, n1: int) -> float:
    return 2.0 * math.sqrt(p.alpha1) * n1 / p.ell1


def beam_top(p: MaterialParams, n2: int) -> float:
    return 4.0 * math.sqrt(p.alpha2) * (n2 / p.ell2) ** 2


def matched_string_cells(p: MaterialParams, n2: int) -> int:
    """Fewest string cells that keep every beam frequency below half the string cutoff."""
    return math.ceil(4.0 * math.sqrt(p.alpha2 / p.alpha1) * n2 * n2 * p.ell1 / p.ell2 ** 2)


@dataclass(frozen=True)
class FrequencyBands:
    """Resolved band, string cutoff and top beam frequency of one grid pair."""

    kind: SystemKind
    resolved: float
    string_cutoff: float
    beam_top: float

    @property
    def beam_trapped(self) -> bool:
        """S1 only: beam modes above half the string cutoff never reach the heat."""
        return self.kind is S1 and self.beam_top > 0.5 * self.string_cutoff

    def describe(self) -> str:
        return (f"resolved band |w| <= {self.resolved:.4g}, string cutoff {self.string_cutoff:.4g}, "
                f"beam top {self.beam_top:.4g}")


def frequency_bands(p: MaterialParams, kind: SystemKind, n1: int, n2: int) -> FrequencyBands:
    return FrequencyBands(
        kind=kind,
        resolved=resolved_frequency(p, n1, n2),
        string_cutoff=string_cutoff(p, n1),
        beam_top=beam_top(p, n2),
    )


def warn_if_trapped(bands: FrequencyBands, n2: int, p: MaterialParams) -> bool:
    """Log a warning for an S1 grid pair with trapped beam modes; True when trapped."""
    if not bands.beam_trapped:
        return False
    logger.warning(
        f"S1 grid traps beam modes above the string cutoff ({bands.describe()}); energy decay "
        f"stalls at a grid-dependent floor. Use n1 >= {matched_string_cells(p, n2)} for n2={n2}"
    )
    return True
