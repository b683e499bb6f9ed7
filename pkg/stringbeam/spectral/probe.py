"""
Frequency probe for the S2 system: solve (i w - A_h) y = f with the string
force f = (0, -alpha1 sin(w x / sqrt(alpha1)), 0, ...) along the resonant
frequency sequence and record the energy-norm gains.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from stringbeam.analytic.dirichlet import resonant_frequencies
from stringbeam.discretization import BlockGenerator, assemble_generator, build_grids, sample_state
from stringbeam.linalg import LineFit, factor_sparse, fit_line, lu_solve
from stringbeam.model import S2, MaterialParams, validate_params
from stringbeam.utils.constants import MAX_PROBE_CELLS, POINTS_PER_FREQUENCY
from stringbeam.utils.errors import DegenerateData, NearSingularShift, SingularMatrix, UnderResolved
from stringbeam.utils.tables import write_csv
from stringbeam.utils.validators import PreconditionViolation, validate_float, validate_int

logger = logging.getLogger(__name__)

GAIN_FIELDS = ("w", "gain")


def required_cells(p: MaterialParams, w_max: float) -> int:
    """Smallest n with n >= 20 * w_max * max(ell) / pi."""
    return math.ceil(POINTS_PER_FREQUENCY * w_max * max(p.ell1, p.ell2) / math.pi)


def string_forcing(g: BlockGenerator, w: float) -> np.ndarray:
    """Discrete f with -alpha1 sin(w x / sqrt(alpha1)) in the string force block."""
    alpha1 = g.params.alpha1
    wavenumber = w / math.sqrt(alpha1)
    return sample_state(g, {"v1": lambda x: -alpha1 * np.sin(wavenumber * x)})


def probe_gains(g: BlockGenerator, frequencies, alpha_exponent: float = 0.0) -> np.ndarray:
    """
    w^-a ||y||_M / ||f||_M with (i w - A_h) y = f for each frequency.

    Raises:
        NearSingularShift: If i*w is an eigenvalue of A_h to working precision
    """
    gains = []
    for w in frequencies:
        f = string_forcing(g, w).astype(complex)
        try:
            factors = factor_sparse(g.shifted(1j * w), g.ordering)
        except SingularMatrix as e:
            raise NearSingularShift(f"i*{w:g} is an eigenvalue to working precision: {e}")
        y = lu_solve(factors, f)
        gain = w ** (-alpha_exponent) * g.inner_product.norm(y) / g.inner_product.norm(f)
        logger.debug(f"Probe w={w:.6g}: gain {gain:.6g}")
        gains.append(gain)
    return np.array(gains)


@dataclass
class ProbeTable:
    """Gains along a frequency list, with the grid that produced them."""

    frequencies: np.ndarray
    gains: np.ndarray
    cells: int
    alpha_exponent: float
    denominators: list[int] | None = None

    def fit(self) -> LineFit:
        """log gain against log w."""
        return fit_line(np.log(self.frequencies), np.log(self.gains))

    @property
    def exponent(self) -> float | None:
        try:
            return self.fit().slope
        except DegenerateData:
            return None

    def rows(self):
        for w, gain in zip(self.frequencies, self.gains):
            yield {"w": w, "gain": gain}

    def to_csv(self, path):
        return write_csv(path, GAIN_FIELDS, self.rows())


def lack_exp_probe(
    p: MaterialParams,
    count: int,
    alpha_exponent: float = 0.0,
    n: int | None = None,
    auto_resolve: bool = True,
    max_cells: int = MAX_PROBE_CELLS,
    frequencies=None,
) -> ProbeTable:
    """
    Gains of the S2 resolvent along the resonant frequency sequence.

    Args:
        p: Material parameters
        count: Number of sequence frequencies
        alpha_exponent: Exponent a of the w^-a normalization
        n: Cells per component; with auto_resolve it is raised to the
            resolution rule, otherwise a too-small n is an error
        auto_resolve: Pick the grid from the resolution rule
        max_cells: Largest grid the probe will build
        frequencies: Probe these frequencies instead of the sequence

    Returns:
        ProbeTable

    Raises:
        UnderResolved: If the grid cannot resolve the largest frequency
    """
    p = validate_params(p)
    count = validate_int(count, min_val=1, name="count")
    alpha_exponent = validate_float(alpha_exponent, name="alpha_exponent")
    max_cells = validate_int(max_cells, min_val=4, name="max_cells")

    denominators = None
    if frequencies is None:
        sequence = resonant_frequencies(p, count)
        frequencies, denominators = sequence.frequencies, sequence.denominators
    frequencies = np.asarray(frequencies, dtype=float)
    if frequencies.size == 0 or np.any(frequencies <= 0.0):
        raise PreconditionViolation("Probe frequencies must be positive")

    needed = max(required_cells(p, float(frequencies.max())), 4)
    if n is None or (auto_resolve and n < needed):
        n = needed
    n = validate_int(n, min_val=4, name="n")
    if n < needed:
        raise UnderResolved(f"n = {n} cannot resolve w = {frequencies.max():.6g} (needs n >= {needed})")
    if n > max_cells:
        raise UnderResolved(
            f"w = {frequencies.max():.6g} needs n = {n} cells, above the limit of {max_cells}"
        )

    logger.info(f"Lack-of-exponential-stability probe: {len(frequencies)} frequencies on n = {n}")
    g = assemble_generator(p, S2, build_grids(p, n, n))
    gains = probe_gains(g, frequencies, alpha_exponent)
    return ProbeTable(
        frequencies=frequencies,
        gains=gains,
        cells=n,
        alpha_exponent=alpha_exponent,
        denominators=denominators,
    )
