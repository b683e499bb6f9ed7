"""Eigenvalue branches near the imaginary axis and spectral-abscissa studies."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from stringbeam.discretization import BlockGenerator, assemble_generator, build_grids, resolved_frequency
from stringbeam.linalg import LineFit, factor_sparse, fit_line, lu_solve, shift_invert_eigs
from stringbeam.model import MaterialParams, SystemKind, validate_params
from stringbeam.spectral.resolvent import shift_seed
from stringbeam.utils.constants import (
    DEDUPE_RELATIVE,
    DEFAULT_EIGS_PER_SHIFT,
    DEFAULT_SHIFT_COUNT,
    DEFAULT_SIGMA_MIN,
    DEFAULT_WORKERS,
    EIG_TOL,
)
from stringbeam.utils.errors import DegenerateData, NearSingularShift, SingularMatrix, UnderResolved
from stringbeam.utils.tables import write_csv
from stringbeam.utils.validators import validate_float, validate_increasing, validate_int

logger = logging.getLogger(__name__)

EIGS_FIELDS = ("re_lambda", "im_lambda", "residual")
ABSCISSA_FIELDS = ("n", "max_re_lambda", "eigenvalues")


@dataclass
class EigenBranch:
    """Eigenvalues found near a list of shifts, with residuals and the shift used."""

    eigenvalues: np.ndarray
    residuals: np.ndarray
    shifts: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def abscissa(self) -> float:
        return float(self.eigenvalues.real.max())

    def least_damped(self) -> np.ndarray:
        """Per shift, the eigenvalue with the largest real part."""
        chosen = []
        for shift in np.unique(self.shifts):
            values = self.eigenvalues[self.shifts == shift]
            chosen.append(values[np.argmax(values.real)])
        return np.array(chosen)

    def fit_damping(self) -> LineFit:
        """
        Fit log(-Re lambda) = slope * log|Im lambda| + c on the least damped branch.

        Re lambda ~ -C |Im lambda|^(-sigma) gives slope = -sigma.

        Raises:
            DegenerateData: If fewer than two usable eigenvalues remain
        """
        branch = self.least_damped()
        usable = branch[(branch.real < 0.0) & (np.abs(branch.imag) > 0.0)]
        if len(np.unique(np.abs(usable.imag))) < 2:
            raise DegenerateData("The branch has fewer than two damped, oscillating eigenvalues")
        return fit_line(np.log(np.abs(usable.imag)), np.log(-usable.real))

    def rows(self):
        for value, residual in zip(self.eigenvalues, self.residuals):
            yield {"re_lambda": value.real, "im_lambda": value.imag, "residual": residual}

    def to_csv(self, path):
        return write_csv(path, EIGS_FIELDS, self.rows())


def sigma_shifts(sigma_min: float, sigma_max: float, count: int) -> np.ndarray:
    """count shifts i*sigma, evenly spaced on [sigma_min, sigma_max]."""
    return 1j * np.linspace(sigma_min, sigma_max, count)


def _eigs_near(g: BlockGenerator, shift: complex, k: int, tol: float) -> list[tuple[complex, float]]:
    try:
        factors = factor_sparse(g.shifted(shift), g.ordering)
    except SingularMatrix as e:
        raise NearSingularShift(f"Shift {shift} is an eigenvalue to working precision: {e}")
    return shift_invert_eigs(
        lambda x: lu_solve(factors, x),
        shift,
        min(k, g.dim),
        tol,
        apply_operator=lambda x: g.operator @ x,
        dim=g.dim,
        inner=g.inner_product,
        seed=shift_seed(shift),
    )


def eigen_branch(
    g: BlockGenerator,
    shifts,
    k_per_shift: int = DEFAULT_EIGS_PER_SHIFT,
    tol: float = EIG_TOL,
    workers: int = DEFAULT_WORKERS,
) -> EigenBranch:
    """
    Eigenvalues of A_h nearest each shift by shift-invert subspace iteration.

    Eigenvalues found from several shifts are merged when they agree to
    1e-8 * |lambda|; the first shift that found a value is kept. Every
    residual is an absolute bound: ||A x - lambda x||_M <= tol * ||x||_M.
    Shifts beyond the resolved band of an assembled grid are logged.

    Raises:
        NoConvergence: Carrying the shift whose iteration failed
        NearSingularShift: If a shift is itself an eigenvalue
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=complex))
    k_per_shift = validate_int(k_per_shift, min_val=1, name="k_per_shift")
    workers = validate_int(workers, min_val=1, name="workers")
    g.inner_product
    if g.layout is not None and g.params is not None and len(shifts):
        band = resolved_frequency(g.params, g.layout.n1, g.layout.n2)
        if np.abs(shifts.imag).max() > band:
            logger.warning(f"Shifts reach |Im| = {np.abs(shifts.imag).max():g}, beyond the resolved "
                           f"band {band:.4g} of n1={g.layout.n1}, n2={g.layout.n2}")

    if workers == 1:
        found = [_eigs_near(g, s, k_per_shift, tol) for s in shifts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(lambda s: _eigs_near(g, s, k_per_shift, tol), shifts))

    values, residuals, used = [], [], []
    for shift, pairs in zip(shifts, found):
        for value, residual in pairs:
            if any(abs(value - kept) < DEDUPE_RELATIVE * max(abs(value), 1e-300) for kept in values):
                continue
            values.append(value)
            residuals.append(residual)
            used.append(shift)
    logger.info(f"Eigen branch: {len(values)} eigenvalues from {len(shifts)} shifts")
    return EigenBranch(
        eigenvalues=np.array(values, dtype=complex),
        residuals=np.array(residuals),
        shifts=np.array(used, dtype=complex),
    )


@dataclass
class AbscissaTable:
    """Largest real part found on each grid of a refinement study."""

    cells: list[int]
    abscissae: list[float]
    counts: list[int]

    def relative_variation(self) -> float:
        """|a_last - a_prev| / |a_last| over the two finest grids."""
        if len(self.abscissae) < 2:
            return 0.0
        last, previous = self.abscissae[-1], self.abscissae[-2]
        return abs(last - previous) / abs(last) if last else float("inf")

    def is_increasing(self) -> bool:
        return all(b > a for a, b in zip(self.abscissae, self.abscissae[1:]))

    def rows(self):
        for n, a, c in zip(self.cells, self.abscissae, self.counts):
            yield {"n": n, "max_re_lambda": a, "eigenvalues": c}

    def to_csv(self, path):
        return write_csv(path, ABSCISSA_FIELDS, self.rows())


def spectral_abscissa_study(
    p: MaterialParams,
    kind: SystemKind,
    n_list,
    sigma_max: float,
    sigma_min: float = DEFAULT_SIGMA_MIN,
    shift_count: int = DEFAULT_SHIFT_COUNT,
    k_per_shift: int = DEFAULT_EIGS_PER_SHIFT,
    heat: bool = True,
    workers: int = DEFAULT_WORKERS,
) -> AbscissaTable:
    """
    Max Re lambda near i[sigma_min, sigma_max] on a sequence of grids (n1 = n2 = n).

    Every grid scans the same window, so the abscissae compare the same
    eigenvalues under refinement.

    Raises:
        UnderResolved: If sigma_max lies beyond the resolved band of the
            coarsest grid
    """
    p = validate_params(p)
    cells = [validate_int(n, min_val=4, name="n") for n in validate_increasing(n_list, name="n_list")]
    sigma_max = validate_float(sigma_max, min_val=0.0, strict_min=True, name="sigma_max")
    sigma_min = validate_float(sigma_min, min_val=0.0, strict_min=True, max_val=sigma_max,
                               name="sigma_min")
    coarsest = resolved_frequency(p, cells[0], cells[0])
    if sigma_max > coarsest:
        raise UnderResolved(
            f"sigma_max = {sigma_max:g} lies beyond the resolved band |w| <= {coarsest:.4g} "
            f"of the coarsest grid n = {cells[0]}"
        )

    abscissae, counts = [], []
    for n in cells:
        g = assemble_generator(p, kind, build_grids(p, n, n), heat=heat)
        branch = eigen_branch(
            g,
            sigma_shifts(sigma_min, sigma_max, shift_count),
            k_per_shift,
            workers=workers,
        )
        abscissae.append(branch.abscissa)
        counts.append(len(branch))
        logger.info(f"n={n}: spectral abscissa {branch.abscissa:.6e} ({len(branch)} eigenvalues)")
    return AbscissaTable(cells=cells, abscissae=abscissae, counts=counts)
