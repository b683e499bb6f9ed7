"""
Resolvent norms r(beta) = ||(i beta - A_h)^{-1}||_M along the imaginary axis.

Each point factors i*beta*I - A_h in band form and runs block inverse
iteration for its smallest M-singular value. Start vectors are seeded from
the bits of beta, so a scan gives the same numbers in any order and with
any number of worker threads.

Only the part of a scan inside the grid's resolved band (see
stringbeam.discretization.bands) enters the envelope ratio and the growth
fit; the rest is computed and written but carries no evidence.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from stringbeam.discretization import BlockGenerator, resolved_frequency
from stringbeam.linalg import (
    LineFit,
    factor_sparse,
    fit_line,
    lu_solve,
    shift_invert_eigs,
    smallest_singular_value,
)
from stringbeam.utils.constants import (
    DEFAULT_WORKERS,
    ENVELOPE_BINS_PER_DECADE,
    MAX_ITERATIONS,
    MIN_ENVELOPE_BINS,
    MIN_FIT_SAMPLES,
    MIN_RESOLVED_DECADES,
    NEAR_SINGULAR_SHIFT,
    SVD_TOL,
)
from stringbeam.utils.errors import (
    NearSingularShift,
    NoConvergence,
    SingularMatrix,
    UnderResolved,
    WindowTooSmall,
)
from stringbeam.utils.tables import write_csv
from stringbeam.utils.validators import validate_int, validate_range

logger = logging.getLogger(__name__)

SCAN_FIELDS = ("beta", "r")

# Relative tolerance of the bounded search used when no eigenvalue anchors a peak
PEAK_XATOL = 1e-4


def shift_seed(shift: complex) -> int:
    """Deterministic iteration seed derived from the bits of a shift."""
    parts = np.array([complex(shift).real, complex(shift).imag], dtype="<f8")
    return int.from_bytes(parts.tobytes(), "little") % (2 ** 63)


def resolvent_point(
    g: BlockGenerator,
    beta: float,
    tol: float = SVD_TOL,
    max_iter: int = MAX_ITERATIONS,
) -> tuple[float, int]:
    """(r(beta), iterations); see resolvent_norm."""
    shifted = g.shifted(1j * beta)
    try:
        factors = factor_sparse(shifted, g.ordering)
    except SingularMatrix as e:
        raise NearSingularShift(f"i*{beta:g} is an eigenvalue to working precision: {e}")

    sigma, iterations = smallest_singular_value(
        factors, g.inner_product, tol, max_iter, seed=shift_seed(1j * beta)
    )
    scale = abs(beta) + g.operator_norm
    if sigma < NEAR_SINGULAR_SHIFT * scale:
        raise NearSingularShift(
            f"sigma_min = {sigma:.3e} at beta = {beta:g} is below {NEAR_SINGULAR_SHIFT:g} * {scale:.3e}"
        )
    return 1.0 / sigma, iterations


def resolvent_norm(g: BlockGenerator, beta: float) -> float:
    """
    M-norm of the resolvent (i beta - A_h)^{-1}.

    Raises:
        NearSingularShift: If i*beta sits on an eigenvalue of A_h
        NoConvergence: If the singular value iteration does not settle
    """
    return resolvent_point(g, beta)[0]


@dataclass
class ResolventScan:
    """
    Scan points and (optionally refined) local maxima of r(beta).

    `beta_resolved` is the top of the grid's resolved band; the envelope
    ratio and the growth fit only look at points at or below it.
    """

    betas: np.ndarray
    norms: np.ndarray
    iterations: np.ndarray
    peak_betas: np.ndarray = field(default_factory=lambda: np.empty(0))
    peak_norms: np.ndarray = field(default_factory=lambda: np.empty(0))
    beta_resolved: float = math.inf

    def __len__(self) -> int:
        return len(self.betas)

    def resolved_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Scan points with beta <= beta_resolved."""
        keep = self.betas <= self.beta_resolved
        return self.betas[keep], self.norms[keep]

    def resolved_peaks(self) -> tuple[np.ndarray, np.ndarray]:
        keep = self.peak_betas <= self.beta_resolved
        return self.peak_betas[keep], self.peak_norms[keep]

    def top_decade_ratio(self) -> float:
        """
        max r / min r over the top decade of the resolved part of the scan, peaks included.

        Raises:
            UnderResolved: If fewer than two resolved values lie in that decade
        """
        betas = np.concatenate([self.resolved_points()[0], self.resolved_peaks()[0]])
        norms = np.concatenate([self.resolved_points()[1], self.resolved_peaks()[1]])
        if len(betas) < 2:
            raise UnderResolved(
                f"Fewer than two scan points lie in the resolved band beta <= {self.beta_resolved:.4g}"
            )
        top = norms[betas >= betas.max() / 10.0]
        if len(top) < 2:
            raise UnderResolved(f"The top decade below beta = {betas.max():.4g} holds a single point")
        return float(top.max() / top.min())

    def rows(self):
        for beta, r in zip(self.betas, self.norms):
            yield {"beta": beta, "r": r}

    def to_csv(self, path):
        return write_csv(path, SCAN_FIELDS, self.rows())


def _nearest_eigenvalue(g: BlockGenerator, beta: float) -> complex | None:
    """Eigenvalue of A_h nearest i*beta, or None when the iteration fails."""
    shift = 1j * beta
    try:
        factors = factor_sparse(g.shifted(shift), g.ordering)
        pairs = shift_invert_eigs(
            lambda x: lu_solve(factors, x),
            shift,
            1,
            apply_operator=lambda x: g.operator @ x,
            dim=g.dim,
            inner=g.inner_product,
            seed=shift_seed(shift),
        )
    except (SingularMatrix, NoConvergence) as e:
        logger.debug(f"No eigenvalue anchor near beta={beta:g}: {e}")
        return None
    return pairs[0][0]


def _bounded_search(g: BlockGenerator, low: float, high: float, centre: float) -> tuple[float, float]:
    result = minimize_scalar(
        lambda b: -math.log(resolvent_norm(g, b)),
        bounds=(low, high),
        method="bounded",
        options={"xatol": PEAK_XATOL * centre},
    )
    return float(result.x), math.exp(-result.fun)


def _refine_peak(g: BlockGenerator, betas: np.ndarray, norms: np.ndarray, i: int) -> tuple[float, float]:
    """
    Raise scan peak i to the resonance it belongs to; never worse than the grid value.

    The eigenvalue nearest i*beta_i anchors the peak: when its imaginary part
    lies inside the bracket of the two neighbouring scan points, r is
    evaluated there. Otherwise the bracket is searched by bounded
    maximization.
    """
    low, high = float(betas[i - 1]), float(betas[i + 1])
    best = (float(betas[i]), float(norms[i]))
    anchor = _nearest_eigenvalue(g, float(betas[i]))
    try:
        if anchor is not None and low <= abs(anchor.imag) <= high:
            candidate = abs(anchor.imag)
            found = (candidate, resolvent_norm(g, candidate))
        else:
            found = _bounded_search(g, low, high, float(betas[i]))
    except NearSingularShift as e:
        logger.warning(f"Peak refinement near beta={betas[i]:g} hit an eigenvalue: {e}")
        return best
    return found if found[1] > best[1] else best


def resolvent_scan(
    g: BlockGenerator,
    beta_min: float,
    beta_max: float,
    count: int,
    workers: int = DEFAULT_WORKERS,
    refine_peaks: bool = True,
) -> ResolventScan:
    """
    Resolvent norms at `count` log-spaced points of [beta_min, beta_max].

    Args:
        g: Generator
        beta_min: First frequency (> 0)
        beta_max: Last frequency
        count: Number of scan points (>= 1; count = 1 evaluates beta_min)
        workers: Thread count; results do not depend on it
        refine_peaks: Anchor interior local maxima on the nearest eigenvalue

    Returns:
        ResolventScan, with beta_resolved set from the grid when g was assembled
    """
    beta_min, beta_max = validate_range(beta_min, beta_max, name="beta range", positive=True)
    count = validate_int(count, min_val=1, name="count")
    workers = validate_int(workers, min_val=1, name="workers")
    betas = np.geomspace(beta_min, beta_max, count)
    g.inner_product  # factor M once before the threads start
    g.operator_norm

    beta_resolved = math.inf
    if g.layout is not None and g.params is not None:
        beta_resolved = resolved_frequency(g.params, g.layout.n1, g.layout.n2)
        if beta_max > beta_resolved:
            logger.warning(f"Scan reaches beta = {beta_max:g}, beyond the resolved band "
                           f"beta <= {beta_resolved:.4g} of n1={g.layout.n1}, n2={g.layout.n2}")

    logger.info(f"Resolvent scan: {count} points in [{beta_min:g}, {beta_max:g}], workers={workers}")
    if workers == 1:
        results = [resolvent_point(g, b) for b in betas]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: resolvent_point(g, b), betas))
    norms = np.array([r for r, _ in results])
    iterations = np.array([it for _, it in results], dtype=int)

    scan = ResolventScan(betas=betas, norms=norms, iterations=iterations, beta_resolved=beta_resolved)
    if count >= 3:
        peaks, _ = find_peaks(np.log(norms))
        if refine_peaks and len(peaks):
            refined = [_refine_peak(g, betas, norms, int(i)) for i in peaks]
            scan.peak_betas = np.array([b for b, _ in refined])
            scan.peak_norms = np.array([r for _, r in refined])
        else:
            scan.peak_betas, scan.peak_norms = betas[peaks], norms[peaks]
        logger.debug(f"Resolvent scan: {len(peaks)} local maxima")
    return scan


@dataclass(frozen=True)
class GrowthFit:
    """log r = slope * log beta + intercept on the upper envelope."""

    slope: float
    intercept: float
    r_squared: float
    points: int
    source: str
    line: LineFit
    envelope_betas: np.ndarray = field(default_factory=lambda: np.empty(0))
    envelope_norms: np.ndarray = field(default_factory=lambda: np.empty(0))

    def summary(self) -> str:
        return (
            f"slope: {self.slope:.10g}\n"
            f"intercept: {self.intercept:.10g}\n"
            f"r_squared: {self.r_squared:.10g}\n"
            f"envelope: {self.points} points ({self.source})\n"
        )


def upper_envelope(
    betas: np.ndarray,
    norms: np.ndarray,
    bins_per_decade: int = ENVELOPE_BINS_PER_DECADE,
) -> tuple[np.ndarray, np.ndarray]:
    """The largest r in each logarithmic bin [10^(j/b), 10^((j+1)/b)), in increasing beta."""
    betas = np.asarray(betas, dtype=float)
    norms = np.asarray(norms, dtype=float)
    bins = np.floor(np.log10(betas) * bins_per_decade + 1e-9).astype(int)
    chosen = []
    for b in np.unique(bins):
        members = np.flatnonzero(bins == b)
        chosen.append(members[np.argmax(norms[members])])
    chosen = np.array(chosen, dtype=int)
    return betas[chosen], norms[chosen]


def fit_resolvent_growth(scan: ResolventScan) -> GrowthFit:
    """
    Fit log r against log beta on the upper envelope of the resolved scan.

    Candidates are the resolved local maxima when there are at least two of
    them, otherwise the resolved scan points. The envelope keeps the largest
    candidate per logarithmic bin (ENVELOPE_BINS_PER_DECADE per decade), so
    the fit follows the resonances rather than the dips between them.

    Raises:
        WindowTooSmall: If the scan has fewer than 10 points
        UnderResolved: If the resolved candidates span less than
            MIN_RESOLVED_DECADES or fill fewer than MIN_ENVELOPE_BINS bins
    """
    if len(scan) < MIN_FIT_SAMPLES:
        raise WindowTooSmall(f"A growth fit needs {MIN_FIT_SAMPLES} scan points (got {len(scan)})")

    betas, norms = scan.resolved_peaks()
    source = "peaks"
    if len(betas) < 2:
        betas, norms = scan.resolved_points()
        source = "scan"
    if len(betas) < 2 or math.log10(betas.max() / betas.min()) < MIN_RESOLVED_DECADES:
        raise UnderResolved(
            f"The resolved band beta <= {scan.beta_resolved:.4g} leaves less than "
            f"{MIN_RESOLVED_DECADES:g} decades of the scan to fit"
        )
    envelope_betas, envelope_norms = upper_envelope(betas, norms)
    if len(envelope_betas) < MIN_ENVELOPE_BINS:
        raise UnderResolved(
            f"The envelope fills {len(envelope_betas)} bins, need {MIN_ENVELOPE_BINS}"
        )
    line = fit_line(np.log(envelope_betas), np.log(envelope_norms))
    logger.info(f"Resolvent growth slope {line.slope:.4f} from {len(envelope_betas)} envelope bins "
                f"({len(betas)} {source} points)")
    return GrowthFit(
        slope=line.slope,
        intercept=line.intercept,
        r_squared=line.r_squared,
        points=len(envelope_betas),
        source=source,
        line=line,
        envelope_betas=envelope_betas,
        envelope_norms=envelope_norms,
    )
