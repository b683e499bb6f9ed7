"""
Exact solution of A y = F for the S1 system, used as an oracle for the
discrete operator.

With F = (f1, g1, h1, p1, f2, g2) acting on (u1, v1, theta1, q1, u2, v2),
the equations A y = F read

    v1 = f1,  alpha1 u1'' - beta1 theta1' = g1,
    -gamma1 q1' - delta1 v1' = h1,  q1 + kappa1 theta1' = -tau1 p1,
    v2 = f2,  -alpha2 u2'''' = g2,

with theta1 = 0 at both string ends, u1(l1) = 0, u2(l2) = u2''(l2) = 0,
u2'(0) = 0 and the interface conditions u1(0) = u2(0),
alpha2 u2'''(0) = (delta1/beta1) alpha1 u1'(0). Every quantity reduces to
iterated integrals int_0^x (x-s)^k / k! phi(s) ds, computed by adaptive
quadrature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from stringbeam.discretization import build_grids, assemble_generator, sample_state, solve
from stringbeam.linalg import LineFit, fit_line
from stringbeam.model import S1, MaterialParams, ValidatedParams, validate_params
from stringbeam.utils.constants import QUADRATURE_TOL
from stringbeam.utils.errors import DegenerateData, QuadratureFailure
from stringbeam.utils.tables import write_csv
from stringbeam.utils.validators import validate_float, validate_increasing, validate_int

logger = logging.getLogger(__name__)

CONVERGENCE_FIELDS = ("n", "h", "error")
QUAD_LIMIT = 200

Function = Callable[[float], float]


def iterated_integral(phi: Function, k: int, x) -> np.ndarray:
    """
    int_0^x (x - s)^k / k! * phi(s) ds for every entry of x.

    Raises:
        QuadratureFailure: If quad reports a problem or misses QUADRATURE_TOL
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    factorial = math.factorial(k)
    for i, upper in enumerate(x.flat):
        if upper == 0.0:
            out.flat[i] = 0.0
            continue
        result = integrate.quad(
            lambda s: (upper - s) ** k / factorial * phi(s),
            0.0,
            upper,
            epsabs=QUADRATURE_TOL,
            epsrel=QUADRATURE_TOL,
            limit=QUAD_LIMIT,
            full_output=1,
        )
        value, error = result[0], result[1]
        if len(result) > 3:
            raise QuadratureFailure(f"quad failed on [0, {upper:g}]: {result[3]}")
        if not error <= max(QUADRATURE_TOL, QUADRATURE_TOL * abs(value)) * 100.0:
            raise QuadratureFailure(f"quad error {error:.3e} on [0, {upper:g}] exceeds tolerance")
        out.flat[i] = value
    return out


@dataclass
class Forcing:
    """Right-hand side F = (f1, g1, h1, p1, f2, g2)."""

    f1: Function
    g1: Function
    h1: Function
    p1: Function
    f2: Function
    g2: Function

    @classmethod
    def random(cls, p: ValidatedParams, rng: np.random.Generator, amplitude: float = 1.0,
               modes: int = 3) -> Forcing:
        """
        Smooth forcing with f1(0) = f2(0), f2'(0) = 0 and f1, f2 vanishing at
        the far ends, so the velocity data is compatible with the domain.
        """
        l1, l2 = p.ell1, p.ell2
        k = np.arange(1, modes + 1)
        a0 = amplitude * rng.uniform(-1.0, 1.0)
        cg1, ch1, cp1, cg2 = (amplitude * rng.uniform(-1.0, 1.0, modes) for _ in range(4))

        def series(coefficients, wave, length):
            return lambda x: np.dot(coefficients, wave(np.multiply.outer(k, np.asarray(x, float)) * math.pi / length))

        return cls(
            f1=lambda x: a0 * (1.0 - np.asarray(x, float) / l1),
            g1=series(cg1, np.sin, l1),
            h1=series(ch1, np.cos, l1),
            p1=series(cp1, np.cos, l1),
            f2=lambda x: a0 * (1.0 - (np.asarray(x, float) / l2) ** 2),
            g2=series(cg2, np.sin, l2),
        )

    def profiles(self) -> dict[str, Function]:
        """Profiles in StateVector order for sample_state."""
        return {"u1": self.f1, "v1": self.g1, "theta": self.h1, "q": self.p1,
                "u2": self.f2, "v2": self.g2}


@dataclass
class ZeroResolventSolution:
    """y = A^-1 F for S1 in closed form (up to quadrature)."""

    params: ValidatedParams
    forcing: Forcing
    constants: dict[str, float] = field(default_factory=dict)

    def _heat_source(self, s):
        p, F = self.params, self.forcing
        return p.delta1 * F.f1(s) - p.gamma1 * p.tau1 * F.p1(s)

    def theta1(self, x) -> np.ndarray:
        p, F, a1 = self.params, self.forcing, self.constants["a1"]
        x = np.atleast_1d(np.asarray(x, float))
        total = iterated_integral(self._heat_source, 0, x) + iterated_integral(F.h1, 1, x) + a1 * x
        return total / (p.gamma1 * p.kappa1)

    def theta1_primitive(self, x) -> np.ndarray:
        """int_0^x theta1."""
        p, F, a1 = self.params, self.forcing, self.constants["a1"]
        x = np.atleast_1d(np.asarray(x, float))
        total = (iterated_integral(self._heat_source, 1, x) + iterated_integral(F.h1, 2, x)
                 + 0.5 * a1 * x * x)
        return total / (p.gamma1 * p.kappa1)

    def q1(self, x) -> np.ndarray:
        p, F, a1 = self.params, self.forcing, self.constants["a1"]
        x = np.atleast_1d(np.asarray(x, float))
        return -(p.delta1 * F.f1(x) + iterated_integral(F.h1, 0, x) + a1) / p.gamma1

    def u1(self, x) -> np.ndarray:
        p, c = self.params, self.constants
        x = np.atleast_1d(np.asarray(x, float))
        total = (iterated_integral(self.forcing.g1, 1, x) + p.beta1 * self.theta1_primitive(x)
                 + c["c1"] * x + c["d1"])
        return total / p.alpha1

    def u1_x(self, x) -> np.ndarray:
        p, c = self.params, self.constants
        x = np.atleast_1d(np.asarray(x, float))
        return (iterated_integral(self.forcing.g1, 0, x) + p.beta1 * self.theta1(x) + c["c1"]) / p.alpha1

    def u2(self, x, derivative: int = 0) -> np.ndarray:
        """u2 or one of its first three derivatives."""
        p, c = self.params, self.constants
        x = np.atleast_1d(np.asarray(x, float))
        polynomial = np.polynomial.Polynomial([c["m2"], 0.0, c["d2"] / 2.0, c["c2"] / 6.0]).deriv(derivative)
        return (polynomial(x) - iterated_integral(self.forcing.g2, 3 - derivative, x)) / p.alpha2

    def v1(self, x) -> np.ndarray:
        return self.forcing.f1(np.atleast_1d(np.asarray(x, float)))

    def v2(self, x) -> np.ndarray:
        return self.forcing.f2(np.atleast_1d(np.asarray(x, float)))

    def boundary_residuals(self) -> dict[str, float]:
        """Absolute residual of every boundary and interface condition."""
        p = self.params
        l1, l2 = p.ell1, p.ell2
        shear = p.alpha2 * self.u2(0.0, 3)[0] - (p.delta1 / p.beta1) * p.alpha1 * self.u1_x(0.0)[0]
        return {
            "u1(l1)": abs(self.u1(l1)[0]),
            "u2(l2)": abs(self.u2(l2)[0]),
            "u2_xx(l2)": abs(self.u2(l2, 2)[0]),
            "u2_x(0)": abs(self.u2(0.0, 1)[0]),
            "theta1(0)": abs(self.theta1(0.0)[0]),
            "theta1(l1)": abs(self.theta1(l1)[0]),
            "u1(0)-u2(0)": abs(self.u1(0.0)[0] - self.u2(0.0)[0]),
            "shear": abs(shear),
        }

    def profiles(self) -> dict[str, Function]:
        return {"u1": self.u1, "v1": self.v1, "theta": self.theta1, "q": self.q1,
                "u2": self.u2, "v2": self.v2}


def zero_resolvent_s1(p: MaterialParams, forcing: Forcing) -> ZeroResolventSolution:
    """
    Solve A y = F for S1 exactly.

    Args:
        p: Material parameters
        forcing: Right-hand side F

    Returns:
        ZeroResolventSolution whose constants satisfy every boundary and
        interface condition

    Raises:
        QuadratureFailure: If any of the iterated integrals fails
    """
    p = validate_params(p)
    l1, l2 = p.ell1, p.ell2
    solution = ZeroResolventSolution(params=p, forcing=forcing)

    heat_at_end = (iterated_integral(solution._heat_source, 0, l1)[0]
                   + iterated_integral(forcing.h1, 1, l1)[0])
    a1 = -heat_at_end / l1
    solution.constants["a1"] = a1

    ratio = p.alpha1 / p.alpha2
    coupling = p.delta1 / p.beta1
    i1 = iterated_integral(forcing.g1, 1, l1)[0]
    i2 = iterated_integral(forcing.g2, 1, l2)[0]
    i3 = iterated_integral(forcing.g2, 3, l2)[0]
    primitive_end = solution.theta1_primitive(l1)[0]

    c1 = (-i1 - p.beta1 * primitive_end - ratio * (i3 - i2 * l2 ** 2 / 2.0)) / (
        l1 + ratio * coupling * l2 ** 3 / 3.0
    )
    c2 = coupling * c1
    d2 = i2 - c2 * l2
    m2 = i3 - c2 * l2 ** 3 / 6.0 - d2 * l2 ** 2 / 2.0
    solution.constants.update(c1=c1, c2=c2, d2=d2, m2=m2, d1=ratio * m2)
    logger.debug(f"Zero resolvent constants: {solution.constants}")
    return solution


@dataclass
class ConvergenceStudy:
    """Relative error of the discrete zero resolvent per grid, worst over samples."""

    cells: list[int]
    steps: list[float]
    errors: list[float]
    sample_errors: np.ndarray
    order: float | None
    fit: LineFit | None = None

    def rows(self):
        for n, h, e in zip(self.cells, self.steps, self.errors):
            yield {"n": n, "h": h, "error": e}

    def to_csv(self, path):
        return write_csv(path, CONVERGENCE_FIELDS, self.rows())


def _relative_error(g, y_h: np.ndarray, y_exact: np.ndarray) -> float:
    layout = g.layout
    blocks = np.concatenate([y_exact[layout.u], y_exact[layout.theta]])
    diff = np.concatenate([(y_h - y_exact)[layout.u], (y_h - y_exact)[layout.theta]])
    scale = np.abs(blocks).max()
    return float(np.abs(diff).max() / scale) if scale > 0.0 else 0.0


def zero_resolvent_convergence(
    p: MaterialParams,
    n_list,
    samples: int,
    seed: int = 0,
    amplitude: float = 1.0,
) -> ConvergenceStudy:
    """
    Compare A_h^-1 F_h with the exact A^-1 F on a sequence of S1 grids.

    For each random forcing and each grid (n1 = n2 = n), the discrete solve of
    the sampled F is compared with the sampled exact solution in the max norm
    over the u and theta blocks, relative to the exact solution. The observed
    order is minus the slope of log(error) against log(h).

    Returns:
        ConvergenceStudy; order is None when every error is zero (amplitude 0)
    """
    p = validate_params(p)
    cells = [validate_int(n, min_val=4, name="n") for n in validate_increasing(n_list, name="n_list", min_len=2)]
    samples = validate_int(samples, min_val=1, name="samples")
    amplitude = validate_float(amplitude, min_val=0.0, name="amplitude")
    rng = np.random.default_rng(seed)

    generators = [assemble_generator(p, S1, build_grids(p, n, n)) for n in cells]
    sample_errors = np.zeros((samples, len(cells)))
    for i in range(samples):
        forcing = Forcing.random(p, rng, amplitude)
        exact = zero_resolvent_s1(p, forcing)
        for j, g in enumerate(generators):
            y_h = solve(g, sample_state(g, forcing.profiles()))
            y_exact = sample_state(g, exact.profiles())
            sample_errors[i, j] = _relative_error(g, y_h, y_exact)
        logger.debug(f"Sample {i}: errors {sample_errors[i]}")

    errors = sample_errors.max(axis=0)
    steps = [max(p.ell1, p.ell2) / n for n in cells]
    order, fit = None, None
    if np.all(errors > 0.0):
        try:
            fit = fit_line(np.log(steps), np.log(errors))
            order = fit.slope
        except DegenerateData:
            logger.warning("Convergence fit is degenerate")
    logger.info(f"Zero resolvent errors {[f'{e:.3e}' for e in errors]}, order {order}")
    return ConvergenceStudy(
        cells=cells, steps=steps, errors=list(errors), sample_errors=sample_errors, order=order, fit=fit,
    )
