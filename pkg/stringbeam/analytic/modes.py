"""
Closed-form resolvent solution of S2 on [0, pi] x [0, pi] for the forcing

    f = (0, -alpha1 * w^-a * sin(gamma x), 0, 0, 0, 0),   gamma = w / sqrt(alpha1),

which drives the string exactly at resonance. The string displacement is

    u1 = w^-a (c1 sin(gamma x) + c2 cos(gamma x) - x cos(gamma x) / (2 gamma))

and on the beam

    u2 = sum_k d_k exp(zeta_k (x - pi)) + b_k exp(-zeta_k x),
    theta2 = sum_k rho_k (same exponentials),  rho_k = (alpha2 zeta_k^2 - w^2 / zeta_k^2) / beta2,

with zeta_k the characteristic roots taken with Re zeta_k >= 0, so every
exponential is bounded by 1 on [0, pi]. The eight interface and boundary
conditions give an 8x8 system in (d1, d2, d3, b1, b2, b3, c1, c2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from stringbeam.analytic.roots import CharacteristicCoefficients, characteristic_roots
from stringbeam.linalg import LineFit, fit_line
from stringbeam.model import ValidatedParams, validate_params
from stringbeam.utils.constants import MODE_CONDITION_LIMIT
from stringbeam.utils.errors import NearSingularModeSystem
from stringbeam.utils.tables import write_csv
from stringbeam.utils.validators import PreconditionViolation, validate_float

logger = logging.getLogger(__name__)

MODE_FIELDS = ("w", "gain", "gamma_c1", "cond")

# |mu * pi| below which the moment integrals switch to their power series
SERIES_THRESHOLD = 0.5
SERIES_TERMS = 30


def _moment(m: int, mu: complex) -> complex:
    """int_0^pi x^m exp(mu x) dx."""
    z = mu * math.pi
    if abs(z) < SERIES_THRESHOLD:
        total, term = 0.0, math.pi ** (m + 1)
        for n in range(SERIES_TERMS):
            total += term / (n + m + 1)
            term *= z / (n + 1)
        return total
    end = np.exp(z)
    value = (end - 1.0) / mu
    for k in range(1, m + 1):
        value = (math.pi ** k * end - k * value) / mu
    return value


@dataclass
class ExpSum:
    """sum_j coef_j * x^(m_j) * exp(lam_j (x - anchor_j)) on [0, pi]."""

    terms: list[tuple[complex, int, complex, float]] = field(default_factory=list)

    def add(self, coef: complex, power: int, rate: complex, anchor: float = 0.0) -> ExpSum:
        self.terms.append((complex(coef), power, complex(rate), anchor))
        return self

    def scaled(self, factor: complex) -> ExpSum:
        return ExpSum([(c * factor, m, lam, a) for c, m, lam, a in self.terms])

    def __add__(self, other: ExpSum) -> ExpSum:
        return ExpSum(self.terms + other.terms)

    def derivative(self) -> ExpSum:
        result = ExpSum()
        for c, m, lam, a in self.terms:
            result.add(c * lam, m, lam, a)
            if m:
                result.add(c * m, m - 1, lam, a)
        return result

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape, dtype=complex)
        for c, m, lam, a in self.terms:
            total += c * x ** m * np.exp(lam * (x - a))
        return total

    def norm_squared(self) -> float:
        """int_0^pi |sum|^2 dx in closed form."""
        total = 0.0j
        for cj, mj, lj, aj in self.terms:
            for ck, mk, lk, ak in self.terms:
                offset = -lj * aj - np.conj(lk) * ak
                mu = lj + np.conj(lk)
                power = mj + mk
                if power == 0:
                    # endpoint form; both exponents have nonpositive real part
                    if abs(mu * math.pi) < SERIES_THRESHOLD:
                        integral = np.exp(offset) * _moment(0, mu)
                    else:
                        integral = (np.exp(offset + mu * math.pi) - np.exp(offset)) / mu
                else:
                    integral = np.exp(offset) * _moment(power, mu)
                total += cj * np.conj(ck) * integral
        return max(float(total.real), 0.0)


@dataclass
class ModeSolution:
    """Solved mode system with its diagnostics."""

    w: float
    alpha_exponent: float
    coefficients: np.ndarray
    zeta: np.ndarray
    rho: np.ndarray
    condition: float
    residual: float
    near_singular: bool
    gain: float
    gamma_c1: float
    profiles: dict = field(repr=False, default_factory=dict)

    @property
    def c1(self) -> complex:
        return complex(self.coefficients[6])

    @property
    def c2(self) -> complex:
        return complex(self.coefficients[7])

    def u1(self, x) -> np.ndarray:
        return self.profiles["u1"](x)

    def u2(self, x) -> np.ndarray:
        return self.profiles["u2"](x)

    def theta2(self, x) -> np.ndarray:
        return self.profiles["theta2"](x)

    def ode_residual(self, points: int = 17) -> float:
        """Largest relative residual of the three resolvent ODEs at interior sample points."""
        return self.profiles["ode_residual"](np.linspace(0.0, math.pi, points + 2)[1:-1])


def _check_lengths(p: ValidatedParams):
    if not (math.isclose(p.ell1, math.pi, rel_tol=1e-12) and math.isclose(p.ell2, math.pi, rel_tol=1e-12)):
        raise PreconditionViolation("The mode system is set up for ell1 = ell2 = pi")


def mode_coefficients(
    p: ValidatedParams,
    w: float,
    alpha_exponent: float = 0.0,
    strict: bool = True,
) -> ModeSolution:
    """
    Assemble and solve the 8x8 interface/boundary system at frequency w.

    Args:
        p: Parameters with ell1 = ell2 = pi
        w: Frequency (> 0)
        alpha_exponent: Exponent a of the w^-a normalization
        strict: Raise on a near-singular system instead of flagging it

    Returns:
        ModeSolution with the equilibrated condition number, the relative
        residual of the eight conditions, the energy-norm gain
        w^-a ||y|| / ||f|| and |gamma c1|

    Raises:
        NearSingularModeSystem: If strict and the condition number exceeds 1e12
    """
    p = validate_params(p)
    _check_lengths(p)
    w = validate_float(w, min_val=0.0, strict_min=True, name="w")
    cc = CharacteristicCoefficients.from_params(p)
    roots = characteristic_roots(cc, w)

    zeta = np.array([z if z.real >= 0.0 else -z for z in roots.z], dtype=complex)
    rho = (p.alpha2 * zeta ** 2 - w * w / zeta ** 2) / p.beta2
    decay = np.exp(-zeta * math.pi)
    gamma = w / math.sqrt(p.alpha1)
    scale = w ** (-alpha_exponent)
    shear = (p.delta2 / p.beta2) * w * w / zeta
    # sin and cos of gamma*pi reduced mod 2*pi before evaluation
    phase = math.pi * math.fmod(gamma, 2.0)
    sin_g, cos_g = math.sin(phase), math.cos(phase)

    zero, one = np.zeros(3), np.ones(3)
    system = np.zeros((8, 8), dtype=complex)
    rhs = np.zeros(8, dtype=complex)
    # interface x = 0
    system[0] = [*decay, *one, 0.0, -scale]
    system[1] = [*(zeta * decay), *(-zeta), 0.0, 0.0]
    system[2] = [*(shear * decay), *(-shear), -p.alpha1 * scale * gamma, 0.0]
    rhs[2] = -p.alpha1 * scale / (2.0 * gamma)
    system[3] = [*(rho * decay), *rho, 0.0, 0.0]
    # far ends x = pi
    system[4] = [*one, *decay, 0.0, 0.0]
    system[5] = [*(zeta ** 2), *(zeta ** 2 * decay), 0.0, 0.0]
    system[6] = [*rho, *(rho * decay), 0.0, 0.0]
    system[7] = [*zero, *zero, sin_g, cos_g]
    rhs[7] = math.pi * cos_g / (2.0 * gamma)

    row_scale = 1.0 / np.abs(system).max(axis=1)
    balanced = system * row_scale[:, None]
    col_scale = 1.0 / np.abs(balanced).max(axis=0)
    balanced = balanced * col_scale[None, :]
    condition = float(np.linalg.cond(balanced))
    near_singular = not condition <= MODE_CONDITION_LIMIT
    if near_singular:
        if strict:
            raise NearSingularModeSystem(
                f"Mode system at w = {w:g} has condition number {condition:.3e}", condition
            )
        logger.warning(f"Mode system at w = {w:g} is near singular (cond {condition:.3e})")

    coefficients = np.linalg.solve(balanced, rhs * row_scale) * col_scale
    residual = float(
        np.abs(system @ coefficients - rhs).max()
        / (np.abs(system).max() * np.abs(coefficients).max() + np.abs(rhs).max())
    )

    d, b = coefficients[:3], coefficients[3:6]
    c1, c2 = coefficients[6], coefficients[7]
    u1 = (
        ExpSum()
        .add(scale * (c1 / 2j + c2 / 2.0), 0, 1j * gamma)
        .add(scale * (-c1 / 2j + c2 / 2.0), 0, -1j * gamma)
        .add(-scale / (4.0 * gamma), 1, 1j * gamma)
        .add(-scale / (4.0 * gamma), 1, -1j * gamma)
    )
    u2, theta2 = ExpSum(), ExpSum()
    for k in range(3):
        u2.add(d[k], 0, zeta[k], math.pi).add(b[k], 0, -zeta[k], 0.0)
        theta2.add(rho[k] * d[k], 0, zeta[k], math.pi).add(rho[k] * b[k], 0, -zeta[k], 0.0)
    forcing = ExpSum().add(-p.alpha1 * scale / 2j, 0, 1j * gamma).add(p.alpha1 * scale / 2j, 0, -1j * gamma)

    du1 = u1.derivative()
    ddu2 = u2.derivative().derivative()
    dtheta2 = theta2.derivative()
    big_l = cc.L(w)
    flux = dtheta2.scaled(-p.kappa2 / big_l)

    energy_norm = (
        w * w * u1.norm_squared()
        + p.alpha1 * du1.norm_squared()
        + (p.delta2 / p.beta2) * w * w * u2.norm_squared()
        + (p.delta2 * p.alpha2 / p.beta2) * ddu2.norm_squared()
        + theta2.norm_squared()
        + (p.gamma2 * p.tau2 / p.kappa2) * flux.norm_squared()
    )
    forcing_norm = forcing.norm_squared()
    gain = scale * math.sqrt(energy_norm / forcing_norm)

    def ode_residual(x: np.ndarray) -> float:
        ddu1 = du1.derivative()(x)
        u2_2 = ddu2(x)
        u2_4 = ddu2.derivative().derivative()(x)
        th, th_2 = theta2(x), dtheta2.derivative()(x)
        string_terms = (-w * w * u1(x), -p.alpha1 * ddu1, -forcing(x))
        beam_terms = (-w * w * u2(x), p.alpha2 * u2_4, -p.beta2 * th_2)
        heat_terms = (1j * w * th, -(cc.c / big_l) * th_2, 1j * w * p.delta2 * u2_2)
        worst = 0.0
        for terms in (string_terms, beam_terms, heat_terms):
            size = sum(np.abs(t) for t in terms)
            worst = max(worst, float((np.abs(sum(terms)) / np.maximum(size, 1e-300)).max()))
        return worst

    solution = ModeSolution(
        w=w,
        alpha_exponent=alpha_exponent,
        coefficients=coefficients,
        zeta=zeta,
        rho=rho,
        condition=condition,
        residual=residual,
        near_singular=near_singular,
        gain=gain,
        gamma_c1=abs(gamma * c1),
        profiles={"u1": u1, "u2": u2, "theta2": theta2, "ode_residual": ode_residual},
    )
    logger.debug(f"Mode system w={w:g}: cond {condition:.3e}, residual {residual:.3e}, gain {gain:.6g}")
    return solution


@dataclass
class ModeGainTable:
    """Mode-system diagnostics along a frequency list."""

    solutions: list[ModeSolution]

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([s.w for s in self.solutions])

    def fit_gamma_c1(self, alpha1: float) -> LineFit:
        """Fit log|gamma c1| against log gamma."""
        gammas = self.frequencies / math.sqrt(alpha1)
        return fit_line(np.log(gammas), np.log([s.gamma_c1 for s in self.solutions]))

    def fit_gain(self) -> LineFit:
        return fit_line(np.log(self.frequencies), np.log([s.gain for s in self.solutions]))

    def rows(self):
        for s in self.solutions:
            yield {"w": s.w, "gain": s.gain, "gamma_c1": s.gamma_c1, "cond": s.condition}

    def to_csv(self, path):
        return write_csv(path, MODE_FIELDS, self.rows())


def mode_gain_table(p: ValidatedParams, frequencies, alpha_exponent: float = 0.0) -> ModeGainTable:
    """Solve the mode system at each frequency; near-singular rows are flagged, not dropped."""
    return ModeGainTable([
        mode_coefficients(p, w, alpha_exponent, strict=False) for w in frequencies
    ])
