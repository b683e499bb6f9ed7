"""
Roots of the characteristic sextic of the thermoelastic beam at frequency w:

    a z^6 - i w L b z^4 - c w^2 z^2 + i w^3 L = 0,   L = i tau2 w + 1,

with a = alpha2 kappa2 gamma2, b = alpha2 + delta2 beta2, c = gamma2 kappa2.
In X = z^2 it is a cubic; the shift X = s + i b w L / (3a) depresses it and
Cardano gives s. Labels follow the large-w asymptotes

    z1 ~ b^(-1/4) sqrt(w),  z2 ~ i b^(-1/4) sqrt(w),  z3 ~ i sqrt(b tau2 / a) w.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from stringbeam.analytic.cardano import solve_depressed_cubic
from stringbeam.model import ValidatedParams, validate_params
from stringbeam.utils.constants import DISCRIMINANT_FLOOR
from stringbeam.utils.errors import AsymptoticsNotConfirmed, DegenerateDiscriminant
from stringbeam.utils.tables import write_csv
from stringbeam.utils.validators import (
    PreconditionViolation,
    ValidationError,
    validate_float,
    validate_increasing,
)

logger = logging.getLogger(__name__)

ROOT_FIELDS = ("w", "re_z1", "im_z1", "re_z2", "im_z2", "re_z3", "im_z3", "residual")
ASYMPTOTIC_FIELDS = ("w", "dev_z1", "dev_z2", "dev_z3")


@dataclass(frozen=True)
class CharacteristicCoefficients:
    a: float
    b: float
    c: float
    tau: float

    @classmethod
    def from_params(cls, p: ValidatedParams) -> CharacteristicCoefficients:
        p = validate_params(p)
        return cls(
            a=p.alpha2 * p.kappa2 * p.gamma2,
            b=p.alpha2 + p.delta2 * p.beta2,
            c=p.gamma2 * p.kappa2,
            tau=p.tau2,
        )

    @property
    def m(self) -> float:
        return 2.0 * self.b ** 3 / (27.0 * self.a ** 3)

    @property
    def M(self) -> float:
        return math.sqrt(4.0 * self.b ** 3 / (27.0 * self.a ** 4))

    def L(self, w: float) -> complex:
        return complex(1.0, self.tau * w)

    def sextic(self, w: float) -> np.ndarray:
        """Coefficients of the sextic in z, highest degree first."""
        big_l = self.L(w)
        return np.array([self.a, 0, -1j * w * big_l * self.b, 0, -self.c * w * w, 0,
                         1j * w ** 3 * big_l], dtype=complex)

    def asymptotes(self, w: float) -> tuple[complex, complex, complex]:
        """Leading-order approximations of z1, z2, z3."""
        slow = self.b ** -0.25 * math.sqrt(w)
        return complex(slow), 1j * slow, 1j * math.sqrt(self.b * self.tau / self.a) * w


@dataclass(frozen=True)
class CharacteristicRoots:
    """z1, z2, z3 (the six roots are +-z_k) with the Cardano intermediates."""

    w: float
    z: tuple[complex, complex, complex]
    x: tuple[complex, complex, complex]
    s: tuple[complex, complex, complex]
    p: complex
    q: complex
    discriminant: complex
    delta: complex
    u0: complex
    v0: complex

    @property
    def z1(self) -> complex:
        return self.z[0]

    @property
    def z2(self) -> complex:
        return self.z[1]

    @property
    def z3(self) -> complex:
        return self.z[2]

    def all_roots(self) -> np.ndarray:
        return np.array([*self.z, *(-zk for zk in self.z)])

    def sextic_residuals(self, cc: CharacteristicCoefficients) -> np.ndarray:
        """|P(z)| / sum_k |c_k| |z|^k for each of the six roots."""
        coeffs = cc.sextic(self.w)
        magnitudes = np.abs(coeffs)
        result = []
        for root in self.all_roots():
            scale = np.polyval(magnitudes, abs(root))
            result.append(abs(np.polyval(coeffs, root)) / scale)
        return np.array(result)

    def cross_term(self) -> complex:
        """sum over cyclic k of z_k^-2 (z_{k+1}^2 - z_{k+2}^2)."""
        x = self.x
        return sum((x[(k + 1) % 3] - x[(k + 2) % 3]) / x[k] for k in range(3))


def _relative_distance(value: complex, target: complex) -> float:
    return abs(value - target) / abs(target)


def _label(values, cc: CharacteristicCoefficients, w: float):
    """Order the three X roots to match the asymptotes of X1, X2, X3."""
    big_l = cc.L(w)
    targets = (
        w / math.sqrt(cc.b),
        -w / math.sqrt(cc.b),
        1j * w * big_l * cc.b / cc.a,
    )

    def cost(perm):
        return (
            sum(_relative_distance(values[i], t) for i, t in zip(perm, targets)),
            tuple(abs(values[i]) for i in perm),
        )

    best = min(itertools.permutations(range(3)), key=cost)
    return tuple(values[i] for i in best)


def _upper_sqrt(x: complex) -> complex:
    root = cmath.sqrt(x)
    return -root if root.imag < 0 else root


def characteristic_roots(cc: CharacteristicCoefficients, w: float) -> CharacteristicRoots:
    """
    Solve the sextic at frequency w by Cardano on the depressed cubic.

    Raises:
        DegenerateDiscriminant: If the cubic discriminant vanishes at w
    """
    w = validate_float(w, min_val=0.0, strict_min=True, name="w")
    big_l = cc.L(w)
    a, b, c = cc.a, cc.b, cc.c
    p = (w * w / a) * (big_l * big_l * b * b / (3.0 * a) - c)
    q = 1j * (w ** 3 * big_l / a) * (
        2.0 * big_l * big_l * b ** 3 / (27.0 * a * a) - b * c / (3.0 * a) + 1.0
    )

    solution = solve_depressed_cubic(p, q)
    floor = DISCRIMINANT_FLOOR * (abs(q) ** 2 + 4.0 * abs(p) ** 3 / 27.0)
    if abs(solution.discriminant) <= floor:
        raise DegenerateDiscriminant(f"Cubic discriminant vanishes at w = {w:g}")

    shift = 1j * b * w * big_l / (3.0 * a)
    x = _label([s + shift for s in solution.roots], cc, w)
    z = (cmath.sqrt(x[0]), _upper_sqrt(x[1]), _upper_sqrt(x[2]))
    s = tuple(xk - shift for xk in x)
    return CharacteristicRoots(
        w=w, z=z, x=x, s=s, p=p, q=q,
        discriminant=solution.discriminant, delta=solution.delta,
        u0=solution.u0, v0=solution.v0,
    )


def root_table(cc: CharacteristicCoefficients, w_list) -> list[CharacteristicRoots]:
    return [characteristic_roots(cc, w) for w in w_list]


def write_root_table(path, cc: CharacteristicCoefficients, roots: list[CharacteristicRoots]):
    rows = []
    for r in roots:
        row = {"w": r.w, "residual": float(r.sextic_residuals(cc).max())}
        for k, zk in enumerate(r.z, start=1):
            row[f"re_z{k}"] = zk.real
            row[f"im_z{k}"] = zk.imag
        rows.append(row)
    return write_csv(path, ROOT_FIELDS, rows)


@dataclass
class AsymptoticTable:
    """Relative deviations of z1, z2, z3 from their asymptotes, one row per w."""

    w: list[float]
    deviations: np.ndarray

    def is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.deviations, axis=0) < 0.0))

    @property
    def status(self) -> str:
        return "confirmed" if self.is_decreasing() else "failed"

    def final(self) -> np.ndarray:
        return self.deviations[-1]

    def rows(self):
        for w, (d1, d2, d3) in zip(self.w, self.deviations):
            yield {"w": w, "dev_z1": d1, "dev_z2": d2, "dev_z3": d3}

    def to_csv(self, path):
        return write_csv(path, ASYMPTOTIC_FIELDS, self.rows())


def verify_root_asymptotics(cc: CharacteristicCoefficients, w_list, strict: bool = False) -> AsymptoticTable:
    """
    Deviations |z_k / asymptote_k - 1| over an increasing frequency list.

    The table's status is "failed" unless every deviation shrinks from one
    frequency to the next.

    Raises:
        PreconditionViolation: If w_list has fewer than 3 entries, is not
            increasing, or spans less than two decades
        AsymptoticsNotConfirmed: With strict=True, when the status is "failed"
    """
    try:
        w_list = validate_increasing(w_list, name="w_list", min_len=3)
    except ValidationError as e:
        raise PreconditionViolation(str(e))
    if w_list[0] <= 0.0 or w_list[-1] / w_list[0] < 100.0 * (1.0 - 1e-12):
        raise PreconditionViolation("w_list must be positive and span at least two decades")

    rows = []
    for w in w_list:
        roots = characteristic_roots(cc, w)
        rows.append([abs(zk / ak - 1.0) for zk, ak in zip(roots.z, cc.asymptotes(w))])
    table = AsymptoticTable(w=list(w_list), deviations=np.array(rows))
    if not table.is_decreasing():
        message = f"Root deviations are not monotone over w = {list(w_list)}"
        if strict:
            raise AsymptoticsNotConfirmed(message)
        logger.warning(message)
    return table
