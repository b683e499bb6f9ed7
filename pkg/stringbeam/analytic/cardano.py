"""Cardano's formula for complex depressed cubics s^3 + p s + q = 0."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

# primitive cube root of unity
J = complex(-0.5, 3 ** 0.5 / 2)


@dataclass(frozen=True)
class CardanoSolution:
    """Roots of s^3 + p s + q together with the intermediate quantities."""

    p: complex
    q: complex
    discriminant: complex
    delta: complex
    u0: complex
    v0: complex
    roots: tuple[complex, complex, complex]


def solve_depressed_cubic(p: complex, q: complex) -> CardanoSolution:
    """
    Cardano solution with the branch pairing u0 * v0 = -p/3.

    delta is the square root of q^2 + 4p^3/27 that maximizes |-q + delta|,
    u0 the principal cube root of (-q + delta)/2 and v0 = -p/(3 u0).
    """
    p, q = complex(p), complex(q)
    discriminant = q * q + 4.0 * p ** 3 / 27.0
    delta = cmath.sqrt(discriminant)
    if abs(-q - delta) > abs(-q + delta):
        delta = -delta

    radicand = 0.5 * (-q + delta)
    if radicand == 0:
        # then p = q = 0
        zero = complex(0.0)
        return CardanoSolution(p, q, discriminant, delta, zero, zero, (zero, zero, zero))

    u0 = radicand ** (1.0 / 3.0)
    v0 = -p / (3.0 * u0)
    roots = (u0 + v0, J * u0 + J * J * v0, J * J * u0 + J * v0)
    return CardanoSolution(p, q, discriminant, delta, u0, v0, roots)


def cubic_roots_cardano(p: complex, q: complex) -> tuple[complex, complex, complex]:
    """Roots (s1, s2, s3) of s^3 + p s + q = 0."""
    return solve_depressed_cubic(p, q).roots
