"""
Continued-fraction convergents and the frequency sequence built from them.

Convergents p/q of x satisfy |x - p/q| < 1/q^2. With x = (alpha1/b)^(1/4)
and alpha = alpha1^(1/4) / (4 b^(1/4)), the frequencies

    w_n = sqrt(alpha1) * (q_n + alpha / q_n^2)^2

put the string resonance next to a beam resonance, which is where the
resolvent of the S2 system grows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from stringbeam.model import ValidatedParams, validate_params
from stringbeam.utils.validators import validate_float, validate_int

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirichletSequence:
    """Convergents (p, q) with q strictly increasing; `rational` when the last one equals x."""

    x: float
    pairs: list[tuple[int, int]]
    rational: bool

    @property
    def denominators(self) -> list[int]:
        return [q for _, q in self.pairs]


def continued_fraction(x: float, limit: int):
    """Partial quotients of x (exact on the binary value of x), at most `limit` of them."""
    value = Fraction(x)
    for _ in range(limit):
        whole = math.floor(value)
        yield int(whole)
        value -= whole
        if value == 0:
            return
        value = 1 / value


def dirichlet_sequence(x: float, count: int) -> DirichletSequence:
    """
    The first `count` usable convergents of x.

    Convergents with p = 0 are skipped, and when two consecutive convergents
    share a denominator only the later (closer) one is kept.

    Args:
        x: Positive real to approximate
        count: Number of pairs wanted (>= 1)

    Returns:
        DirichletSequence; `rational` is set when the last convergent equals
        x exactly, so fewer than `count` pairs may be returned
    """
    x = validate_float(x, min_val=0.0, strict_min=True, name="x")
    count = validate_int(count, min_val=1, name="count")

    pairs: list[tuple[int, int]] = []
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    # generous cap: each usable pair needs at most two partial quotients
    for a in continued_fraction(x, 2 * count + 4):
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if p == 0:
            continue
        if pairs and pairs[-1][1] == q:
            pairs[-1] = (p, q)
        else:
            pairs.append((p, q))
        if len(pairs) == count:
            break
    rational = bool(pairs) and Fraction(*pairs[-1]) == Fraction(x)
    if rational:
        logger.warning(f"x = {x!r} is rational; only {len(pairs)} convergent(s) exist")
    return DirichletSequence(x=x, pairs=pairs, rational=rational)


@dataclass(frozen=True)
class FrequencySequence:
    """w_n with the denominators q_n and constants they were built from."""

    frequencies: list[float]
    denominators: list[int]
    target: float
    alpha: float
    rational: bool


def resonant_frequencies(p: ValidatedParams, count: int) -> FrequencySequence:
    """
    Frequencies w_n = sqrt(alpha1) * (q_n + alpha / q_n^2)^2 from the
    convergents of (alpha1/b)^(1/4), b = alpha2 + delta2*beta2.

    When the target is rational and runs out of convergents, the
    denominators continue as k * Q (k = 2, 3, ...) with Q the last one; the
    flag is kept on the result.
    """
    p = validate_params(p)
    count = validate_int(count, min_val=1, name="count")
    b = p.alpha2 + p.delta2 * p.beta2
    target = (p.alpha1 / b) ** 0.25
    alpha = p.alpha1 ** 0.25 / (4.0 * b ** 0.25)

    sequence = dirichlet_sequence(target, count)
    denominators = sequence.denominators
    if len(denominators) < count:
        last = denominators[-1]
        extra = count - len(denominators)
        denominators = denominators + [k * last for k in range(2, 2 + extra)]
        logger.warning(f"Rational target {target!r}: using multiples of q = {last}")

    frequencies = [math.sqrt(p.alpha1) * (q + alpha / q ** 2) ** 2 for q in denominators]
    logger.debug(f"Frequency sequence: {', '.join(f'{w:.6g}' for w in frequencies)}")
    return FrequencySequence(
        frequencies=frequencies,
        denominators=denominators,
        target=target,
        alpha=alpha,
        rational=sequence.rational,
    )
