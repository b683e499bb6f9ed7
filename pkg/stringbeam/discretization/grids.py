"""Uniform primal/dual grids on the string and beam intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stringbeam.model import ValidatedParams
from stringbeam.utils.constants import MIN_CELLS
from stringbeam.utils.validators import GridTooCoarse, ValidationError, validate_int


@dataclass(frozen=True, eq=False)
class Grid1D:
    """n cells of width h on [0, length]; primal nodes i*h, dual nodes (i + 1/2)*h."""

    n: int
    length: float

    def __post_init__(self):
        if self.n < MIN_CELLS:
            raise GridTooCoarse(f"A grid needs at least {MIN_CELLS} cells (got {self.n})")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h

    @property
    def dual_nodes(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.h


def build_grids(p: ValidatedParams, n1: int, n2: int) -> tuple[Grid1D, Grid1D]:
    """
    Grids on [0, ell1] (string) and [0, ell2] (beam).

    Raises:
        GridTooCoarse: If either cell count is below the minimum
    """
    try:
        n1 = validate_int(n1, name="n1")
        n2 = validate_int(n2, name="n2")
    except ValidationError as e:
        raise GridTooCoarse(str(e))
    return Grid1D(n1, p.ell1), Grid1D(n2, p.ell2)
