"""Least-squares line fits used by the decay and growth diagnostics."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.stats import linregress

from stringbeam.utils.errors import DegenerateData
from stringbeam.utils.validators import DimensionMismatch


class LineFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    stderr: float


def fit_line(xs, ys) -> LineFit:
    """
    Ordinary least-squares line through (xs, ys).

    Raises:
        DegenerateData: If fewer than two distinct abscissae are given
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DimensionMismatch(f"Fit data of shapes {xs.shape} and {ys.shape}")
    if np.unique(xs).size < 2:
        raise DegenerateData("A line fit needs at least two distinct abscissae")

    if np.ptp(ys) == 0.0:
        # constant data is fitted exactly by a flat line
        return LineFit(0.0, float(ys[0]), 1.0, 0.0)

    result = linregress(xs, ys)
    return LineFit(float(result.slope), float(result.intercept),
                   float(result.rvalue ** 2), float(result.stderr))
