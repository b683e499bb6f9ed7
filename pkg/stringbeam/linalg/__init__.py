"""
Linear algebra module - banded LU, iterative spectral solvers, line fits.
"""

from .banded import (  # noqa: F401
    BandedMatrix,
    LUFactors,
    lu_factor,
    lu_solve,
    factor_sparse,
)
from .iterative import (  # noqa: F401
    InnerProduct,
    smallest_singular_value,
    shift_invert_eigs,
    weighted_operator_norm,
)
from .fitting import LineFit, fit_line  # noqa: F401
